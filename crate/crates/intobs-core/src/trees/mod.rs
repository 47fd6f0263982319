//! Stable rooted trees, level functions and the tree classes built on them.
mod assemble;
mod check;
mod tree;

pub use assemble::{
    ab_vars, all_insertions, assemble_b, integrate_a1, integrate_b, integrate_upsilon, integrate_xi,
    integrate_xi_parts, Context, Insertions, IntegratedBClass,
};
pub use check::{
    check_geometric_master, check_lrt, check_master, unit_insertions, CheckOptions, CheckReport, Lrt2Mode, ProbeMode,
    Status, Violation,
};
pub use tree::{enumerate_levels, enumerate_trees, Node, StableRootedTree, Vertex};
