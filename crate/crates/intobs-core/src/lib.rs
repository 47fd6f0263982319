//! Exact computer algebra for integrable observables on moduli of curves.
//!
//! The crate is `no_std` with `alloc`; the optional `parallel` feature pulls in `std`
//! and rayon for the tree sums.
#![no_std]

extern crate alloc;
#[cfg(feature = "parallel")]
extern crate std;

pub mod exactnum;

mod error;
pub use error::Error;
pub mod correlators;
pub mod diffpoly;
pub mod trees;
pub mod hierarchy;
pub mod piident;
mod par;
