//! Integrable hierarchies of observables: tau functions, fluxes from tree classes and from
//! series matching, DR fluxes, Miura maps, commutation checks and the two worked examples.
mod demo;
mod flux;
mod tau;

pub use demo::{hodge_demo, kdv_demo, HodgeReport, IntegralEntry, KdvReport};
pub use flux::{
    check_commutation, dr_flux, dr_hamiltonian, flux_from_series, CommutationEntry, FluxBuilder, FluxSet,
};
pub use tau::{vector_potential, vector_potential_table, SeriesBounds, TauData};
