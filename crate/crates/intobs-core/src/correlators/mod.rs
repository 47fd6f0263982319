//! Correlator oracles: the ψ-engine, λ-class relations, CohFT and observable sources, DR-type
//! correlators and in-memory tables.

mod cohft;
mod lambda;
mod psi;
mod table;

pub use cohft::{
    a1_correlator, dr_correlator, Cohft, FcohftView, Observable, PerturbedObservable, PsiObservable, TableCohft,
    TableObservable, TrivialCohft,
};
pub use lambda::{hodge_reduce, hodge_top_integral, lambda_top_triple, LambdaCombination};
pub use psi::{global_psi_engine, psi_correlator, psi_correlator_genus0, PsiEngine};
pub use table::{ClassTag, CorrelatorKey, CorrelatorTable, Field, TableKind};

/// Number of `M`-factor Hodge CohFT variables `x_1..x_M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HodgeSpec {
    pub m: usize,
}

impl HodgeSpec {
    pub fn new(m: usize) -> Result<Self, crate::Error> {
        if m == 0 {
            return Err(crate::Error::InvalidArgument("Hodge CohFT needs M >= 1".into()));
        }
        Ok(HodgeSpec { m })
    }

    pub fn vars(&self) -> crate::exactnum::VarSet {
        crate::exactnum::VarSet::indexed("x", self.m)
    }
}
