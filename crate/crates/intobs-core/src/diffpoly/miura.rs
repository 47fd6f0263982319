use alloc::format;
use alloc::vec::Vec;

use super::eta::MetricEta;
use super::jet::{evolve, DiffPoly, JetMonomial};
use crate::exactnum::Rational;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiuraKind {
    SecondKind,
    Normal,
}

/// Change of variables `ŵ^α = targets[α−1](w)`, close to the identity.
#[derive(Clone, Debug)]
pub struct MiuraMap {
    pub kind: MiuraKind,
    pub targets: Vec<DiffPoly>,
    /// Generator `G` for the normal kind.
    pub generator: Option<DiffPoly>,
}

impl MiuraMap {
    pub fn identity(n: usize, eps_max: u32) -> Self {
        MiuraMap {
            kind: MiuraKind::SecondKind,
            targets: (1..=n as u16).map(|a| DiffPoly::jet(a, 0, eps_max)).collect(),
            generator: None,
        }
    }

    pub fn second_kind(targets: Vec<DiffPoly>) -> Result<Self, Error> {
        let m = MiuraMap { kind: MiuraKind::SecondKind, targets, generator: None };
        m.check_identity_at_eps0()?;
        Ok(m)
    }

    /// `ŵ^α = w^α + η^{αμ} ∂_x ∂_{t^{μ,0}} G`, where `∂_{t^{μ,0}} w^γ = ∂_x flux_mu0[μ−1][γ−1]`.
    pub fn normal(generator: DiffPoly, eta: &MetricEta, flux_mu0: &[Vec<DiffPoly>]) -> Result<Self, Error> {
        let n = eta.n();
        let eps_max = generator.eps_max();
        if flux_mu0.len() != n {
            return Err(Error::InvalidArgument(format!("need {n} flows t^(mu,0), got {}", flux_mu0.len())));
        }
        let flows: Vec<DiffPoly> = flux_mu0.iter().map(|f| evolve(&generator, f)).collect();
        let mut targets = Vec::with_capacity(n);
        for a in 1..=n as u16 {
            let mut t = DiffPoly::jet(a, 0, eps_max);
            for mu in 1..=n as u16 {
                let c = eta.upper(a, mu);
                if !c.is_zero() {
                    t = t.add(&flows[mu as usize - 1].d_x().scale(c));
                }
            }
            targets.push(t);
        }
        let m = MiuraMap { kind: MiuraKind::Normal, targets, generator: Some(generator) };
        m.check_identity_at_eps0()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn eps_max(&self) -> u32 {
        self.targets.iter().map(|t| t.eps_max()).min().unwrap_or(0)
    }

    fn check_identity_at_eps0(&self) -> Result<(), Error> {
        for (i, t) in self.targets.iter().enumerate() {
            let lead = t.eps_part(0);
            let id = DiffPoly::jet(i as u16 + 1, 0, t.eps_max());
            if lead != id.truncate(t.eps_max()) {
                return Err(Error::InvalidArgument(format!(
                    "Miura map is not the identity at eps^0 in component {}: {}",
                    i + 1,
                    lead
                )));
            }
        }
        Ok(())
    }

    /// Express a polynomial in the new variables through the old ones.
    pub fn apply(&self, p: &DiffPoly) -> DiffPoly {
        p.substitute(&self.targets)
    }

    /// `next ∘ self`: old variables → `self`'s new variables → `next`'s new variables.
    pub fn then(&self, next: &MiuraMap) -> MiuraMap {
        MiuraMap {
            kind: MiuraKind::SecondKind,
            targets: next.targets.iter().map(|t| self.apply(t)).collect(),
            generator: None,
        }
    }

    /// Inverse up to the ε truncation, by the fixed point `w = ŵ − U(w)`.
    pub fn invert(&self) -> Result<MiuraMap, Error> {
        self.check_identity_at_eps0()?;
        let eps_max = self.eps_max();
        let n = self.n();
        let u: Vec<DiffPoly> = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| t.sub(&DiffPoly::jet(i as u16 + 1, 0, eps_max)))
            .collect();
        let mut s: Vec<DiffPoly> = (1..=n as u16).map(|a| DiffPoly::jet(a, 0, eps_max)).collect();
        for _ in 0..=eps_max {
            s = (0..n).map(|i| DiffPoly::jet(i as u16 + 1, 0, eps_max).sub(&u[i].substitute(&s))).collect();
        }
        Ok(MiuraMap { kind: MiuraKind::SecondKind, targets: s, generator: None })
    }

    pub fn is_identity(&self) -> bool {
        self.targets.iter().enumerate().all(|(i, t)| {
            t.terms().count() == 1 && t.coeff(&JetMonomial::new(0, alloc::vec![(i as u16 + 1, 0)])) == Rational::one()
        })
    }
}
