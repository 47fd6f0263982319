use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::psi::psi_correlator;
use super::table::{ClassTag, CorrelatorKey, CorrelatorTable, Field, TableKind};
use crate::diffpoly::MetricEta;
use crate::exactnum::{multinomial, Rational};
use crate::Error;

/// Source of CohFT correlators `∫_{M̄_{g,n}} pc(⊗e_{α_i}) ∏ψ_i^{d_i}`.
pub trait Cohft: Send + Sync {
    fn n_fields(&self) -> usize;
    fn eta(&self) -> &MetricEta;
    fn correlator(&self, g: u32, fields: &[Field], psi: &[u32]) -> Result<Rational, Error>;
    /// Upper bound on the Chow degree of `pc_{g,n}`, when known.
    fn degree_bound(&self, _g: u32, _n: usize) -> Option<u32> {
        None
    }
}

/// The trivial CohFT: one field, `pc = 1`.
#[derive(Clone, Debug)]
pub struct TrivialCohft {
    eta: MetricEta,
}

impl Default for TrivialCohft {
    fn default() -> Self {
        TrivialCohft { eta: MetricEta::identity(1) }
    }
}

impl Cohft for TrivialCohft {
    fn n_fields(&self) -> usize {
        1
    }

    fn eta(&self) -> &MetricEta {
        &self.eta
    }

    fn correlator(&self, g: u32, fields: &[Field], psi: &[u32]) -> Result<Rational, Error> {
        check_stable(g, fields.len())?;
        if fields.iter().any(|&f| f != 1) {
            return Err(Error::InvalidArgument(format!("trivial CohFT has only field 1, got {fields:?}")));
        }
        Ok(psi_correlator(g, psi))
    }

    fn degree_bound(&self, _g: u32, _n: usize) -> Option<u32> {
        Some(0)
    }
}

/// CohFT backed by a `cohft_psi` table.
#[derive(Clone, Debug)]
pub struct TableCohft {
    table: Arc<CorrelatorTable>,
}

impl TableCohft {
    pub fn new(table: Arc<CorrelatorTable>) -> Result<Self, Error> {
        if table.kind() != TableKind::CohftPsi {
            return Err(Error::InvalidArgument(format!("expected a cohft_psi table, got {}", table.kind().as_str())));
        }
        Ok(TableCohft { table })
    }

    pub fn table(&self) -> &CorrelatorTable {
        &self.table
    }
}

impl Cohft for TableCohft {
    fn n_fields(&self) -> usize {
        self.table.n_fields()
    }

    fn eta(&self) -> &MetricEta {
        self.table.eta()
    }

    fn correlator(&self, g: u32, fields: &[Field], psi: &[u32]) -> Result<Rational, Error> {
        self.table.lookup(&CorrelatorKey::plain(g, fields.to_vec(), psi.to_vec()))
    }

    fn degree_bound(&self, g: u32, n: usize) -> Option<u32> {
        if self.table.is_trivial() {
            Some(0)
        } else {
            self.table.degree_bound(g, n)
        }
    }
}

pub(crate) fn check_stable(g: u32, n: usize) -> Result<(), Error> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        Err(Error::InvalidArgument(format!("unstable (g,n) = ({g},{n})")))
    } else {
        Ok(())
    }
}

/// A polynomial family of classes `O_{g,n}(x_1..x_n)`, accessed through its integrals.
pub trait Observable: Send + Sync {
    fn name(&self) -> String;

    /// `∫_{M̄_{g,n}} Coeff_{∏x_i^{k_i}} O_{g,n}(x) · ∏ψ_i^{d_i} · pc(⊗e_{α_i})`.
    fn integrate(&self, cohft: &dyn Cohft, g: u32, fields: &[Field], exps: &[u32], psi: &[u32])
        -> Result<Rational, Error>;
}

/// `O_{g,n} = ∏ 1/(1 − x_i ψ_i)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PsiObservable;

impl Observable for PsiObservable {
    fn name(&self) -> String {
        "psi".into()
    }

    fn integrate(&self, cohft: &dyn Cohft, g: u32, fields: &[Field], exps: &[u32], psi: &[u32])
        -> Result<Rational, Error> {
        let d: Vec<u32> = exps.iter().zip(psi).map(|(a, b)| a + b).collect();
        cohft.correlator(g, fields, &d)
    }
}

/// Observable read from an `obs_O` table.
#[derive(Clone, Debug)]
pub struct TableObservable {
    table: Arc<CorrelatorTable>,
}

impl TableObservable {
    pub fn new(table: Arc<CorrelatorTable>) -> Result<Self, Error> {
        if table.kind() != TableKind::ObsO {
            return Err(Error::InvalidArgument(format!("expected an obs_O table, got {}", table.kind().as_str())));
        }
        Ok(TableObservable { table })
    }
}

impl Observable for TableObservable {
    fn name(&self) -> String {
        "table".into()
    }

    fn integrate(&self, _cohft: &dyn Cohft, g: u32, fields: &[Field], exps: &[u32], psi: &[u32])
        -> Result<Rational, Error> {
        self.table.lookup(&CorrelatorKey {
            g,
            fields: fields.to_vec(),
            psi: psi.to_vec(),
            class: ClassTag::ObsO(exps.to_vec()),
        })
    }
}

/// Wraps an observable and shifts one vertex integral; used as a negative control.
pub struct PerturbedObservable<O> {
    pub inner: O,
    pub g: u32,
    /// Sorted multiset of `exps[i] + psi[i]` that receives the shift.
    pub insertion: Vec<u32>,
    pub delta: Rational,
}

impl<O: Observable> Observable for PerturbedObservable<O> {
    fn name(&self) -> String {
        format!("perturbed({})", self.inner.name())
    }

    fn integrate(&self, cohft: &dyn Cohft, g: u32, fields: &[Field], exps: &[u32], psi: &[u32])
        -> Result<Rational, Error> {
        let v = self.inner.integrate(cohft, g, fields, exps, psi)?;
        let mut tot: Vec<u32> = exps.iter().zip(psi).map(|(a, b)| a + b).collect();
        tot.sort_unstable();
        if g == self.g && tot == self.insertion {
            Ok(v + &self.delta)
        } else {
            Ok(v)
        }
    }
}

fn a_power_coeff(mono: &[u32]) -> Result<(u32, Rational), Error> {
    let k: u32 = mono.iter().sum();
    Ok((k, multinomial(k, mono)?))
}

/// Coefficient of `∏ a_i^{k_i}` in `∫ D_{g,n+1}(a_1..a_n) ∏ψ^{d} pc`, with
/// `D_{g,n+1} = −λ_g DR_g(a_1,…,a_n,−𝐚) / (1 + 𝐚ψ_{n+1})`. Genus 0 is built in; higher genus
/// needs a `dr_D` table.
pub fn dr_correlator(
    cohft: &dyn Cohft,
    g: u32,
    fields: &[Field],
    psi: &[u32],
    monomial: &[u32],
    table: Option<&CorrelatorTable>,
) -> Result<Rational, Error> {
    check_stable(g, fields.len())?;
    if monomial.len() + 1 != fields.len() || psi.len() != fields.len() {
        return Err(Error::InvalidArgument("dr_correlator: monomial must cover the first n of n+1 points".into()));
    }
    if g == 0 {
        let (k, c) = a_power_coeff(monomial)?;
        let mut d = psi.to_vec();
        *d.last_mut().unwrap() += k;
        let sign = if k % 2 == 0 { -Rational::one() } else { Rational::one() };
        return Ok(sign * c * cohft.correlator(0, fields, &d)?);
    }
    let key = CorrelatorKey { g, fields: fields.to_vec(), psi: psi.to_vec(), class: ClassTag::DrD(monomial.to_vec()) };
    match table {
        Some(t) => t.lookup(&key),
        None => Err(Error::TableRequired(format!("{key}"))),
    }
}

/// Coefficient of `∏ a_i^{k_i}` in `∫_{M̄_{g,n+1}} A¹_{g,n}(a) ∏ψ^{d} pc`. In genus 0 the class is
/// `∏_{i≤n} 1/(1 − a_iψ_i)`; higher genus needs an `a1` entry in a `dr_D` table.
pub fn a1_correlator(
    cohft: &dyn Cohft,
    g: u32,
    fields: &[Field],
    psi: &[u32],
    monomial: &[u32],
    table: Option<&CorrelatorTable>,
) -> Result<Rational, Error> {
    check_stable(g, fields.len())?;
    if monomial.len() + 1 != fields.len() || psi.len() != fields.len() {
        return Err(Error::InvalidArgument("a1_correlator: monomial must cover the first n of n+1 points".into()));
    }
    if g == 0 {
        let mut d = psi.to_vec();
        for (x, k) in d.iter_mut().zip(monomial) {
            *x += k;
        }
        return cohft.correlator(0, fields, &d);
    }
    let key = CorrelatorKey { g, fields: fields.to_vec(), psi: psi.to_vec(), class: ClassTag::A1(monomial.to_vec()) };
    match table {
        Some(t) => t.lookup(&key),
        None => Err(Error::TableRequired(format!("{key}"))),
    }
}

/// F-CohFT view of a partial CohFT: `fc_{g,n+1}(e_α; e_{α_1},…) = η^{αμ} pc_{g,n+1}(e_{α_1},…,e_μ)`,
/// the distinguished output moved to the last slot.
pub struct FcohftView<'a> {
    pub cohft: &'a dyn Cohft,
}

impl<'a> FcohftView<'a> {
    pub fn new(cohft: &'a dyn Cohft) -> Self {
        FcohftView { cohft }
    }

    /// Component `α` of `∫ fc_{g,n+1}(⊗e_{α_i}) ψ_0^{d_0} ∏ψ_i^{d_i}`.
    pub fn correlator(&self, g: u32, alpha: Field, psi_out: u32, fields: &[Field], psi: &[u32])
        -> Result<Rational, Error> {
        let eta = self.cohft.eta();
        let mut total = Rational::zero();
        for mu in 1..=eta.n() as Field {
            let c = eta.upper(alpha, mu);
            if c.is_zero() {
                continue;
            }
            let mut f = fields.to_vec();
            f.push(mu);
            let mut d = psi.to_vec();
            d.push(psi_out);
            total += c * self.cohft.correlator(g, &f, &d)?;
        }
        Ok(total)
    }

    /// Materialize the view as an `fcohft_psi` table for all keys with `g ≤ g_max`,
    /// `1 ≤ n ≤ n_max` inputs. Field 0 of each key is the output component.
    pub fn to_table(&self, g_max: u32, n_max: usize) -> Result<CorrelatorTable, Error> {
        let mut t = CorrelatorTable::new(TableKind::FcohftPsi, self.cohft.eta().clone());
        let nf = self.cohft.n_fields() as Field;
        for g in 0..=g_max {
            for n in 1..=n_max {
                if 2 * g as i64 - 1 + n as i64 <= 0 {
                    continue;
                }
                let dim = 3 * g as i64 - 2 + n as i64;
                for fields in tuples(n + 1, nf) {
                    for psi in compositions_upto(n + 1, dim as u32) {
                        let v = self.correlator(g, fields[0], psi[0], &fields[1..], &psi[1..])?;
                        if !v.is_zero() {
                            t.insert(CorrelatorKey::plain(g, fields.clone(), psi), v)?;
                        }
                    }
                }
                t.declare_complete(g, n + 1);
            }
        }
        Ok(t)
    }
}

fn tuples(len: usize, nf: Field) -> Vec<Vec<Field>> {
    let mut out = alloc::vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=nf).map(move |f| {
                    let mut w = v.clone();
                    w.push(f);
                    w
                })
            })
            .collect();
    }
    out
}

fn compositions_upto(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = alloc::vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=max - used).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}
