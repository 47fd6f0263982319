use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use spin::Mutex;

use super::tau::{symmetry_factor, TauData};
use crate::correlators::{dr_correlator, Cohft, CorrelatorTable, Field};
use crate::diffpoly::{evolve, match_diffpoly, DiffPoly, JetMonomial, MatchOptions, MetricEta, MiuraMap};
use crate::exactnum::{MultiPoly, Rational};
use crate::par::try_map;
use crate::trees::{integrate_b, Context, Insertions};
use crate::Error;

/// Fluxes `R^α_{β,p}` (one `DiffPoly` per `α`) keyed by `(β, p)`.
pub type FluxSet = BTreeMap<(Field, u32), Vec<DiffPoly>>;

/// Sorted field multisets of size `n`.
pub(crate) fn field_multisets(n_fields: usize, n: usize) -> Vec<Vec<Field>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in out {
            let lo = v.last().copied().unwrap_or(1);
            for a in lo..=n_fields as Field {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in 0..=total {
        for mut rest in compositions(n - 1, total - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

fn jet_monomial(eps: u32, fields: &[Field], q: &[u32]) -> JetMonomial {
    JetMonomial::new(eps, fields.iter().zip(q).map(|(&a, &d)| (a, d as u16)).collect())
}

/// Point counts `n ≥ n_min` for which a class of Chow degree `chow` on `M̄_{g,n+fixed}` can pair
/// nontrivially with the CohFT.
pub(crate) fn point_range(cohft: &dyn Cohft, g: u32, fixed: usize, chow: i64, n_min: usize, max_points: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for n in n_min..=max_points {
        let total = n + fixed;
        if 2 * g as i64 - 2 + total as i64 <= 0 {
            continue;
        }
        let excess = 3 * g as i64 - 3 + total as i64 - chow;
        if excess < 0 {
            continue;
        }
        match cohft.degree_bound(g, total) {
            Some(d) if excess > d as i64 => break,
            _ => out.push(n),
        }
    }
    out
}

/// Builds fluxes, Hamiltonians and Miura maps of an observable hierarchy from the
/// integrated tree classes. Integrated `B^m` are cached per insertion.
pub struct FluxBuilder<'a> {
    pub ctx: Context<'a>,
    pub eps_max: u32,
    /// Cap on the number of points when the CohFT declares no degree bound.
    pub max_points: usize,
    cache: Mutex<BTreeMap<(u32, usize, usize, Vec<Field>), Arc<MultiPoly>>>,
}

impl<'a> FluxBuilder<'a> {
    pub fn new(ctx: Context<'a>, eps_max: u32) -> Self {
        FluxBuilder { ctx, eps_max, max_points: 8, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn with_max_points(mut self, k: usize) -> Self {
        self.max_points = k;
        self
    }

    fn n_fields(&self) -> usize {
        self.ctx.cohft.n_fields()
    }

    fn eta(&self) -> &MetricEta {
        self.ctx.cohft.eta()
    }

    fn b(&self, g: u32, n: usize, m: usize, fields: Vec<Field>) -> Result<Arc<MultiPoly>, Error> {
        let key = (g, n, m, fields);
        if let Some(p) = self.cache.lock().get(&key) {
            return Ok(p.clone());
        }
        let ins = Insertions { probe: vec![0; key.3.len()], fields: key.3.clone() };
        let p = Arc::new(integrate_b(&self.ctx, g, n, m, &ins)?);
        self.cache.lock().insert(key, p.clone());
        Ok(p)
    }

    /// Generic cell sum: `Σ_{g,n,γ} ε^{2g}/∏mult! Σ_q ∏w^{γ_i,q_i} · coeff(g, n, γ, q)`.
    fn cell_sum<F>(&self, fixed: usize, chow: impl Fn(u32) -> i64, n_min: usize, f: F) -> Result<DiffPoly, Error>
    where
        F: Fn(u32, usize, &[Field]) -> Result<Vec<(JetMonomial, Rational)>, Error> + Sync + Send,
    {
        let mut cells = Vec::new();
        for g in 0..=self.eps_max / 2 {
            let c = chow(g);
            if c < 0 {
                continue;
            }
            for n in point_range(self.ctx.cohft, g, fixed, c, n_min, self.max_points) {
                for gamma in field_multisets(self.n_fields(), n) {
                    cells.push((g, n, gamma));
                }
            }
        }
        let parts = try_map(&cells, |(g, n, gamma)| {
            let w = symmetry_factor(gamma);
            Ok(f(*g, *n, gamma)?.into_iter().map(|(m, c)| (m, c * &w)).collect::<Vec<_>>())
        })?;
        let mut out = DiffPoly::zero(self.eps_max);
        for part in parts {
            for (m, c) in part {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// `R^α_{β,p}` for all `α`, from `Coeff_{b_1^p b_2^0}` of integrated `B²`.
    pub fn flux(&self, beta: Field, p: u32) -> Result<Vec<DiffPoly>, Error> {
        let nf = self.n_fields();
        let eta = self.eta().clone();
        (1..=nf as Field)
            .map(|alpha| {
                self.cell_sum(2, |g| 2 * g as i64 + p as i64, 1, |g, n, gamma| {
                    let mut out = Vec::new();
                    for mu in 1..=nf as Field {
                        let c = eta.upper(alpha, mu).clone();
                        if c.is_zero() {
                            continue;
                        }
                        let mut fields = gamma.to_vec();
                        fields.push(beta);
                        fields.push(mu);
                        let b = self.b(g, n, 2, fields)?;
                        for (e, v) in b.terms() {
                            if e[n] == p && e[n + 1] == 0 && e[..n].iter().sum::<u32>() == 2 * g {
                                out.push((jet_monomial(2 * g, gamma, &e[..n]), v * &c));
                            }
                        }
                    }
                    Ok(out)
                })
            })
            .collect()
    }

    /// Hamiltonian density `h_{β,p}` from `Coeff_{b_1^{p+1} b_2^0}` of integrated `B²`.
    pub fn hamiltonian(&self, beta: Field, p: u32) -> Result<DiffPoly, Error> {
        self.cell_sum(2, |g| 2 * g as i64 + p as i64 + 1, 1, |g, n, gamma| {
            let mut fields = gamma.to_vec();
            fields.push(beta);
            fields.push(1);
            let b = self.b(g, n, 2, fields)?;
            let mut out = Vec::new();
            for (e, v) in b.terms() {
                if e[n] == p + 1 && e[n + 1] == 0 && e[..n].iter().sum::<u32>() == 2 * g {
                    out.push((jet_monomial(2 * g, gamma, &e[..n]), v.clone()));
                }
            }
            Ok(out)
        })
    }

    /// `R^α` of the Miura map `u^α = w^α − ∂_x R^α` to the DR hierarchy, from `Coeff_{b_1^0}` of `B¹`.
    pub fn miura_potential(&self) -> Result<Vec<DiffPoly>, Error> {
        let nf = self.n_fields();
        let eta = self.eta().clone();
        (1..=nf as Field)
            .map(|alpha| {
                self.cell_sum(1, |g| 2 * g as i64 - 1, 1, |g, n, gamma| {
                    let mut out = Vec::new();
                    for mu in 1..=nf as Field {
                        let c = eta.upper(alpha, mu).clone();
                        if c.is_zero() {
                            continue;
                        }
                        let mut fields = gamma.to_vec();
                        fields.push(mu);
                        let b = self.b(g, n, 1, fields)?;
                        for (e, v) in b.terms() {
                            if e[n] == 0 && e[..n].iter().sum::<u32>() as i64 == 2 * g as i64 - 1 {
                                out.push((jet_monomial(2 * g, gamma, &e[..n]), v * &c));
                            }
                        }
                    }
                    Ok(out)
                })
            })
            .collect()
    }

    /// Miura map from the observable hierarchy (variables `w`) to the DR hierarchy (`u`).
    pub fn miura_to_dr(&self) -> Result<MiuraMap, Error> {
        let r = self.miura_potential()?;
        let targets =
            r.iter().enumerate().map(|(i, ra)| DiffPoly::jet(i as Field + 1, 0, self.eps_max).sub(&ra.d_x())).collect();
        MiuraMap::second_kind(targets)
    }

    /// Generator `R = Σ ε^{2g}/n! ∏w ∫ Coeff_{a^q} B⁰ pc` with `Σq = 2g − 2`.
    pub fn normal_generator(&self) -> Result<DiffPoly, Error> {
        self.cell_sum(0, |g| 2 * g as i64 - 2, 1, |g, n, gamma| {
            let b = self.b(g, n, 0, gamma.to_vec())?;
            let mut out = Vec::new();
            for (e, v) in b.terms() {
                if e.iter().sum::<u32>() as i64 == 2 * g as i64 - 2 {
                    out.push((jet_monomial(2 * g, gamma, e), v.clone()));
                }
            }
            Ok(out)
        })
    }

    /// Normal Miura map `u_norm^α = w^α − η^{αμ} ∂_x(∂_{w^{ζ,k}}R · ∂_x^{k+1} R^ζ_{μ,0})`.
    pub fn normal_miura(&self) -> Result<MiuraMap, Error> {
        let g = self.normal_generator()?;
        let nf = self.n_fields();
        let mut flux_mu0 = Vec::with_capacity(nf);
        for mu in 1..=nf as Field {
            flux_mu0.push(self.flux(mu, 0)?);
        }
        MiuraMap::normal(g.neg(), self.eta(), &flux_mu0)
    }

    /// Fluxes for `β ≤ N`, `p ≤ p_max`. With `tau`, the series route is run as well and any
    /// disagreement is an error.
    pub fn flux_set(&self, p_max: u32, tau: Option<&TauData>) -> Result<FluxSet, Error> {
        let mut out = FluxSet::new();
        for beta in 1..=self.n_fields() as Field {
            for p in 0..=p_max {
                let direct = self.flux(beta, p)?;
                if let Some(t) = tau {
                    let matched = flux_from_series(t, self.eta(), beta, p, p as usize + 2)?;
                    for (a, (x, y)) in direct.iter().zip(&matched).enumerate() {
                        let e = x.eps_max().min(y.eps_max());
                        if x.truncate(e) != y.truncate(e) {
                            return Err(Error::Inconsistent(format!(
                                "flux R^{}_({beta},{p}): tree assembly gives {x}, series matching gives {y}",
                                a + 1
                            )));
                        }
                    }
                }
                out.insert((beta, p), direct);
            }
        }
        Ok(out)
    }
}

/// Fluxes recovered from the tau function: the differential polynomials that reproduce
/// `η^{αμ}∂_{t^{β,p}}∂_{t^{μ,0}}F` along `w_top`.
pub fn flux_from_series(tau: &TauData, eta: &MetricEta, beta: Field, p: u32, max_factors: usize) -> Result<Vec<DiffPoly>, Error> {
    if tau.bounds.level_max < tau.bounds.eps_max + p {
        return Err(Error::TruncationOverflow(format!(
            "series matching for p = {p} needs level {} but the tau function stops at {}",
            tau.bounds.eps_max + p,
            tau.bounds.level_max
        )));
    }
    let opts = MatchOptions { grading: 0, n_fields: tau.n_fields as u16, max_factors, full: false };
    tau.flux_series(eta, beta, p).iter().map(|s| match_diffpoly(s, &tau.w_top, opts)).collect()
}

/// DR fluxes `Q^α_{β,p}` (in the DR variables `u`). Genus 0 is built in; higher genus reads
/// `λ_g DR_g` integrals from a `dr_D` table through the D-class coefficient of a-degree `2g`.
pub fn dr_flux(
    cohft: &dyn Cohft,
    table: Option<&CorrelatorTable>,
    beta: Field,
    p: u32,
    eps_max: u32,
    max_points: usize,
) -> Result<Vec<DiffPoly>, Error> {
    let nf = cohft.n_fields();
    let eta = cohft.eta();
    let mut out = vec![DiffPoly::zero(eps_max); nf];
    for g in 0..=eps_max / 2 {
        for n in point_range(cohft, g, 2, 2 * g as i64 + p as i64, 0, max_points) {
            if 2 * g + (n as u32) == 0 {
                continue;
            }
            for gamma in field_multisets(nf, n) {
                let w = symmetry_factor(&gamma);
                for q in compositions(n, 2 * g) {
                    let mono = jet_monomial(2 * g, &gamma, &q);
                    let mut mon = vec![0u32];
                    mon.extend_from_slice(&q);
                    for mu in 1..=nf as Field {
                        let mut fields = vec![beta];
                        fields.extend_from_slice(&gamma);
                        fields.push(mu);
                        let mut psi = vec![0u32; n + 2];
                        psi[0] = p;
                        let mut v: Option<Rational> = None;
                        for alpha in 1..=nf as Field {
                            let c = eta.upper(alpha, mu);
                            if c.is_zero() {
                                continue;
                            }
                            let val = match &v {
                                Some(x) => x.clone(),
                                None => {
                                    let x = -dr_correlator(cohft, g, &fields, &psi, &mon, table)?;
                                    v = Some(x.clone());
                                    x
                                }
                            };
                            out[alpha as usize - 1].add_term(mono.clone(), val * c * &w);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// DR Hamiltonian density `h_{β,p} = η_{1μ} Q^μ_{β,p+1}`.
pub fn dr_hamiltonian(
    cohft: &dyn Cohft,
    table: Option<&CorrelatorTable>,
    beta: Field,
    p: u32,
    eps_max: u32,
    max_points: usize,
) -> Result<DiffPoly, Error> {
    let q = dr_flux(cohft, table, beta, p + 1, eps_max, max_points)?;
    let mut h = DiffPoly::zero(eps_max);
    for (mu, qm) in q.iter().enumerate() {
        h.add_scaled(qm, cohft.eta().lower(1, mu as Field + 1));
    }
    Ok(h)
}

/// Result of checking `∂_t R' = ∂_{t'} R` for one pair of flows.
#[derive(Clone, Debug)]
pub struct CommutationEntry {
    pub first: (Field, u32),
    pub second: (Field, u32),
    pub commute: bool,
    /// Per component `α`: `∂_{t}R'^α − ∂_{t'}R^α`, truncated.
    pub residual: Vec<DiffPoly>,
}

impl CommutationEntry {
    pub fn describe(&self) -> String {
        format!(
            "({},{}) vs ({},{}): {}",
            self.first.0,
            self.first.1,
            self.second.0,
            self.second.1,
            if self.commute { "commute" } else { "do not commute" }
        )
    }
}

/// Compatibility of the flows `∂_{t^{β,p}} w^α = ∂_x R^α_{β,p}` for each pair, up to `ε^{eps}`.
pub fn check_commutation(fluxes: &FluxSet, pairs: &[((Field, u32), (Field, u32))], eps: u32) -> Result<Vec<CommutationEntry>, Error> {
    let mut out = Vec::new();
    for &(a, b) in pairs {
        let fa = fluxes.get(&a).ok_or_else(|| Error::MissingKey(format!("flux ({},{})", a.0, a.1)))?;
        let fb = fluxes.get(&b).ok_or_else(|| Error::MissingKey(format!("flux ({},{})", b.0, b.1)))?;
        let fa: Vec<DiffPoly> = fa.iter().map(|x| x.truncate(eps)).collect();
        let fb: Vec<DiffPoly> = fb.iter().map(|x| x.truncate(eps)).collect();
        let residual: Vec<DiffPoly> =
            fa.iter().zip(&fb).map(|(ra, rb)| evolve(rb, &fa).sub(&evolve(ra, &fb)).truncate(eps)).collect();
        let commute = residual.iter().all(DiffPoly::is_zero);
        out.push(CommutationEntry { first: a, second: b, commute, residual });
    }
    Ok(out)
}
