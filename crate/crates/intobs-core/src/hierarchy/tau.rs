use alloc::vec;
use alloc::vec::Vec;

use crate::correlators::{Cohft, CorrelatorTable, Field, Observable, TableKind};
use crate::diffpoly::{FormalSeries, Time};
use crate::exactnum::{factorial, Rational};
use crate::par::try_map;
use crate::Error;

/// Bounds for generating functions: `ε^{eps_max}`, descendant level `Σd ≤ level_max`, and
/// at most `max_points` insertions when the CohFT declares no degree bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesBounds {
    pub eps_max: u32,
    pub level_max: u32,
    pub max_points: usize,
}

impl SeriesBounds {
    pub fn new(eps_max: u32, level_max: u32) -> Self {
        SeriesBounds { eps_max, level_max, max_points: level_max as usize + 4 }
    }
}

/// Generating functions of one observable against one CohFT.
#[derive(Clone, Debug)]
pub struct TauData {
    pub n_fields: usize,
    pub bounds: SeriesBounds,
    /// `F = Σ ε^{2g} F_g`, exact for level `≤ level_max`.
    pub f: FormalSeries,
    /// `w_top^α = η^{αμ} ∂_{t^{1,0}} ∂_{t^{μ,0}} F`.
    pub w_top: Vec<FormalSeries>,
}

/// Multisets of `n` times with level at most `level_max`.
pub(crate) fn time_multisets(n_fields: usize, n: usize, level_max: u32) -> Vec<Vec<Time>> {
    let mut times = Vec::new();
    for d in 0..=level_max as u16 {
        for a in 1..=n_fields as u16 {
            times.push((a, d));
        }
    }
    times.sort_unstable();
    let mut out = Vec::new();
    fn go(times: &[Time], start: usize, left: usize, budget: u32, cur: &mut Vec<Time>, out: &mut Vec<Vec<Time>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..times.len() {
            if times[i].1 as u32 > budget {
                continue;
            }
            cur.push(times[i]);
            go(times, i, left - 1, budget - times[i].1 as u32, cur, out);
            cur.pop();
        }
    }
    go(&times, 0, n, level_max, &mut Vec::new(), &mut out);
    out
}

/// `1 / ∏ mult!` for a sorted list.
pub(crate) fn symmetry_factor<T: PartialEq>(sorted: &[T]) -> Rational {
    let mut denom = num_bigint::BigInt::from(1);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        denom *= factorial((j - i) as u32);
        i = j;
    }
    Rational::from_big(num_bigint::BigInt::from(1), denom)
}

/// Largest number of points worth summing at genus `g` for a class of a-degree `level`
/// plus `extra` fixed Chow degree on `M̄_{g,n+fixed}`.
fn points_range(cohft: &dyn Cohft, g: u32, fixed: usize, base: i64, bounds: &SeriesBounds) -> usize {
    // dim − deg = 3g − 3 + n + fixed − base must not exceed the CohFT degree bound
    let mut top = 0usize;
    for n in 0..=bounds.max_points {
        let total = n + fixed;
        if 2 * g as i64 - 2 + total as i64 <= 0 {
            continue;
        }
        let excess = 3 * g as i64 - 3 + total as i64 - base;
        match cohft.degree_bound(g, total) {
            Some(d) if excess > d as i64 => break,
            _ => top = n,
        }
    }
    top
}

impl TauData {
    /// `F = Σ ε^{2g}/n! ∫ pc(⊗e_{α_i}) Coeff_{∏a_i^{d_i}} O_{g,n}(a) ∏t^{α_i,d_i}`.
    pub fn build(obs: &dyn Observable, cohft: &dyn Cohft, bounds: SeriesBounds) -> Result<TauData, Error> {
        let nf = cohft.n_fields();
        let tdeg = bounds.max_points as u32;
        let mut cells: Vec<(u32, Vec<Time>)> = Vec::new();
        for g in 0..=bounds.eps_max / 2 {
            let top = points_range(cohft, g, 0, bounds.level_max as i64, &bounds);
            for n in 1..=top {
                if 2 * g as i64 - 2 + n as i64 <= 0 {
                    continue;
                }
                for ts in time_multisets(nf, n, bounds.level_max) {
                    cells.push((g, ts));
                }
            }
        }
        let values = try_map(&cells, |(g, ts)| {
            let fields: Vec<Field> = ts.iter().map(|t| t.0).collect();
            let exps: Vec<u32> = ts.iter().map(|t| t.1 as u32).collect();
            let v = obs.integrate(cohft, *g, &fields, &exps, &vec![0; ts.len()])?;
            Ok(v * symmetry_factor(ts))
        })?;
        let mut f = FormalSeries::zero(bounds.eps_max, tdeg);
        for ((g, ts), v) in cells.into_iter().zip(values) {
            f.add_term(2 * g, ts, v);
        }
        let eta = cohft.eta();
        let d1 = f.derivative((1, 0));
        let mut w_top = Vec::with_capacity(nf);
        for a in 1..=nf as Field {
            let mut w = FormalSeries::zero(bounds.eps_max, tdeg.saturating_sub(2));
            for mu in 1..=nf as Field {
                let c = eta.upper(a, mu);
                if !c.is_zero() {
                    w = w.add(&d1.derivative((mu, 0)).scale(c));
                }
            }
            w_top.push(w);
        }
        Ok(TauData { n_fields: nf, bounds, f, w_top })
    }

    /// `η^{αμ} ∂_{t^{β,p}} ∂_{t^{μ,0}} F` for every `α`.
    pub fn flux_series(&self, eta: &crate::diffpoly::MetricEta, beta: Field, p: u32) -> Vec<FormalSeries> {
        let d = self.f.derivative((beta, p as u16));
        (1..=self.n_fields as Field)
            .map(|a| {
                let mut s = FormalSeries::zero(self.f.eps_max(), self.f.tdeg_max().saturating_sub(2));
                for mu in 1..=self.n_fields as Field {
                    let c = eta.upper(a, mu);
                    if !c.is_zero() {
                        s = s.add(&d.derivative((mu, 0)).scale(c));
                    }
                }
                s
            })
            .collect()
    }

    /// `∂_{t^{1,0}}F − ½η_{αβ}t^{α,0}t^{β,0} − Σ t^{α,k+1}∂_{t^{α,k}}F` on the exact range.
    pub fn string_residual(&self, eta: &crate::diffpoly::MetricEta) -> FormalSeries {
        let (e, t) = (self.f.eps_max(), self.f.tdeg_max().saturating_sub(1));
        let mut rhs = FormalSeries::zero(e, t);
        for a in 1..=self.n_fields as Field {
            for b in 1..=self.n_fields as Field {
                let c = eta.lower(a, b) * Rational::new(1, 2);
                rhs.add_term(0, vec![(a, 0), (b, 0)], c);
            }
        }
        rhs = rhs.add(&self.shifted_euler(1));
        self.f.derivative((1, 0)).sub(&rhs).truncate(e, t).filter_level(self.bounds.level_max)
    }

    /// `∂_{t^{1,1}}F − Σ_g (2g−2) ε^{2g}F_g − Σ t^{α,k}∂_{t^{α,k}}F`, constant term dropped.
    pub fn dilaton_residual(&self) -> FormalSeries {
        let (e, t) = (self.f.eps_max(), self.f.tdeg_max().saturating_sub(1));
        let mut rhs = self.shifted_euler(0);
        for ((eps, ts), c) in self.f.terms() {
            let w = Rational::from(*eps as i64 - 2);
            rhs.add_term(*eps, ts.clone(), c * w);
        }
        let mut out = self.f.derivative((1, 1)).sub(&rhs).truncate(e, t);
        for eps in (0..=e).step_by(2) {
            let c = out.coeff(eps, &[]);
            out.add_term(eps, Vec::new(), -c);
        }
        out.filter_level(self.bounds.level_max.saturating_sub(1))
    }

    /// `Σ t^{α,k+shift} ∂_{t^{α,k}} F`.
    fn shifted_euler(&self, shift: u16) -> FormalSeries {
        let mut out = FormalSeries::zero(self.f.eps_max(), self.f.tdeg_max());
        for ((eps, ts), c) in self.f.terms() {
            for (i, t) in ts.iter().enumerate() {
                if i > 0 && ts[i - 1] == *t {
                    continue;
                }
                let k = ts.iter().filter(|x| *x == t).count();
                let mut rest = ts.clone();
                rest.remove(i);
                rest.push((t.0, t.1 + shift));
                out.add_term(*eps, rest, c * Rational::from(k as u64));
            }
        }
        out
    }
}

/// Vector potential `X^α = Σ ε^{2g}/n! ∫ e^α(fc(⊗e_{γ_i})) ∏ψ_i^{d_i} ∏t^{γ_i,d_i}` read from an
/// `fcohft_psi` table (the Ψ observable; field 0 of a key is the output).
pub fn vector_potential_table(table: &CorrelatorTable, bounds: SeriesBounds) -> Result<Vec<FormalSeries>, Error> {
    if table.kind() != TableKind::FcohftPsi {
        return Err(Error::InvalidArgument("vector potential needs an fcohft_psi table".into()));
    }
    let nf = table.n_fields();
    let tdeg = bounds.max_points as u32;
    let mut out = vec![FormalSeries::zero(bounds.eps_max, tdeg); nf];
    for g in 0..=bounds.eps_max / 2 {
        for n in 1..=bounds.max_points {
            if 2 * g as i64 - 1 + n as i64 <= 0 {
                continue;
            }
            let dim = 3 * g as i64 - 2 + n as i64;
            for ts in time_multisets(nf, n, bounds.level_max) {
                if crate::diffpoly::level(&ts) as i64 > dim {
                    continue;
                }
                let w = symmetry_factor(&ts);
                for a in 1..=nf as Field {
                    let mut fields = vec![a];
                    fields.extend(ts.iter().map(|t| t.0));
                    let mut psi = vec![0u32];
                    psi.extend(ts.iter().map(|t| t.1 as u32));
                    let key = crate::correlators::CorrelatorKey::plain(g, fields, psi);
                    let v = table.lookup(&key)?;
                    out[a as usize - 1].add_term(2 * g, ts.clone(), v * &w);
                }
            }
        }
    }
    Ok(out)
}

/// Vector potential of the F-CohFT canonically attached to `cohft`, for any observable:
/// `X^α = Σ ε^{2g}/n! η^{αμ} ∫ pc(⊗e_{γ_i} ⊗ e_μ) Coeff_{∏a_i^{d_i}} O_{g,n+1}(a, 0) ∏t`.
pub fn vector_potential(obs: &dyn Observable, cohft: &dyn Cohft, bounds: SeriesBounds) -> Result<Vec<FormalSeries>, Error> {
    let nf = cohft.n_fields();
    let tdeg = bounds.max_points as u32;
    let eta = cohft.eta();
    let mut out = vec![FormalSeries::zero(bounds.eps_max, tdeg); nf];
    for g in 0..=bounds.eps_max / 2 {
        let top = points_range(cohft, g, 1, bounds.level_max as i64, &bounds);
        for n in 1..=top {
            if 2 * g as i64 - 1 + n as i64 <= 0 {
                continue;
            }
            for ts in time_multisets(nf, n, bounds.level_max) {
                let w = symmetry_factor(&ts);
                let mut exps: Vec<u32> = ts.iter().map(|t| t.1 as u32).collect();
                exps.push(0);
                for mu in 1..=nf as Field {
                    let mut fields: Vec<Field> = ts.iter().map(|t| t.0).collect();
                    fields.push(mu);
                    let v = obs.integrate(cohft, g, &fields, &exps, &vec![0; n + 1])?;
                    if v.is_zero() {
                        continue;
                    }
                    for a in 1..=nf as Field {
                        let c = eta.upper(a, mu);
                        if !c.is_zero() {
                            out[a as usize - 1].add_term(2 * g, ts.clone(), &v * c * &w);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
