use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use super::functional::monomials;
use super::jet::{DiffPoly, Jet, JetMonomial};
use crate::exactnum::Rational;
use crate::Error;

/// Time variable `t^{α,d}` as `(α, d)`.
pub type Time = (u16, u16);

/// Power series in `ε` and the times, exact for `ε`-power ≤ `eps_max` and total
/// t-degree ≤ `tdeg_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    terms: BTreeMap<(u32, Vec<Time>), Rational>,
    eps_max: u32,
    tdeg_max: u32,
}

impl FormalSeries {
    pub fn zero(eps_max: u32, tdeg_max: u32) -> Self {
        FormalSeries { terms: BTreeMap::new(), eps_max, tdeg_max }
    }

    pub fn constant(c: Rational, eps_max: u32, tdeg_max: u32) -> Self {
        let mut s = FormalSeries::zero(eps_max, tdeg_max);
        s.add_term(0, Vec::new(), c);
        s
    }

    pub fn time(t: Time, eps_max: u32, tdeg_max: u32) -> Self {
        let mut s = FormalSeries::zero(eps_max, tdeg_max);
        s.add_term(0, alloc::vec![t], Rational::one());
        s
    }

    pub fn eps_max(&self) -> u32 {
        self.eps_max
    }

    pub fn tdeg_max(&self) -> u32 {
        self.tdeg_max
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, Vec<Time>), &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of `ε^eps ∏ times` (monomial coefficient, not a derivative).
    pub fn coeff(&self, eps: u32, times: &[Time]) -> Rational {
        let mut t = times.to_vec();
        t.sort_unstable();
        self.terms.get(&(eps, t)).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, eps: u32, mut times: Vec<Time>, c: Rational) {
        if c.is_zero() || eps > self.eps_max || times.len() as u32 > self.tdeg_max {
            return;
        }
        times.sort_unstable();
        let e = self.terms.entry((eps, times)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn truncate(&self, eps_max: u32, tdeg_max: u32) -> FormalSeries {
        let eps_max = eps_max.min(self.eps_max);
        let tdeg_max = tdeg_max.min(self.tdeg_max);
        FormalSeries {
            terms: self
                .terms
                .iter()
                .filter(|((e, t), _)| *e <= eps_max && t.len() as u32 <= tdeg_max)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            eps_max,
            tdeg_max,
        }
    }

    pub fn add(&self, other: &FormalSeries) -> FormalSeries {
        let mut out = self.truncate(other.eps_max, other.tdeg_max);
        for ((e, t), c) in &other.terms {
            out.add_term(*e, t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormalSeries) -> FormalSeries {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> FormalSeries {
        let mut out = FormalSeries::zero(self.eps_max, self.tdeg_max);
        for ((e, t), v) in &self.terms {
            out.add_term(*e, t.clone(), v * c);
        }
        out
    }

    /// Multiply by `ε^k` (the known range is unchanged).
    pub fn shift_eps(&self, k: u32) -> FormalSeries {
        let mut out = FormalSeries::zero(self.eps_max, self.tdeg_max);
        for ((e, t), v) in &self.terms {
            out.add_term(e + k, t.clone(), v.clone());
        }
        out
    }

    pub fn mul(&self, other: &FormalSeries) -> FormalSeries {
        let mut out = FormalSeries::zero(self.eps_max.min(other.eps_max), self.tdeg_max.min(other.tdeg_max));
        for ((e1, t1), c1) in &self.terms {
            for ((e2, t2), c2) in &other.terms {
                if e1 + e2 > out.eps_max || (t1.len() + t2.len()) as u32 > out.tdeg_max {
                    continue;
                }
                let mut t = t1.clone();
                t.extend_from_slice(t2);
                out.add_term(e1 + e2, t, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂t`; the exact range drops by one t-degree.
    pub fn derivative(&self, time: Time) -> FormalSeries {
        let mut out = FormalSeries::zero(self.eps_max, self.tdeg_max.saturating_sub(1));
        for ((e, t), c) in &self.terms {
            let k = t.iter().filter(|&&x| x == time).count();
            if k == 0 {
                continue;
            }
            let mut rest = t.clone();
            let i = rest.iter().position(|&x| x == time).unwrap();
            rest.remove(i);
            out.add_term(*e, rest, c * Rational::from(k as u64));
        }
        out
    }

    pub fn derivative_n(&self, time: Time, n: u32) -> FormalSeries {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.derivative(time);
        }
        s
    }

    /// Set every time with `pred(t)` to zero.
    pub fn restrict<F: Fn(Time) -> bool>(&self, pred: F) -> FormalSeries {
        FormalSeries {
            terms: self
                .terms
                .iter()
                .filter(|((_, t), _)| !t.iter().any(|&x| pred(x)))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            eps_max: self.eps_max,
            tdeg_max: self.tdeg_max,
        }
    }

    /// Keep only monomials of level at most `max`.
    pub fn filter_level(&self, max: u32) -> FormalSeries {
        FormalSeries {
            terms: self.terms.iter().filter(|((_, t), _)| level(t) <= max).map(|(k, v)| (k.clone(), v.clone())).collect(),
            eps_max: self.eps_max,
            tdeg_max: self.tdeg_max,
        }
    }

    pub fn eps_part(&self, e: u32) -> FormalSeries {
        FormalSeries {
            terms: self.terms.iter().filter(|((x, _), _)| *x == e).map(|(k, v)| (k.clone(), v.clone())).collect(),
            eps_max: self.eps_max,
            tdeg_max: self.tdeg_max,
        }
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (i, ((e, t), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            let _ = write!(s, "{c}");
            if *e > 0 {
                let _ = write!(s, "*eps^{e}");
            }
            for x in t {
                let _ = write!(s, "*t[{},{}]", x.0, x.1);
            }
        }
        f.write_str(&s)
    }
}

/// Descendant level `Σ d` of a time monomial.
pub fn level(times: &[Time]) -> u32 {
    times.iter().map(|&(_, d)| d as u32).sum()
}

struct JetSource<'a> {
    sol: &'a [FormalSeries],
    jets: BTreeMap<Jet, FormalSeries>,
    products: BTreeMap<Vec<Jet>, FormalSeries>,
}

impl<'a> JetSource<'a> {
    fn new(sol: &'a [FormalSeries]) -> Self {
        JetSource { sol, jets: BTreeMap::new(), products: BTreeMap::new() }
    }

    fn jet(&mut self, j: Jet) -> Result<FormalSeries, Error> {
        if let Some(s) = self.jets.get(&j) {
            return Ok(s.clone());
        }
        let base = self
            .sol
            .get(j.0 as usize - 1)
            .ok_or_else(|| Error::InvalidArgument(format!("no solution component for field {}", j.0)))?;
        if j.1 as u32 > base.tdeg_max() {
            return Err(Error::TruncationOverflow(format!(
                "w[{},{}] needs {} t-derivatives, solution is known to t-degree {}",
                j.0,
                j.1,
                j.1,
                base.tdeg_max()
            )));
        }
        let s = base.derivative_n((1, 0), j.1 as u32);
        self.jets.insert(j, s.clone());
        Ok(s)
    }

    fn product(&mut self, factors: &[Jet]) -> Result<FormalSeries, Error> {
        if let Some(s) = self.products.get(factors) {
            return Ok(s.clone());
        }
        let s = match factors.split_last() {
            None => {
                let e = self.sol.iter().map(|s| s.eps_max()).min().unwrap_or(0);
                let t = self.sol.iter().map(|s| s.tdeg_max()).min().unwrap_or(0);
                FormalSeries::constant(Rational::one(), e, t)
            }
            Some((last, init)) => self.product(init)?.mul(&self.jet(*last)?),
        };
        self.products.insert(factors.to_vec(), s.clone());
        Ok(s)
    }
}

/// Evaluate `p` along a solution, `w^{γ,q} = ∂^q_{t^{1,0}} sol[γ−1]`.
pub fn substitute_solution(p: &DiffPoly, sol: &[FormalSeries]) -> Result<FormalSeries, Error> {
    let mut src = JetSource::new(sol);
    substitute_with(p, &mut src)
}

fn substitute_with(p: &DiffPoly, src: &mut JetSource<'_>) -> Result<FormalSeries, Error> {
    let e = src.sol.iter().map(|s| s.eps_max()).min().unwrap_or(0).min(p.eps_max());
    let t = src.sol.iter().map(|s| s.tdeg_max()).min().unwrap_or(0);
    let mut out = FormalSeries::zero(e, t);
    for (m, c) in p.terms() {
        if m.eps > e {
            continue;
        }
        let prod = src.product(&m.factors)?;
        out = out.add(&prod.shift_eps(m.eps).scale(c));
    }
    Ok(out)
}

/// Options for [`match_diffpoly`].
#[derive(Clone, Copy, Debug)]
pub struct MatchOptions {
    /// Target `deg_∂x` of the result.
    pub grading: i64,
    /// Number of dependent variables.
    pub n_fields: u16,
    /// Largest number of jet factors in a candidate monomial.
    pub max_factors: usize,
    /// Also require agreement on every coefficient in the exact window, not only those with
    /// `level ≤ ε-power + grading`.
    pub full: bool,
}

/// The unique differential polynomial of the given grading whose substitution along `sol`
/// reproduces `series` on all coefficients `ε^{e} ∏t` with `level ≤ e + grading`.
pub fn match_diffpoly(series: &FormalSeries, sol: &[FormalSeries], opts: MatchOptions) -> Result<DiffPoly, Error> {
    let mut src = JetSource::new(sol);
    let eps_bound = series.eps_max().min(sol.iter().map(|s| s.eps_max()).min().unwrap_or(0));
    let tdeg_bound = series.tdeg_max().min(sol.iter().map(|s| s.tdeg_max()).min().unwrap_or(0));
    let mut candidates: Vec<JetMonomial> = Vec::new();
    for e in (0..=eps_bound).step_by(2) {
        let order = e as i64 + opts.grading;
        if order < 0 {
            continue;
        }
        for r in 0..=opts.max_factors {
            for fields in multisets(opts.n_fields, r) {
                for f in monomials(&fields, order as u32) {
                    if f.iter().all(|j| j.1 as u32 <= tdeg_bound) {
                        candidates.push(JetMonomial { eps: e, factors: f });
                    }
                }
            }
        }
    }
    let mut columns: Vec<FormalSeries> = Vec::with_capacity(candidates.len());
    for m in &candidates {
        let p = DiffPoly::monomial(m.clone(), Rational::one(), eps_bound);
        columns.push(substitute_with(&p, &mut src)?.truncate(eps_bound, tdeg_bound));
    }
    let series = series.truncate(eps_bound, tdeg_bound);
    let in_window = |e: u32, t: &[Time]| level(t) as i64 <= e as i64 + opts.grading;

    let mut rows: BTreeMap<(u32, Vec<Time>), (BTreeMap<usize, Rational>, Rational)> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for ((e, t), c) in col.terms() {
            if in_window(*e, t) {
                rows.entry((*e, t.clone())).or_default().0.insert(j, c.clone());
            }
        }
    }
    for ((e, t), c) in series.terms() {
        if in_window(*e, t) {
            rows.entry((*e, t.clone())).or_default().1 = c.clone();
        }
    }
    let solution = solve(rows, candidates.len())?;
    let mut out = DiffPoly::zero(eps_bound);
    for (j, c) in solution.into_iter().enumerate() {
        out.add_term(candidates[j].clone(), c);
    }
    let check = substitute_with(&out, &mut src)?.truncate(eps_bound, tdeg_bound);
    let diff = check.sub(&series);
    let residual: Vec<String> = diff
        .terms()
        .filter(|((e, t), _)| opts.full || in_window(*e, t))
        .map(|((e, t), c)| format!("eps^{e} {t:?}: {c}"))
        .collect();
    if residual.is_empty() {
        Ok(out)
    } else {
        Err(Error::NoMatch { residual })
    }
}

fn multisets(n: u16, r: usize) -> Vec<Vec<u16>> {
    fn go(n: u16, r: usize, min: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if r == 0 {
            out.push(cur.clone());
            return;
        }
        for a in min..=n {
            cur.push(a);
            go(n, r - 1, a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, r, 1, &mut Vec::new(), &mut out);
    out
}

type Row = (BTreeMap<usize, Rational>, Rational);

/// Exact sparse elimination; every unknown must be pinned down.
fn solve(rows: BTreeMap<(u32, Vec<Time>), Row>, n: usize) -> Result<Vec<Rational>, Error> {
    let mut pivots: BTreeMap<usize, Row> = BTreeMap::new();
    let mut residual = Vec::new();
    for (key, (mut coeffs, mut rhs)) in rows {
        loop {
            let Some((&j, _)) = coeffs.iter().find(|(j, _)| pivots.contains_key(j)) else { break };
            let c = coeffs.remove(&j).unwrap();
            let (prow, prhs) = &pivots[&j];
            for (k, v) in prow {
                let e = coeffs.entry(*k).or_default();
                *e -= &c * v;
                if e.is_zero() {
                    coeffs.remove(k);
                }
            }
            rhs -= &c * prhs;
        }
        match coeffs.iter().next().map(|(&j, c)| (j, c.clone())) {
            None => {
                if !rhs.is_zero() {
                    residual.push(format!("eps^{} {:?}: {}", key.0, key.1, rhs));
                }
            }
            Some((j, c)) => {
                coeffs.remove(&j);
                let inv = c.recip();
                let row: BTreeMap<usize, Rational> = coeffs.into_iter().map(|(k, v)| (k, v * &inv)).collect();
                let rhs = rhs * &inv;
                // keep earlier pivot rows free of the new pivot
                for (prow, prhs) in pivots.values_mut() {
                    if let Some(f) = prow.remove(&j) {
                        for (k, v) in &row {
                            let e = prow.entry(*k).or_default();
                            *e -= &f * v;
                            if e.is_zero() {
                                prow.remove(k);
                            }
                        }
                        *prhs -= &f * &rhs;
                    }
                }
                pivots.insert(j, (row, rhs));
            }
        }
    }
    if !residual.is_empty() {
        return Err(Error::NoMatch { residual });
    }
    if pivots.len() < n {
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains_key(j)).collect();
        return Err(Error::Underdetermined(format!("{} undetermined coefficients (candidates {free:?})", free.len())));
    }
    let mut x = alloc::vec![Rational::zero(); n];
    for (j, (row, rhs)) in pivots {
        debug_assert!(row.is_empty());
        x[j] = rhs;
    }
    Ok(x)
}
