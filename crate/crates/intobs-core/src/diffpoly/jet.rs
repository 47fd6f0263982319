use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::exactnum::Rational;

/// Jet variable `w^{α,d}` as `(α, d)` with 1-based `α`.
pub type Jet = (u16, u16);

/// `ε^eps ∏ w^{α_i,d_i}`, factors sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct JetMonomial {
    pub eps: u32,
    pub factors: Vec<Jet>,
}

impl JetMonomial {
    pub fn new(eps: u32, mut factors: Vec<Jet>) -> Self {
        factors.sort_unstable();
        JetMonomial { eps, factors }
    }

    pub fn one() -> Self {
        JetMonomial::default()
    }

    /// `Σ d − eps`.
    pub fn deg_dx(&self) -> i64 {
        self.factors.iter().map(|&(_, d)| d as i64).sum::<i64>() - self.eps as i64
    }

    /// `Σ d`.
    pub fn jet_order(&self) -> u32 {
        self.factors.iter().map(|&(_, d)| d as u32).sum()
    }

    pub fn mul(&self, other: &JetMonomial) -> JetMonomial {
        let mut f = Vec::with_capacity(self.factors.len() + other.factors.len());
        f.extend_from_slice(&self.factors);
        f.extend_from_slice(&other.factors);
        JetMonomial::new(self.eps + other.eps, f)
    }

    /// Multiplicity of `jet`.
    pub fn power_of(&self, jet: Jet) -> usize {
        self.factors.iter().filter(|&&j| j == jet).count()
    }

    /// Remove one copy of `jet`.
    pub fn without(&self, jet: Jet) -> Option<JetMonomial> {
        let i = self.factors.iter().position(|&j| j == jet)?;
        let mut f = self.factors.clone();
        f.remove(i);
        Some(JetMonomial { eps: self.eps, factors: f })
    }

    /// Sorted field indices of the factors.
    pub fn field_multiset(&self) -> Vec<u16> {
        self.factors.iter().map(|&(a, _)| a).collect()
    }

    fn render(&self, prefix: &str, out: &mut String) {
        let mut parts: Vec<String> = Vec::new();
        if self.eps == 1 {
            parts.push("eps".into());
        } else if self.eps > 1 {
            parts.push(alloc::format!("eps^{}", self.eps));
        }
        let mut i = 0;
        while i < self.factors.len() {
            let j = self.factors[i];
            let k = self.power_of(j);
            if k == 1 {
                parts.push(alloc::format!("{prefix}[{},{}]", j.0, j.1));
            } else {
                parts.push(alloc::format!("({prefix}[{},{}])^{k}", j.0, j.1));
            }
            i += k;
        }
        out.push_str(&parts.join("*"));
    }
}

/// Element of the truncated jet algebra `A[[ε]]/(ε^{eps_max+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<JetMonomial, Rational>,
    eps_max: u32,
}

impl DiffPoly {
    pub fn zero(eps_max: u32) -> Self {
        DiffPoly { terms: BTreeMap::new(), eps_max }
    }

    pub fn constant(c: Rational, eps_max: u32) -> Self {
        let mut p = DiffPoly::zero(eps_max);
        p.add_term(JetMonomial::one(), c);
        p
    }

    /// `w^{α,d}`.
    pub fn jet(alpha: u16, d: u16, eps_max: u32) -> Self {
        DiffPoly::monomial(JetMonomial::new(0, alloc::vec![(alpha, d)]), Rational::one(), eps_max)
    }

    pub fn monomial(m: JetMonomial, c: Rational, eps_max: u32) -> Self {
        let mut p = DiffPoly::zero(eps_max);
        p.add_term(m, c);
        p
    }

    pub fn eps_max(&self) -> u32 {
        self.eps_max
    }

    /// Drop terms above `eps_max` and lower the bound.
    pub fn truncate(&self, eps_max: u32) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().filter(|(m, _)| m.eps <= eps_max).map(|(m, c)| (m.clone(), c.clone())).collect(),
            eps_max: eps_max.min(self.eps_max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &JetMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: JetMonomial, c: Rational) {
        if c.is_zero() || m.eps > self.eps_max {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly { terms: self.terms.clone(), eps_max: self.eps_max.min(other.eps_max) };
        if out.eps_max < self.eps_max {
            out.terms.retain(|m, _| m.eps <= out.eps_max);
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// `self += c * other` keeping `self`'s truncation.
    pub fn add_scaled(&mut self, other: &DiffPoly, c: &Rational) {
        for (m, k) in &other.terms {
            self.add_term(m.clone(), k * c);
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max.min(other.eps_max));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if m1.eps + m2.eps <= out.eps_max {
                    out.add_term(m1.mul(m2), c1 * c2);
                }
            }
        }
        out
    }

    /// Multiply by `ε^k`.
    pub fn shift_eps(&self, k: u32) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max);
        for (m, c) in &self.terms {
            out.add_term(JetMonomial { eps: m.eps + k, factors: m.factors.clone() }, c.clone());
        }
        out
    }

    /// `∂_x = Σ w^{α,d+1} ∂/∂w^{α,d}`.
    pub fn d_x(&self) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max);
        for (m, c) in &self.terms {
            for i in 0..m.factors.len() {
                if i > 0 && m.factors[i] == m.factors[i - 1] {
                    continue;
                }
                let k = m.power_of(m.factors[i]);
                let mut f = m.factors.clone();
                f[i].1 += 1;
                out.add_term(JetMonomial::new(m.eps, f), c * Rational::from(k as u64));
            }
        }
        out
    }

    pub fn d_x_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.d_x();
        }
        p
    }

    /// `∂/∂w^{α,d}`.
    pub fn partial(&self, jet: Jet) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max);
        for (m, c) in &self.terms {
            let k = m.power_of(jet);
            if k > 0 {
                out.add_term(m.without(jet).unwrap(), c * Rational::from(k as u64));
            }
        }
        out
    }

    /// Variational derivative `δ/δw^α = Σ_d (−∂_x)^d ∂/∂w^{α,d}` of the density.
    pub fn var_derivative(&self, alpha: u16) -> DiffPoly {
        let mut out = DiffPoly::zero(self.eps_max);
        for d in 0..=self.max_order(alpha) {
            let p = self.partial((alpha, d));
            if p.is_zero() {
                continue;
            }
            let mut q = p.d_x_n(d as u32);
            if d % 2 == 1 {
                q = q.neg();
            }
            out = out.add(&q);
        }
        out
    }

    /// Largest `d` with `w^{α,d}` present (0 if none).
    pub fn max_order(&self, alpha: u16) -> u16 {
        self.terms.keys().flat_map(|m| m.factors.iter()).filter(|j| j.0 == alpha).map(|j| j.1).max().unwrap_or(0)
    }

    /// Largest field index occurring.
    pub fn max_field(&self) -> u16 {
        self.terms.keys().flat_map(|m| m.factors.iter()).map(|j| j.0).max().unwrap_or(0)
    }

    /// Component of `deg_∂x = k`.
    pub fn homogeneous(&self, k: i64) -> DiffPoly {
        self.filter(|m| m.deg_dx() == k)
    }

    pub fn eps_part(&self, e: u32) -> DiffPoly {
        self.filter(|m| m.eps == e)
    }

    pub fn filter<F: Fn(&JetMonomial) -> bool>(&self, keep: F) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
            eps_max: self.eps_max,
        }
    }

    /// Whether every term has `deg_∂x = k`.
    pub fn is_homogeneous(&self, k: i64) -> bool {
        self.terms.keys().all(|m| m.deg_dx() == k)
    }

    /// Substitute `w^{α,d} ↦ ∂_x^d images[α−1]`.
    pub fn substitute(&self, images: &[DiffPoly]) -> DiffPoly {
        let eps_max = images.iter().map(|p| p.eps_max).fold(self.eps_max, u32::min);
        let mut cache: BTreeMap<Jet, DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero(eps_max);
        for (m, c) in &self.terms {
            let mut t = DiffPoly::monomial(JetMonomial { eps: m.eps, factors: Vec::new() }, c.clone(), eps_max);
            for &j in &m.factors {
                let img = cache
                    .entry(j)
                    .or_insert_with(|| images[j.0 as usize - 1].d_x_n(j.1 as u32))
                    .clone();
                t = t.mul(&img);
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Render with jet prefix (`w`, `u`, `u_norm`, ...).
    pub fn display_with(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let is_const = m.eps == 0 && m.factors.is_empty();
            if is_const {
                let _ = write!(s, "{a}");
            } else {
                if !a.is_one() {
                    let _ = write!(s, "{a}*");
                }
                m.render(prefix, &mut s);
            }
        }
        s
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("w"))
    }
}

/// `∂_t P = Σ_{α,d} ∂P/∂w^{α,d} · ∂_x^{d+1} flux[α−1]` for the evolution `∂_t w^α = ∂_x flux^α`.
pub fn evolve(p: &DiffPoly, flux: &[DiffPoly]) -> DiffPoly {
    let mut out = DiffPoly::zero(flux.iter().map(|q| q.eps_max()).fold(p.eps_max(), u32::min));
    let mut jets: Vec<Jet> = p.terms().flat_map(|(m, _)| m.factors.iter().copied()).collect();
    jets.sort_unstable();
    jets.dedup();
    for j in jets {
        let dp = p.partial(j);
        let rhs = flux[j.0 as usize - 1].d_x_n(j.1 as u32 + 1);
        out = out.add(&dp.mul(&rhs));
    }
    out
}
