use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::{self, Write};
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use super::rational::{lcm, Rational};

/// Ordered list of indeterminate names shared by polynomials of one ring.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarSet(names.iter().map(|s| String::from(s.as_ref())).collect())
    }

    /// `prefix1 .. prefixN`.
    pub fn indexed(prefix: &str, n: usize) -> Self {
        VarSet((1..=n).map(|i| alloc::format!("{prefix}{i}")).collect())
    }

    /// Concatenation of two variable lists.
    pub fn concat(&self, other: &VarSet) -> Self {
        VarSet(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|s| s == name)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub type Exponents = Vec<u32>;

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    /// The indeterminate at position `i`.
    pub fn var(vars: &VarSet, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        MultiPoly::monomial(vars, e, Rational::one())
    }

    pub fn monomial(vars: &VarSet, exps: Exponents, c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        p.add_term(exps, c);
        p
    }

    /// Linear form `Σ coeffs[i] * var_i`.
    pub fn linear(vars: &VarSet, coeffs: &[Rational]) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
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

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Exponents, Rational> {
        self.terms
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
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

    pub fn add_assign_ref(&mut self, other: &MultiPoly) {
        self.check_ring(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &Rational) {
        self.check_ring(other);
        if c.is_zero() {
            return;
        }
        for (e, k) in &other.terms {
            self.add_term(e.clone(), k * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    fn check_ring(&self, other: &MultiPoly) {
        assert!(
            self.vars == other.vars,
            "polynomials from different rings: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    /// Product with all terms of total degree above `max_deg` discarded.
    pub fn mul_truncated(&self, other: &MultiPoly, max_deg: Option<u32>) -> MultiPoly {
        self.check_ring(other);
        let mut out = MultiPoly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &other.terms {
                if let Some(m) = max_deg {
                    let d2: u32 = e2.iter().sum();
                    if d1 + d2 > m {
                        continue;
                    }
                }
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Maximal degree in the variables listed in `idx`.
    pub fn degree_in(&self, idx: &[usize]) -> Option<u32> {
        self.terms.keys().map(|e| idx.iter().map(|&i| e[i]).sum()).max()
    }

    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        self.filter(|e| e.iter().sum::<u32>() == d)
    }

    pub fn filter<F: Fn(&[u32]) -> bool>(&self, keep: F) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Coefficient of `∏_{i∈idx} var_i^{exps_i}`, as a polynomial in the remaining variables
    /// (the listed variables then have exponent 0).
    pub fn coeff_of(&self, idx: &[usize], exps: &[u32]) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if idx.iter().zip(exps).all(|(&i, &k)| e[i] == k) {
                let mut e2 = e.clone();
                for &i in idx {
                    e2[i] = 0;
                }
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Rational::from(e[i]));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= x.pow(k as i32);
                }
            }
            total += t;
        }
        total
    }

    /// Substitute polynomials (all from `target` ring) for every variable.
    pub fn compose(&self, images: &[MultiPoly], target: &VarSet) -> MultiPoly {
        assert_eq!(images.len(), self.vars.len());
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![MultiPoly::one(target), p.clone()]).collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out.add_assign_ref(&t);
        }
        out
    }

    /// Re-express in a ring whose variable list contains all of ours (matched by name).
    pub fn embed(&self, target: &VarSet) -> MultiPoly {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| target.position(n).unwrap_or_else(|| panic!("variable {n} missing in target ring")))
            .collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Restrict to the variables named in `target`; panics if a dropped variable occurs.
    pub fn restrict(&self, target: &VarSet) -> MultiPoly {
        let map: Vec<Option<usize>> = self.vars.names().iter().map(|n| target.position(n)).collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                match map[i] {
                    Some(j) => e2[j] += k,
                    None => assert!(k == 0, "variable {} still occurs", self.vars.names()[i]),
                }
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Terms sorted by descending total degree, then descending lexicographic exponents.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_desc(a.0, b.0));
        v
    }

    /// `x1^2*x2` style rendering of a single exponent vector ("1" for the empty monomial).
    pub fn fmt_monomial(&self, exps: &[u32]) -> String {
        let mut s = String::new();
        for (name, &k) in self.vars.names().iter().zip(exps) {
            if k == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('*');
            }
            s.push_str(name);
            if k > 1 {
                let _ = write!(s, "^{k}");
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

pub(crate) fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = lcm(&den, c.denom());
        }
        let scale = Rational::from(den.clone());
        let mut body = String::new();
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let c = c * &scale;
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    body.push('-');
                }
            } else {
                body.push_str(if neg { " - " } else { " + " });
            }
            let is_const = e.iter().all(|&k| k == 0);
            if is_const {
                body.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    let _ = write!(body, "{a}*");
                }
                body.push_str(&self.fmt_monomial(e));
            }
        }
        if den.is_one() {
            f.write_str(&body)
        } else if self.terms.len() == 1 {
            write!(f, "{body}/{den}")
        } else {
            write!(f, "({body})/{den}")
        }
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Minimal commutative-ring interface used by generic polynomial evaluation.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_r(&self, other: &Self) -> Self;
    fn mul_r(&self, other: &Self) -> Self;
    fn scale_r(&self, c: &Rational) -> Self;
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add_r(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_r(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_r(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Ring for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(&self.vars)
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(&self.vars)
    }
    fn add_r(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_r(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_r(&self, c: &Rational) -> Self {
        self.scale(c)
    }
}

/// Evaluate a univariate polynomial given by ascending coefficients (Horner).
pub fn horner<R: Ring>(coeffs: &[Rational], x: &R) -> R {
    let mut acc = x.zero_like();
    for c in coeffs.iter().rev() {
        acc = acc.mul_r(x).add_r(&x.one_like().scale_r(c));
    }
    acc
}
