use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::exactnum::{binomial, bernoulli_number, MultiPoly, Rational, Ring, VarSet};

/// `num / A^pow`, where `A = a_1 + … + a_n` is the last ring variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Laurent {
    num: MultiPoly,
    pow: u32,
}

impl Laurent {
    fn zero(vars: &VarSet) -> Self {
        Laurent { num: MultiPoly::zero(vars), pow: 0 }
    }

    fn from_poly(num: MultiPoly) -> Self {
        Laurent { num, pow: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator_power(&self) -> u32 {
        self.pow
    }

    fn a_index(&self) -> usize {
        self.num.vars().len() - 1
    }

    fn shift(num: &MultiPoly, by: i64) -> MultiPoly {
        let k = num.vars().len() - 1;
        let mut out = MultiPoly::zero(num.vars());
        for (e, c) in num.terms() {
            let mut e = e.clone();
            e[k] = (e[k] as i64 + by) as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return Laurent { num: self.num, pow: 0 };
        }
        let k = self.a_index();
        let low = self.num.terms().map(|(e, _)| e[k]).min().unwrap_or(0);
        let d = low.min(self.pow);
        if d == 0 {
            return self;
        }
        Laurent { num: Self::shift(&self.num, -(d as i64)), pow: self.pow - d }
    }

    fn add(&self, other: &Laurent) -> Laurent {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.pow == other.pow {
            let mut num = self.num.clone();
            num.add_assign_ref(&other.num);
            return Laurent { num, pow: self.pow }.normalized();
        }
        let p = self.pow.max(other.pow);
        let mut num = Self::shift(&self.num, (p - self.pow) as i64);
        num.add_assign_ref(&Self::shift(&other.num, (p - other.pow) as i64));
        Laurent { num, pow: p }.normalized()
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        Laurent { num: &self.num * &other.num, pow: self.pow + other.pow }.normalized()
    }

    fn scale(&self, c: &Rational) -> Laurent {
        Laurent { num: self.num.scale(c), pow: self.pow }.normalized()
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pow == 0 {
            write!(f, "{}", self.num)
        } else {
            let name = &self.num.vars().names()[self.a_index()];
            write!(f, "({})/{}^{}", self.num, name, self.pow)
        }
    }
}

/// Truncated power series in `b` with Laurent coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BSeries {
    parts: Vec<Laurent>,
}

impl BSeries {
    pub fn order(&self) -> usize {
        self.parts.len() - 1
    }

    /// Coefficient of `b^k`.
    pub fn part(&self, k: usize) -> &Laurent {
        &self.parts[k]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Laurent::is_zero)
    }

    fn vars(&self) -> &VarSet {
        self.parts[0].num.vars()
    }

    pub fn add(&self, other: &BSeries) -> BSeries {
        BSeries { parts: self.parts.iter().zip(&other.parts).map(|(x, y)| x.add(y)).collect() }
    }

    pub fn sub(&self, other: &BSeries) -> BSeries {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &BSeries) -> BSeries {
        let k = self.order();
        let mut parts = vec![Laurent::zero(self.vars()); k + 1];
        for i in 0..=k {
            if self.parts[i].is_zero() {
                continue;
            }
            for j in 0..=k - i {
                if !other.parts[j].is_zero() {
                    parts[i + j] = parts[i + j].add(&self.parts[i].mul(&other.parts[j]));
                }
            }
        }
        BSeries { parts }
    }

    pub fn scale(&self, c: &Rational) -> BSeries {
        BSeries { parts: self.parts.iter().map(|p| p.scale(c)).collect() }
    }

    /// `Σ_k b^k part_k` with the coefficients shown as Laurent polynomials.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (k, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push_str(" + ");
            }
            match k {
                0 => s.push_str(&format!("[{p}]")),
                1 => s.push_str(&format!("b*[{p}]")),
                _ => s.push_str(&format!("b^{k}*[{p}]")),
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl Ring for BSeries {
    fn zero_like(&self) -> Self {
        BSeries { parts: vec![Laurent::zero(self.vars()); self.parts.len()] }
    }
    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.parts[0] = Laurent::from_poly(MultiPoly::one(self.vars()));
        z
    }
    fn add_r(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_r(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale_r(&self, c: &Rational) -> Self {
        self.scale(c)
    }
}

/// Linear form `Σ c_i a_i + c_b b` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinForm {
    pub a: Vec<i64>,
    pub b: i64,
}

impl LinForm {
    pub fn subset(n: usize, set: &[u16], b: i64) -> Self {
        let mut a = vec![0; n];
        for &i in set {
            a[i as usize - 1] += 1;
        }
        LinForm { a, b }
    }

    pub fn total(n: usize, b: i64) -> Self {
        LinForm { a: vec![1; n], b }
    }

    /// `𝐚 − Σ_{i∈set} a_i`, plus `b` times the given multiple.
    pub fn complement(n: usize, set: &[u16], b: i64) -> Self {
        let mut f = Self::total(n, b);
        for &i in set {
            f.a[i as usize - 1] -= 1;
        }
        f
    }
}

/// Bernoulli numbers used to build `B_k(x) = Σ_j C(k,j) B_j x^{k−j}`; overridable for controls.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    numbers: Vec<Rational>,
}

impl BernoulliTable {
    pub fn standard(max: usize) -> Self {
        BernoulliTable { numbers: (0..=max).map(bernoulli_number).collect() }
    }

    /// Standard table with `B_j` shifted by `delta`.
    pub fn perturbed(max: usize, j: usize, delta: Rational) -> Self {
        let mut t = Self::standard(max.max(j));
        t.numbers[j] += delta;
        t
    }

    pub fn number(&self, k: usize) -> &Rational {
        &self.numbers[k]
    }

    /// Ascending coefficients of `B_k(x)`.
    pub fn poly(&self, k: usize) -> Vec<Rational> {
        (0..=k).map(|i| Rational::from(binomial(k as u32, i as u32)) * &self.numbers[k - i]).collect()
    }
}

/// How linear forms in `a_1..a_n` are written in the ring variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// Variables `a1..a{n−1}, A` with `a_n = A − Σ_{i<n} a_i`.
    Full,
    /// Variables `y, A` with `y = a_I`; only forms constant on `I` and on its complement are allowed.
    Split(Vec<u16>),
}

/// Ring of coefficients in `a_1..a_n, b` with `(𝐚+b)^{-1}` expanded around `b = 0`.
pub struct CoeffRing {
    n: usize,
    embedding: Embedding,
    vars: VarSet,
    order: usize,
    bern: BernoulliTable,
    inv_s: BSeries,
    powers: spin::Mutex<BTreeMap<LinForm, Vec<BSeries>>>,
    values: spin::Mutex<BTreeMap<(LinForm, usize), BSeries>>,
}

impl CoeffRing {
    pub fn new(n: usize, order: usize, bern: BernoulliTable) -> Self {
        Self::with_embedding(n, Embedding::Full, order, bern)
    }

    /// Coefficients of generators attached to the marking set `side`, in the variables `y = a_side`, `A`.
    /// Substituting `y = Σ_{i∈side} a_i` is a ring map, so identities here imply the symbolic ones.
    pub fn split(n: usize, side: &[u16], order: usize, bern: BernoulliTable) -> Self {
        Self::with_embedding(n, Embedding::Split(side.to_vec()), order, bern)
    }

    pub fn with_embedding(n: usize, embedding: Embedding, order: usize, bern: BernoulliTable) -> Self {
        assert!(n >= 1, "need at least one marking with a weight");
        let names: Vec<String> = match &embedding {
            Embedding::Full => (1..n).map(|i| format!("a{i}")).chain([String::from("A")]).collect(),
            Embedding::Split(_) => alloc::vec![String::from("y"), String::from("A")],
        };
        let vars = VarSet::new(&names);
        let mut inv = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
            inv.push(Laurent { num: MultiPoly::constant(&vars, sign), pow: k as u32 + 1 });
        }
        let inv_s = BSeries { parts: inv };
        CoeffRing {
            n,
            embedding,
            vars,
            order,
            bern,
            inv_s,
            powers: spin::Mutex::new(BTreeMap::new()),
            values: spin::Mutex::new(BTreeMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bernoulli(&self) -> &BernoulliTable {
        &self.bern
    }

    pub fn zero(&self) -> BSeries {
        BSeries { parts: vec![Laurent::zero(&self.vars); self.order + 1] }
    }

    pub fn constant(&self, c: Rational) -> BSeries {
        let mut z = self.zero();
        z.parts[0] = Laurent::from_poly(MultiPoly::constant(&self.vars, c));
        z
    }

    /// `c / 𝐚^k` as a constant series.
    pub fn over_a(&self, c: Rational, k: u32) -> BSeries {
        let mut z = self.zero();
        z.parts[0] = Laurent { num: MultiPoly::constant(&self.vars, c), pow: k }.normalized();
        z
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn linear(&self, f: &LinForm) -> BSeries {
        let coeffs = match &self.embedding {
            Embedding::Full => {
                let last = self.n - 1;
                let mut coeffs = vec![Rational::zero(); self.n];
                for (i, &c) in f.a.iter().enumerate().take(last) {
                    coeffs[i] = Rational::from(c - f.a[last]);
                }
                coeffs[last] = Rational::from(f.a[last]);
                coeffs
            }
            Embedding::Split(side) => {
                let on = |i: usize| side.contains(&(i as u16 + 1));
                let c_in = (0..self.n).find(|&i| on(i)).map(|i| f.a[i]);
                let c_out = (0..self.n).find(|&i| !on(i)).map(|i| f.a[i]);
                assert!(
                    (0..self.n).all(|i| Some(f.a[i]) == if on(i) { c_in } else { c_out }),
                    "linear form {f:?} is not a combination of a_I and a_J for I = {side:?}"
                );
                // an empty side or complement leaves y = 0 or y = A
                let (ci, co) = match (c_in, c_out) {
                    (Some(x), Some(y)) => (x, y),
                    (Some(x), None) | (None, Some(x)) => (x, x),
                    (None, None) => (0, 0),
                };
                // c_in·y + c_out·(A − y)
                vec![Rational::from(ci - co), Rational::from(co)]
            }
        };
        let mut z = self.zero();
        z.parts[0] = Laurent::from_poly(MultiPoly::linear(&self.vars, &coeffs));
        if self.order >= 1 && f.b != 0 {
            z.parts[1] = Laurent::from_poly(MultiPoly::constant(&self.vars, Rational::from(f.b)));
        }
        z
    }

    /// `B_k(f / (𝐚+b))`.
    pub fn bernoulli_at(&self, k: usize, f: &LinForm) -> BSeries {
        let key = (f.clone(), k);
        if let Some(v) = self.values.lock().get(&key) {
            return v.clone();
        }
        let powers = self.powers_of(f, k);
        let coeffs = self.bern.poly(k);
        let mut out = self.zero();
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&powers[j].scale(c));
            }
        }
        self.values.lock().insert(key, out.clone());
        out
    }

    fn powers_of(&self, f: &LinForm, k: usize) -> Vec<BSeries> {
        if let Some(p) = self.powers.lock().get(f) {
            if p.len() > k {
                return p[..=k].to_vec();
            }
        }
        let u = self.linear(f).mul(&self.inv_s);
        let mut p = vec![u.one_like()];
        for j in 1..=k {
            p.push(p[j - 1].mul(&u));
        }
        self.powers.lock().insert(f.clone(), p.clone());
        p
    }

    /// `(𝐚 + b)^k`.
    pub fn s_power(&self, k: u32) -> BSeries {
        let s = self.linear(&LinForm::total(self.n, 1));
        let mut acc = s.one_like();
        for _ in 0..k {
            acc = acc.mul(&s);
        }
        acc
    }

    /// `(∂_b)^j` at `b = 0`, as a constant series.
    pub fn taylor(&self, x: &BSeries, j: usize) -> BSeries {
        let mut z = self.zero();
        let fact: Rational = (1..=j as i64).map(Rational::from).product();
        z.parts[0] = x.parts[j].scale(&fact);
        z
    }
}
