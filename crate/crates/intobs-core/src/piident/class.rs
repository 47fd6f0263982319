use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::ring::{BSeries, CoeffRing, LinForm};
use crate::exactnum::Rational;

/// Generator symbols of the formal class ring on `M̄_{g,n}` (compact type).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    One,
    Kappa(u32),
    Psi { i: u16, k: u32 },
    /// `(ξ_{g1,g−g1}^{I,J})_* [ψ_{h1}^k − (−ψ_{h2})^k]/(ψ_{h1}+ψ_{h2})`, `h1` on the `(g1, I)` side.
    Boundary { g1: u32, side: Vec<u16>, k: u32 },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::One => f.write_str("1"),
            Generator::Kappa(k) => write!(f, "kappa_{k}"),
            Generator::Psi { i, k } => write!(f, "psi_{i}^{k}"),
            Generator::Boundary { g1, side, k } => {
                let s: Vec<String> = side.iter().map(|i| format!("{i}")).collect();
                write!(f, "xi[g1={g1},I={{{}}}](k={k})", s.join(","))
            }
        }
    }
}

/// Element `Σ c_X X` of the formal ring; no relations among generators.
#[derive(Clone, Debug)]
pub struct FormalClass {
    pub g: u32,
    /// Number of markings of the moduli space the class lives on.
    pub markings: usize,
    pub terms: BTreeMap<Generator, BSeries>,
}

impl FormalClass {
    pub fn new(g: u32, markings: usize) -> Self {
        FormalClass { g, markings, terms: BTreeMap::new() }
    }

    /// Adds `c · X`, normalizing `ψ^0 = 1` and dropping the empty boundary symbol.
    pub fn add(&mut self, x: Generator, c: BSeries) {
        let x = match x {
            Generator::Psi { k: 0, .. } => Generator::One,
            Generator::Boundary { k: 0, .. } => return,
            x => x,
        };
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&x) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&x);
                }
            }
            None => {
                self.terms.insert(x, c);
            }
        }
    }

    pub fn coeff(&self, x: &Generator) -> Option<&BSeries> {
        self.terms.get(x)
    }

    /// `κ_0 = 2g − 2 + n`.
    pub fn with_kappa0(&self) -> FormalClass {
        let mut out = FormalClass::new(self.g, self.markings);
        let k0 = Rational::from(2 * self.g as i64 - 2 + self.markings as i64);
        for (x, c) in &self.terms {
            match x {
                Generator::Kappa(0) => out.add(Generator::One, c.scale(&k0)),
                _ => out.add(x.clone(), c.clone()),
            }
        }
        out
    }

    pub fn map_coeffs<F: Fn(&BSeries) -> BSeries>(&self, f: F) -> FormalClass {
        let mut out = FormalClass::new(self.g, self.markings);
        for (x, c) in &self.terms {
            out.add(x.clone(), f(c));
        }
        out
    }

    pub fn sub(&self, other: &FormalClass) -> FormalClass {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add(x.clone(), c.scale(&-Rational::one()));
        }
        out
    }
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Ordered splits `(g1, I)` of `{1..markings}` with both sides stable after adding the node.
pub fn boundary_splits(g: u32, markings: usize) -> Vec<(u32, Vec<u16>)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << markings) {
        let side: Vec<u16> = (0..markings).filter(|i| mask >> i & 1 == 1).map(|i| i as u16 + 1).collect();
        let rest = markings - side.len();
        for g1 in 0..=g {
            if stable(g1, side.len() + 1) && stable(g - g1, rest + 1) {
                out.push((g1, side.clone()));
            }
        }
    }
    out
}

fn half() -> Rational {
    Rational::new(1, 2)
}

/// Degree-`m` bracket of the exponent `f` on `M̄_{g,n+1}`, without the `(−1)^m(𝐚+b)^m/(m(m+1))` prefactor.
/// Marking `n+1` carries weight `𝐚`.
pub fn f_bracket(ring: &CoeffRing, g: u32, m: u32) -> FormalClass {
    let n = ring.n();
    let k = m as usize + 1;
    let mut out = FormalClass::new(g, n + 1);
    out.add(Generator::Kappa(m), ring.constant(ring.bernoulli().number(k).clone()));
    for i in 1..=n as u16 {
        let c = ring.bernoulli_at(k, &LinForm::complement(n, &[i], 1));
        out.add(Generator::Psi { i, k: m }, c.scale(&-Rational::one()));
    }
    let last = n as u16 + 1;
    let c = ring.bernoulli_at(k, &LinForm::total(n, 0));
    out.add(Generator::Psi { i: last, k: m }, c.scale(&-Rational::one()));
    for (g1, side) in boundary_splits(g, n + 1) {
        let w = if side.contains(&last) {
            let rest: Vec<u16> = side.iter().copied().filter(|&i| i != last).collect();
            LinForm::subset(n, &rest, 1)
        } else {
            LinForm::subset(n, &side, 0)
        };
        out.add(Generator::Boundary { g1, side, k: m }, ring.bernoulli_at(k, &w).scale(&half()));
    }
    out
}

/// `f` truncated at `m ≤ m_max`.
pub fn build_f_exponent(ring: &CoeffRing, g: u32, m_max: u32) -> FormalClass {
    let mut out = FormalClass::new(g, ring.n() + 1);
    for m in 1..=m_max {
        let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
        let pre = ring.s_power(m).scale(&(sign / Rational::from(m as i64 * (m as i64 + 1))));
        for (x, c) in f_bracket(ring, g, m).terms {
            out.add(x, c.mul(&pre));
        }
    }
    out
}

/// Generators carrying `P_m` on `M̄_{g,n}`.
pub fn p_generators(g: u32, n: usize, m: u32) -> Vec<Generator> {
    let mut out = alloc::vec![Generator::Kappa(m - 1)];
    out.extend((1..=n as u16).map(|i| Generator::Psi { i, k: m - 1 }));
    if m >= 2 {
        out.extend(boundary_splits(g, n).into_iter().map(|(g1, side)| Generator::Boundary { g1, side, k: m - 1 }));
    }
    out
}

/// Generators carrying `Q_m` on `M̄_{g,n}`.
pub fn q_generators(g: u32, n: usize, m: u32) -> Vec<Generator> {
    let mut out = alloc::vec![Generator::Kappa(m)];
    out.extend((1..=n as u16).map(|i| Generator::Psi { i, k: m }));
    out.extend(boundary_splits(g, n).into_iter().map(|(g1, side)| Generator::Boundary { g1, side, k: m }));
    out
}

/// Marking set whose weight `a_I` the coefficient of `x` depends on.
pub fn generator_side(x: &Generator) -> Vec<u16> {
    match x {
        Generator::Psi { i, .. } => alloc::vec![*i],
        Generator::Boundary { side, .. } => side.clone(),
        _ => Vec::new(),
    }
}

/// Coefficient of `x` in `P_m`.
pub fn p_coeff(ring: &CoeffRing, m: u32, x: &Generator) -> BSeries {
    let n = ring.n();
    let k = m as usize + 1;
    match x {
        Generator::Kappa(_) => {
            ring.constant(ring.bernoulli().number(k).clone()).sub(&ring.bernoulli_at(k, &LinForm::total(n, 0)))
        }
        Generator::Psi { i, .. } => ring
            .bernoulli_at(k, &LinForm::complement(n, &[*i], 0))
            .sub(&ring.bernoulli_at(k, &LinForm::complement(n, &[*i], 1))),
        Generator::Boundary { side, .. } => ring
            .bernoulli_at(k, &LinForm::subset(n, side, 1))
            .sub(&ring.bernoulli_at(k, &LinForm::subset(n, side, 0)))
            .scale(&half()),
        Generator::One => ring.zero(),
    }
}

/// Coefficient of `x` in `Q_m`.
pub fn q_coeff(ring: &CoeffRing, m: u32, x: &Generator) -> BSeries {
    let n = ring.n();
    let k = m as usize + 1;
    match x {
        Generator::Kappa(_) => ring.linear(&LinForm::total(n, 0)).scale(ring.bernoulli().number(k)),
        Generator::Psi { i, .. } => {
            let ai = ring.linear(&LinForm::subset(n, &[*i], 0));
            let rest = ring.linear(&LinForm::complement(n, &[*i], 0));
            rest.mul(&ring.bernoulli_at(k, &LinForm::complement(n, &[*i], 1)))
                .add(&ai.mul(&ring.bernoulli_at(k, &LinForm::complement(n, &[*i], 0))))
                .scale(&-Rational::one())
        }
        Generator::Boundary { side, .. } => {
            let a_i = ring.linear(&LinForm::subset(n, side, 0));
            let a_j = ring.linear(&LinForm::complement(n, side, 0));
            a_i.mul(&ring.bernoulli_at(k, &LinForm::subset(n, side, 1)))
                .add(&a_j.mul(&ring.bernoulli_at(k, &LinForm::subset(n, side, 0))))
                .scale(&half())
        }
        Generator::One => ring.zero(),
    }
}

/// `P_m` on `M̄_{g,n}`.
pub fn build_p(ring: &CoeffRing, g: u32, m: u32) -> FormalClass {
    let mut out = FormalClass::new(g, ring.n());
    for x in p_generators(g, ring.n(), m) {
        let c = p_coeff(ring, m, &x);
        out.add(x, c);
    }
    out
}

/// `Q_m` on `M̄_{g,n}`.
pub fn build_q(ring: &CoeffRing, g: u32, m: u32) -> FormalClass {
    let mut out = FormalClass::new(g, ring.n());
    for x in q_generators(g, ring.n(), m) {
        let c = q_coeff(ring, m, &x);
        out.add(x, c);
    }
    out
}

/// `P_m` and `Q_m` together.
#[derive(Clone, Debug)]
pub struct PmQm {
    pub m: u32,
    pub p: FormalClass,
    pub q: FormalClass,
}

pub fn build_pq(ring: &CoeffRing, g: u32, m: u32) -> PmQm {
    PmQm { m, p: build_p(ring, g, m), q: build_q(ring, g, m) }
}

fn sign(k: u32) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Pushforward along the map forgetting the last marking.
pub fn pushforward(x: &FormalClass) -> FormalClass {
    let g = x.g;
    let last = x.markings as u16;
    let mut out = FormalClass::new(g, x.markings - 1);
    for (gen, c) in &x.terms {
        match gen {
            Generator::One => {}
            Generator::Kappa(0) => {}
            Generator::Kappa(k) => out.add(Generator::Kappa(k - 1), c.clone()),
            Generator::Psi { k: 0, .. } => {}
            Generator::Psi { i, k } if *i == last => out.add(Generator::Kappa(k - 1), c.clone()),
            Generator::Psi { i, k } => out.add(Generator::Psi { i: *i, k: k - 1 }, c.clone()),
            Generator::Boundary { g1, side, k } => {
                let k = *k;
                let (rest, other): (Vec<u16>, usize) = if side.contains(&last) {
                    (side.iter().copied().filter(|&i| i != last).collect(), 0)
                } else {
                    (side.clone(), 1)
                };
                let comp: Vec<u16> = (1..last).filter(|i| !rest.contains(i)).collect();
                if other == 0 {
                    // last marking on the h1 side
                    if stable(*g1, rest.len() + 1) {
                        out.add(Generator::Boundary { g1: *g1, side: rest, k: k - 1 }, c.clone());
                    } else {
                        // rational tail {i, last}: ψ_{h1} = 0, ψ_{h2} = ψ_i
                        out.add(Generator::Psi { i: rest[0], k: k - 1 }, c.scale(&sign(k + 1)));
                    }
                } else if stable(g - g1, comp.len() + 1) {
                    out.add(Generator::Boundary { g1: *g1, side: rest, k: k - 1 }, c.scale(&-Rational::one()));
                } else {
                    // rational tail on the h2 side: ψ_{h2} = 0, ψ_{h1} = ψ_j
                    out.add(Generator::Psi { i: comp[0], k: k - 1 }, c.clone());
                }
            }
        }
    }
    out
}

/// `π_*(δ_{(i,last)} · x)`, where `δ_{(i,last)}` is the rational tail carrying `i` and the last marking.
pub fn pushforward_on_tail(x: &FormalClass, i: u16) -> FormalClass {
    let g = x.g;
    let last = x.markings as u16;
    let mut out = FormalClass::new(g, x.markings - 1);
    for (gen, c) in &x.terms {
        match gen {
            Generator::One => out.add(Generator::One, c.clone()),
            Generator::Kappa(k) => out.add(Generator::Kappa(*k), c.clone()),
            Generator::Psi { i: j, k } => {
                if *j != i && *j != last {
                    out.add(Generator::Psi { i: *j, k: *k }, c.clone());
                } else if *k == 0 {
                    out.add(Generator::One, c.clone());
                }
            }
            Generator::Boundary { g1, side, k } => {
                let k = *k;
                let has_i = side.contains(&i);
                let has_last = side.contains(&last);
                if has_i != has_last {
                    continue;
                }
                let comp: Vec<u16> = (1..=last).filter(|j| !side.contains(j)).collect();
                let tail = [i.min(last), i.max(last)];
                if *g1 == 0 && side.as_slice() == tail {
                    // self-intersection, normal bundle −ψ_{h1} − ψ_{h2}; ψ_{h1} = 0
                    out.add(Generator::Psi { i, k }, c.scale(&sign(k)));
                } else if g - g1 == 0 && comp.as_slice() == tail {
                    out.add(Generator::Psi { i, k }, c.scale(&-Rational::one()));
                } else if has_i {
                    let rest: Vec<u16> = side.iter().copied().filter(|&j| j != last).collect();
                    out.add(Generator::Boundary { g1: *g1, side: rest, k }, c.clone());
                } else {
                    out.add(Generator::Boundary { g1: *g1, side: side.clone(), k }, c.clone());
                }
            }
        }
    }
    out
}
