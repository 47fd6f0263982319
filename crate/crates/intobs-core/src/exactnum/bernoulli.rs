use alloc::vec::Vec;

use spin::Once;

use super::poly::{horner, MultiPoly, Ring};
use super::rational::{binomial, factorial, Rational};
use crate::Error;

/// Default number of cached Bernoulli numbers and polynomials.
pub const DEFAULT_BERNOULLI_BOUND: usize = 32;

/// Bernoulli numbers `B_0..B_M` and polynomial coefficient tables `B_m(x) = Σ_k c_{m,k} x^k`.
#[derive(Clone, Debug)]
pub struct BernoulliCache {
    numbers: Vec<Rational>,
    polys: Vec<Vec<Rational>>,
}

impl BernoulliCache {
    pub fn new(bound: usize) -> Self {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut numbers: Vec<Rational> = Vec::with_capacity(bound + 1);
        numbers.push(Rational::one());
        for m in 1..=bound {
            let mut s = Rational::zero();
            for (j, b) in numbers.iter().enumerate() {
                s += Rational::from(binomial(m as u32 + 1, j as u32)) * b;
            }
            numbers.push(-s / Rational::from(m as u64 + 1));
        }
        let polys = (0..=bound)
            .map(|m| {
                (0..=m)
                    .map(|k| Rational::from(binomial(m as u32, k as u32)) * &numbers[m - k])
                    .collect()
            })
            .collect();
        BernoulliCache { numbers, polys }
    }

    pub fn bound(&self) -> usize {
        self.numbers.len() - 1
    }

    pub fn number(&self, m: usize) -> Option<&Rational> {
        self.numbers.get(m)
    }

    /// Ascending coefficients of `B_m(x)`.
    pub fn poly_coeffs(&self, m: usize) -> Option<&[Rational]> {
        self.polys.get(m).map(|v| v.as_slice())
    }
}

static CACHE: Once<BernoulliCache> = Once::new();

/// Process-wide cache with [`DEFAULT_BERNOULLI_BOUND`].
pub fn global_cache() -> &'static BernoulliCache {
    CACHE.call_once(|| BernoulliCache::new(DEFAULT_BERNOULLI_BOUND))
}

/// `B_m`, with `B_1 = -1/2`.
pub fn bernoulli_number(m: usize) -> Rational {
    match global_cache().number(m) {
        Some(b) => b.clone(),
        None => BernoulliCache::new(m).numbers[m].clone(),
    }
}

fn coeffs(m: usize) -> Vec<Rational> {
    match global_cache().poly_coeffs(m) {
        Some(c) => c.to_vec(),
        None => BernoulliCache::new(m).polys[m].clone(),
    }
}

/// `B_m(x)` evaluated in any ring.
pub fn bernoulli_poly<R: Ring>(m: usize, x: &R) -> R {
    horner(&coeffs(m), x)
}

/// `s^m B_m(x/s) = Σ_k c_{m,k} x^k s^{m-k}`, the denominator-free form of `B_m(x/s)`.
pub fn bernoulli_poly_homogenized(m: usize, x: &MultiPoly, s: &MultiPoly) -> MultiPoly {
    let c = coeffs(m);
    let mut xp = Vec::with_capacity(m + 1);
    let mut sp = Vec::with_capacity(m + 1);
    xp.push(MultiPoly::one(x.vars()));
    sp.push(MultiPoly::one(x.vars()));
    for k in 1..=m {
        xp.push(&xp[k - 1] * x);
        sp.push(&sp[k - 1] * s);
    }
    let mut out = MultiPoly::zero(x.vars());
    for (k, ck) in c.iter().enumerate() {
        if !ck.is_zero() {
            out.add_scaled(&(&xp[k] * &sp[m - k]), ck);
        }
    }
    out
}

/// `total! / ∏ parts!`.
pub fn multinomial(total: u32, parts: &[u32]) -> Result<Rational, Error> {
    let s: u64 = parts.iter().map(|&p| p as u64).sum();
    if s != total as u64 {
        return Err(Error::InvalidArgument(alloc::format!(
            "multinomial parts sum to {s}, expected {total}"
        )));
    }
    let mut den = num_bigint::BigInt::from(1);
    for &p in parts {
        den *= factorial(p);
    }
    Ok(Rational::from_big(factorial(total), den))
}
