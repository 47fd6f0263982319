use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::exactnum::{bernoulli_number, factorial, Rational};
use crate::Error;

/// Linear combination of λ-monomials; keys are sorted index multisets (λ_0 omitted).
pub type LambdaCombination = BTreeMap<Vec<u32>, Rational>;

/// Rewrite a product of λ-classes in genus `g` using `c(E)c(E^∨) = 1`,
/// i.e. `λ_k² = 2 Σ_{i<k} (−1)^{k+1+i} λ_i λ_{2k−i}`, until no index repeats.
/// An empty map means the product vanishes.
pub fn hodge_reduce(indices: &[u32], g: u32) -> Result<LambdaCombination, Error> {
    if let Some(&bad) = indices.iter().find(|&&i| i > g) {
        return Err(Error::InvalidArgument(format!("lambda_{bad} in genus {g}")));
    }
    let mut start: Vec<u32> = indices.iter().copied().filter(|&i| i != 0).collect();
    start.sort_unstable();
    let mut pending: LambdaCombination = BTreeMap::new();
    pending.insert(start, Rational::one());
    let mut done: LambdaCombination = BTreeMap::new();
    while let Some((mono, c)) = pending.pop_first() {
        let rep = mono.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
        let Some(k) = rep else {
            accumulate(&mut done, mono, c);
            continue;
        };
        let pos = mono.iter().position(|&x| x == k).unwrap();
        let mut rest = mono.clone();
        rest.drain(pos..pos + 2);
        for i in 0..k {
            let j = 2 * k - i;
            if j > g {
                continue;
            }
            let sign = if (k + 1 + i) % 2 == 0 { 2 } else { -2 };
            let mut next = rest.clone();
            next.extend([i, j].into_iter().filter(|&x| x != 0));
            next.sort_unstable();
            accumulate(&mut pending, next, &c * Rational::from(sign as i64));
        }
    }
    Ok(done)
}

fn accumulate(map: &mut LambdaCombination, key: Vec<u32>, c: Rational) {
    let e = map.entry(key).or_default();
    *e += c;
    if e.is_zero() {
        map.retain(|_, v| !v.is_zero());
    }
}

/// `∫_{M̄_g} λ_{g−1}³ = |B_{2g}||B_{2g−2}| / (2g (2g−2) (2g−2)!)`.
pub fn lambda_top_triple(g: u32) -> Result<Rational, Error> {
    if g < 2 {
        return Err(Error::InvalidArgument(format!("lambda_top_triple needs g >= 2, got {g}")));
    }
    let b1 = bernoulli_number(2 * g as usize).abs();
    let b2 = bernoulli_number(2 * g as usize - 2).abs();
    let den = Rational::from(2 * g as u64) * Rational::from(2 * g as u64 - 2) * Rational::from(factorial(2 * g - 2));
    Ok(b1 * b2 / den)
}

/// `∫_{M̄_g}` of a λ-monomial of top degree `3g−3`. Only the normal form
/// `λ_{g−2} λ_{g−1} λ_g` (and anything reducing to it) is supported.
pub fn hodge_top_integral(indices: &[u32], g: u32) -> Result<Rational, Error> {
    let deg: u32 = indices.iter().sum();
    if g < 2 || deg != 3 * g - 3 {
        return Ok(Rational::zero());
    }
    let reduced = hodge_reduce(indices, g)?;
    let target = if g == 2 { alloc::vec![1, 2] } else { alloc::vec![g - 2, g - 1, g] };
    let mut total = Rational::zero();
    for (mono, c) in reduced {
        if mono != target {
            return Err(Error::Unsupported(format!("Hodge integral of lambda monomial {mono:?} in genus {g}")));
        }
        total += c * lambda_top_triple(g)? / Rational::from(2);
    }
    Ok(total)
}
