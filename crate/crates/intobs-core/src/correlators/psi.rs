use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use spin::{Mutex, Once};

use crate::exactnum::{factorial, Rational};

fn double_factorial_odd(k: i64) -> Rational {
    // (2j-1)!! for k = 2j-1 >= -1
    let mut acc = Rational::one();
    let mut i = k;
    while i > 1 {
        acc *= Rational::from(i);
        i -= 2;
    }
    acc
}

/// Memoized ψ-class intersection numbers `⟨τ_{d_1} … τ_{d_n}⟩_g`.
#[derive(Default)]
pub struct PsiEngine {
    memo: Mutex<BTreeMap<(u32, Vec<u32>), Rational>>,
}

impl PsiEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cached_len(&self) -> usize {
        self.memo.lock().len()
    }

    /// Returns 0 on unstable `(g, n)` and whenever `Σd ≠ 3g−3+n`.
    pub fn correlator(&self, g: u32, d: &[u32]) -> Rational {
        let n = d.len() as i64;
        if 2 * g as i64 - 2 + n <= 0 {
            return Rational::zero();
        }
        let s: i64 = d.iter().map(|&x| x as i64).sum();
        if s != 3 * g as i64 - 3 + n {
            return Rational::zero();
        }
        let mut key: Vec<u32> = d.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.memo.lock().get(&(g, key.clone())) {
            return v.clone();
        }
        let v = self.compute(g, &key);
        self.memo.lock().insert((g, key), v.clone());
        v
    }

    // Virasoro/DVV recursion on the largest insertion; `d` is sorted descending.
    fn compute(&self, g: u32, d: &[u32]) -> Rational {
        if d[0] == 0 {
            // only ⟨τ_0^3⟩_0 survives the dimension constraint
            return if g == 0 && d.len() == 3 { Rational::one() } else { Rational::zero() };
        }
        if g == 1 && d == [1] {
            return Rational::new(1, 24);
        }
        let k = d[0] as i64 - 1;
        let rest = &d[1..];
        let mut total = Rational::zero();
        for j in 0..rest.len() {
            let dj = rest[j] as i64;
            let mut args: Vec<u32> = Vec::with_capacity(rest.len());
            args.push((k + dj) as u32);
            args.extend(rest.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x));
            let c = double_factorial_odd(2 * k + 2 * dj + 1) / double_factorial_odd(2 * dj - 1);
            total += c * self.correlator(g, &args);
        }
        let half = Rational::new(1, 2);
        for a in 0..k {
            let b = k - 1 - a;
            let c = double_factorial_odd(2 * a + 1) * double_factorial_odd(2 * b + 1) * &half;
            let mut inner = Rational::zero();
            if g >= 1 {
                let mut args: Vec<u32> = Vec::with_capacity(rest.len() + 2);
                args.push(a as u32);
                args.push(b as u32);
                args.extend_from_slice(rest);
                inner += self.correlator(g - 1, &args);
            }
            let n = rest.len();
            for mask in 0u64..(1u64 << n) {
                let mut left = alloc::vec![a as u32];
                let mut right = alloc::vec![b as u32];
                for (i, &x) in rest.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(x);
                    } else {
                        right.push(x);
                    }
                }
                for g1 in 0..=g {
                    let l = self.correlator(g1, &left);
                    if l.is_zero() {
                        continue;
                    }
                    inner += l * self.correlator(g - g1, &right);
                }
            }
            total += c * inner;
        }
        total / double_factorial_odd(2 * k + 3)
    }
}

static ENGINE: Once<PsiEngine> = Once::new();

pub fn global_psi_engine() -> &'static PsiEngine {
    ENGINE.call_once(PsiEngine::new)
}

/// `⟨∏ τ_{d_i}⟩_g` for the trivial CohFT.
pub fn psi_correlator(g: u32, d: &[u32]) -> Rational {
    global_psi_engine().correlator(g, d)
}

/// Genus-0 closed form `(n−3)! / ∏ d_i!`; zero off the dimension constraint.
pub fn psi_correlator_genus0(d: &[u32]) -> Rational {
    let n = d.len();
    if n < 3 {
        return Rational::zero();
    }
    let s: usize = d.iter().map(|&x| x as usize).sum();
    if s != n - 3 {
        return Rational::zero();
    }
    let mut den = num_bigint::BigInt::from(1);
    for &x in d {
        den *= factorial(x);
    }
    Rational::from_big(factorial((n - 3) as u32), den)
}
