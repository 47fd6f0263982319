//! Bernoulli-polynomial identities behind the dilaton equation for the Π classes.
//!
//! Coefficients live in `Q[a_1..a_n, b][(𝐚+b)^{-1}]`, expanded to a fixed order in `b`.

mod class;
mod ring;

pub use class::{
    boundary_splits, build_f_exponent, build_p, build_pq, build_q, f_bracket, generator_side, p_coeff, p_generators,
    pushforward, pushforward_on_tail, q_coeff, q_generators, FormalClass, Generator, PmQm,
};
pub use ring::{BSeries, BernoulliTable, CoeffRing, Embedding, Laurent, LinForm};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::exactnum::Rational;
use crate::trees::Status;
use crate::Error;

#[derive(Clone, Debug, Default)]
pub struct PiOptions {
    /// Shift `B_j` by the given amount everywhere (negative control).
    pub perturb: Option<(usize, Rational)>,
    /// Also compare the transcribed `P_m`, `Q_m` with the direct pushforward of `f`.
    pub pushforward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiEntry {
    pub identity: String,
    pub m: u32,
    pub generator: String,
    pub status: Status,
    pub residual: String,
}

#[derive(Clone, Debug)]
pub struct PiReport {
    pub g: u32,
    pub n: usize,
    pub m_max: u32,
    pub entries: Vec<PiEntry>,
}

impl PiReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PiEntry> {
        self.entries.iter().filter(|e| e.status != Status::Pass)
    }
}

/// Record `lhs = rhs` generator by generator.
fn compare(out: &mut Vec<PiEntry>, identity: &str, m: u32, lhs: &FormalClass, rhs: &FormalClass) {
    let diff = lhs.sub(rhs);
    let mut gens: Vec<&Generator> = lhs.terms.keys().chain(rhs.terms.keys()).collect();
    gens.sort();
    gens.dedup();
    for x in gens {
        let (status, residual) = match diff.coeff(x) {
            None => (Status::Pass, String::from("0")),
            Some(r) => (Status::Fail, r.describe()),
        };
        out.push(PiEntry { identity: identity.to_string(), m, generator: x.to_string(), status, residual });
    }
    // a generator present on neither side still has to appear if the identity fails there
    for (x, r) in &diff.terms {
        if !lhs.terms.contains_key(x) && !rhs.terms.contains_key(x) {
            out.push(PiEntry {
                identity: identity.to_string(),
                m,
                generator: x.to_string(),
                status: Status::Fail,
                residual: r.describe(),
            });
        }
    }
}

fn record(out: &mut Vec<PiEntry>, identity: &str, m: u32, x: &Generator, diff: &BSeries) {
    let (status, residual) = if diff.is_zero() { (Status::Pass, String::from("0")) } else { (Status::Fail, diff.describe()) };
    out.push(PiEntry { identity: identity.to_string(), m, generator: x.to_string(), status, residual });
}

/// Checks, for `1 ≤ m ≤ m_max`: (i) `∂_b P_1|₀ = 2g/𝐚`, (ii) `P_m|₀ = 0`, (iii) `∂_b Q_m|₀ = 0` and
/// (iv) `∂_b P_{m+1}|₀ = (m+2)/𝐚² · Q_m|₀`, with `κ_0 = 2g−2+n`.
///
/// `P_1` mixes all weights through `κ_0` and is handled in the full ring; every other
/// coefficient depends on one `a_I` and is checked in `Q[a_I, 𝐚]`.
pub fn verify_dilaton_identities(g: u32, n: usize, m_max: u32, opts: &PiOptions) -> Result<PiReport, Error> {
    if n == 0 || 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::InvalidArgument(format!("M_{{{g},{n}}} needs n ≥ 1 and 2g−2+n > 0")));
    }
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    let top = m_max as usize + 3;
    let bern = match &opts.perturb {
        Some((j, d)) => BernoulliTable::perturbed(top, *j, d.clone()),
        None => BernoulliTable::standard(top),
    };
    let mut entries = Vec::new();

    let full = CoeffRing::new(n, 1, bern.clone());
    let p1 = build_p(&full, g, 1).with_kappa0();
    let mut target = FormalClass::new(g, n);
    target.add(Generator::One, full.over_a(Rational::from(2 * g as i64), 1));
    compare(&mut entries, "i", 1, &p1.map_coeffs(|c| full.taylor(c, 1)), &target);
    compare(&mut entries, "ii", 1, &p1.map_coeffs(|c| full.taylor(c, 0)), &FormalClass::new(g, n));

    // coefficients do not depend on the genus split, so residuals are shared across g1
    let mut rings: BTreeMap<Vec<u16>, CoeffRing> = BTreeMap::new();
    let mut cache: BTreeMap<(u8, u32, Generator), BSeries> = BTreeMap::new();
    let strip = |x: &Generator| match x {
        Generator::Boundary { side, k, .. } => Generator::Boundary { g1: 0, side: side.clone(), k: *k },
        x => x.clone(),
    };
    for m in 1..=m_max {
        if m >= 2 {
            for x in p_generators(g, n, m) {
                let d = cache.entry((0, m, strip(&x))).or_insert_with(|| {
                    let ring = rings.entry(generator_side(&x)).or_insert_with_key(|s| CoeffRing::split(n, s, 1, bern.clone()));
                    ring.taylor(&p_coeff(ring, m, &x), 0)
                });
                record(&mut entries, "ii", m, &x, d);
            }
        }
        for x in q_generators(g, n, m) {
            let key = strip(&x);
            if !cache.contains_key(&(1, m, key.clone())) {
                let ring = rings.entry(generator_side(&x)).or_insert_with_key(|s| CoeffRing::split(n, s, 1, bern.clone()));
                let q = q_coeff(ring, m, &x);
                let rhs = ring.taylor(&q, 0).mul(&ring.over_a(Rational::from(m as i64 + 2), 2));
                let lhs = ring.taylor(&p_coeff(ring, m + 1, &x), 1);
                cache.insert((1, m, key.clone()), ring.taylor(&q, 1));
                cache.insert((2, m, key.clone()), lhs.sub(&rhs));
            }
            record(&mut entries, "iii", m, &x, &cache[&(1, m, key.clone())]);
            record(&mut entries, "iv", m, &x, &cache[&(2, m, key)]);
        }
    }

    if opts.pushforward {
        let ring = CoeffRing::new(n, 2, bern);
        for m in 1..=m_max {
            let f = f_bracket(&ring, g, m);
            compare(&mut entries, "pushforward-P", m, &build_p(&ring, g, m), &pushforward(&f));
            let mut tails = FormalClass::new(g, n);
            for i in 1..=n as u16 {
                let ai = ring.linear(&LinForm::subset(n, &[i], 0));
                for (x, c) in pushforward_on_tail(&f, i).terms {
                    tails.add(x, c.mul(&ai));
                }
            }
            compare(&mut entries, "pushforward-Q", m, &build_q(&ring, g, m), &tails);
        }
    }
    Ok(PiReport { g, n, m_max, entries })
}

/// Runs [`verify_dilaton_identities`] over every stable `(g, n)` in the given ranges.
pub fn verify_range(g_max: u32, n_max: usize, m_max: u32, opts: &PiOptions) -> Result<Vec<PiReport>, Error> {
    let mut pairs = Vec::new();
    for g in 0..=g_max {
        for n in 1..=n_max {
            if 2 * g as i64 - 2 + n as i64 > 0 {
                pairs.push((g, n));
            }
        }
    }
    crate::par::try_map(&pairs, |&(g, n)| verify_dilaton_identities(g, n, m_max, opts))
}
