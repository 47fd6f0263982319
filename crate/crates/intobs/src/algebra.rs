//! Seeded property checks on random differential polynomials.
use intobs_core::correlators::{PsiObservable, TrivialCohft};
use intobs_core::diffpoly::{
    match_diffpoly, poisson_bracket, substitute_solution, DiffPoly, JetMonomial, LocalFunctional, MatchOptions,
    MetricEta, MiuraMap,
};
use intobs_core::exactnum::Rational;
use intobs_core::hierarchy::{SeriesBounds, TauData};
use intobs_core::Error;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub struct AlgebraOptions {
    pub seed: u64,
    pub count: usize,
    /// Truncation `ε^eps`; even.
    pub eps: u32,
}

impl Default for AlgebraOptions {
    fn default() -> Self {
        AlgebraOptions { seed: 0, count: 100, eps: 4 }
    }
}

#[derive(Debug, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub cases: usize,
    /// Indices of the failing cases.
    pub failures: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct AlgebraReport {
    pub seed: u64,
    pub count: usize,
    pub eps: u32,
    pub properties: Vec<PropertyResult>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.failures.is_empty())
    }
}

fn coeff(rng: &mut ChaCha8Rng) -> Rational {
    let c = rng.gen_range(1..=4i64);
    Rational::from(if rng.gen_bool(0.5) { c } else { -c })
}

/// One to three terms, each `ε^{0|2}` times one to three jets of order ≤ 3.
pub fn random_density(rng: &mut ChaCha8Rng, n_fields: u16, eps_max: u32) -> DiffPoly {
    let mut p = DiffPoly::zero(eps_max);
    for _ in 0..rng.gen_range(1..=3) {
        let e = if eps_max >= 2 && rng.gen_bool(0.5) { 2 } else { 0 };
        let k = rng.gen_range(1..=3);
        let f = (0..k).map(|_| (rng.gen_range(1..=n_fields), rng.gen_range(0..4u16))).collect();
        p.add_term(JetMonomial::new(e, f), coeff(rng));
    }
    p
}

/// One-field density with every term of `Σd − eps = grading`.
pub fn random_graded(rng: &mut ChaCha8Rng, grading: u32, eps_max: u32) -> DiffPoly {
    let mut p = DiffPoly::zero(eps_max);
    for _ in 0..rng.gen_range(1..=3) {
        let e = if eps_max >= 2 && rng.gen_bool(0.5) { 2 } else { 0 };
        let k = rng.gen_range(1..=3usize);
        let mut d = vec![0u16; k];
        for _ in 0..grading + e {
            d[rng.gen_range(0..k)] += 1;
        }
        p.add_term(JetMonomial::new(e, d.into_iter().map(|x| (1, x)).collect()), coeff(rng));
    }
    p
}

/// Runs δ∘∂_x = 0, bracket antisymmetry, Jacobi, Miura round trips and
/// match∘substitute on `count` seeded random inputs.
pub fn run_algebra_suite(opts: AlgebraOptions) -> Result<AlgebraReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let eps = opts.eps;
    let n = opts.count;
    let two: Vec<DiffPoly> = (0..n + 1).map(|_| random_density(&mut rng, 2, eps)).collect();
    let one: Vec<DiffPoly> = (0..n + 2).map(|_| random_density(&mut rng, 1, eps)).collect();
    let eta = MetricEta::identity(1);
    let mut props = Vec::new();

    let mut fails = Vec::new();
    for (i, p) in two[..n].iter().enumerate() {
        let dp = p.d_x();
        let ok = (1..=2).all(|a| dp.var_derivative(a).is_zero()) && LocalFunctional::new(dp).is_zero();
        if !ok {
            fails.push(i);
        }
    }
    props.push(PropertyResult { property: "var_derivative_of_d_x".into(), cases: n, failures: fails });

    let pb = |x: &LocalFunctional, y: &LocalFunctional| poisson_bracket(x, y, &eta);
    let lf = |p: &DiffPoly| LocalFunctional::new(p.clone());
    let mut fails = Vec::new();
    for i in 0..n {
        let (f, g) = (lf(&one[i]), lf(&one[i + 1]));
        let s = pb(&f, &g).normal_form().add(&pb(&g, &f).normal_form());
        if !LocalFunctional::new(s).is_zero() {
            fails.push(i);
        }
    }
    props.push(PropertyResult { property: "bracket_antisymmetry".into(), cases: n, failures: fails });

    let mut fails = Vec::new();
    for i in 0..n {
        let (f, g, h) = (lf(&one[i]), lf(&one[i + 1]), lf(&one[i + 2]));
        let sum = pb(&f, &pb(&g, &h))
            .normal_form()
            .add(&pb(&g, &pb(&h, &f)).normal_form())
            .add(&pb(&h, &pb(&f, &g)).normal_form());
        if !LocalFunctional::new(sum).is_zero() {
            fails.push(i);
        }
    }
    props.push(PropertyResult { property: "bracket_jacobi".into(), cases: n, failures: fails });

    let mut fails = Vec::new();
    for i in 0..n {
        let targets = vec![
            DiffPoly::jet(1, 0, eps).add(&two[i].d_x().shift_eps(2).truncate(eps)),
            DiffPoly::jet(2, 0, eps).add(&two[i + 1].shift_eps(2).truncate(eps)),
        ];
        let m = MiuraMap::second_kind(targets)?;
        let inv = m.invert()?;
        if !(m.then(&inv).is_identity() && inv.then(&m).is_identity()) {
            fails.push(i);
        }
    }
    props.push(PropertyResult { property: "miura_round_trip".into(), cases: n, failures: fails });

    let tau = TauData::build(&PsiObservable, &TrivialCohft::default(), SeriesBounds::new(2, 6))?;
    let mut fails = Vec::new();
    for i in 0..n {
        let grading = rng.gen_range(0..=2u32);
        let p = random_graded(&mut rng, grading, 2);
        let s = substitute_solution(&p, &tau.w_top)?;
        let mo = MatchOptions { grading: grading.into(), n_fields: 1, max_factors: 3, full: false };
        match match_diffpoly(&s, &tau.w_top, mo) {
            Ok(q) if q == p => {}
            _ => fails.push(i),
        }
    }
    props.push(PropertyResult { property: "match_after_substitute".into(), cases: n, failures: fails });

    Ok(AlgebraReport { seed: opts.seed, count: n, eps, properties: props })
}
