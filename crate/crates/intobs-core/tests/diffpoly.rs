use intobs_core::correlators::{PsiObservable, TrivialCohft};
use intobs_core::diffpoly::*;
use intobs_core::exactnum::Rational;
use intobs_core::hierarchy::{SeriesBounds, TauData};
use proptest::prelude::*;

const EPS: u32 = 4;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Random density in two fields, jets of order ≤ 3, up to three factors.
fn density(n_fields: u16) -> impl Strategy<Value = DiffPoly> {
    let jet = (1..=n_fields, 0u16..4);
    let mono = (prop_oneof![Just(0u32), Just(2u32)], proptest::collection::vec(jet, 1..4));
    proptest::collection::vec((mono, -4i64..5), 1..4).prop_map(|terms| {
        let mut p = DiffPoly::zero(EPS);
        for ((e, f), c) in terms {
            p.add_term(JetMonomial::new(e, f), q(c, 1));
        }
        p
    })
}

#[test]
fn total_derivatives_vanish_in_normal_form() {
    let w = |d| DiffPoly::jet(1, d, EPS);
    let f = LocalFunctional::new(w(0).mul(&w(2)));
    let g = LocalFunctional::new(w(1).mul(&w(1)).neg());
    assert!(f.equals(&g));
    assert!(!LocalFunctional::new(w(0).mul(&w(0))).is_zero());
    assert!(!LocalFunctional::new(DiffPoly::constant(q(1, 1), EPS)).is_zero());
}

#[test]
fn kdv_bracket_is_nonzero_for_non_conserved_pair() {
    let w = |d| DiffPoly::jet(1, d, EPS);
    let eta = MetricEta::identity(1);
    // ∫ w w_1 w_1 is not in involution with ∫ w^3
    let f = LocalFunctional::new(w(0).mul(&w(1)).mul(&w(1)));
    let g = LocalFunctional::new(w(0).mul(&w(0)).mul(&w(0)));
    assert!(!poisson_bracket(&f, &g, &eta).is_zero());
}

#[test]
fn matching_recovers_polynomials_along_topological_solution() {
    let tau = TauData::build(&PsiObservable, &TrivialCohft::default(), SeriesBounds::new(2, 6)).unwrap();
    let w = |d| DiffPoly::jet(1, d, 2);
    let cases = [
        (w(0).mul(&w(0)).scale(&q(1, 2)).add(&w(2).shift_eps(2).scale(&q(1, 12))), 0),
        (w(0).mul(&w(1)).add(&w(3).shift_eps(2).scale(&q(-3, 5))), 1),
        (w(1).mul(&w(1)).add(&w(0).mul(&w(2)).scale(&q(2, 1))), 2),
    ];
    for (p, grading) in cases {
        let s = substitute_solution(&p, &tau.w_top).unwrap();
        let opts = MatchOptions { grading, n_fields: 1, max_factors: 3, full: false };
        assert_eq!(match_diffpoly(&s, &tau.w_top, opts).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn variational_derivative_kills_total_derivatives(p in density(2)) {
        let dp = p.d_x();
        for a in 1..=2 {
            prop_assert!(dp.var_derivative(a).is_zero());
        }
        let f = LocalFunctional::new(dp);
        prop_assert!(f.is_zero());
        prop_assert!(f.is_zero_variational());
    }

    #[test]
    fn normal_form_tests_agree(p in density(2)) {
        let f = LocalFunctional::new(p.clone());
        prop_assert_eq!(f.is_zero(), f.is_zero_variational());
        // the normal form represents the same functional
        let nf = LocalFunctional::new(f.normal_form());
        prop_assert!(nf.equals(&f));
    }

    #[test]
    fn d_x_is_a_derivation(a in density(2), b in density(2)) {
        prop_assert_eq!(a.mul(&b).d_x(), a.d_x().mul(&b).add(&a.mul(&b.d_x())));
        let flux = [a.clone(), b.clone()];
        prop_assert_eq!(evolve(&a.mul(&b), &flux), evolve(&a, &flux).mul(&b).add(&a.mul(&evolve(&b, &flux))));
        prop_assert_eq!(evolve(&a.d_x(), &flux), evolve(&a, &flux).d_x());
    }

    #[test]
    fn bracket_antisymmetric(a in density(1), b in density(1)) {
        let eta = MetricEta::identity(1);
        let (f, g) = (LocalFunctional::new(a), LocalFunctional::new(b));
        let s = LocalFunctional::new(poisson_bracket(&f, &g, &eta).normal_form().add(&poisson_bracket(&g, &f, &eta).normal_form()));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn miura_round_trip(r in density(2), s in density(2)) {
        let targets = vec![
            DiffPoly::jet(1, 0, EPS).add(&r.d_x().shift_eps(2).truncate(EPS)),
            DiffPoly::jet(2, 0, EPS).add(&s.shift_eps(2).truncate(EPS)),
        ];
        let m = MiuraMap::second_kind(targets).unwrap();
        let inv = m.invert().unwrap();
        prop_assert!(m.then(&inv).is_identity());
        prop_assert!(inv.then(&m).is_identity());
        let mut bad = inv.clone();
        bad.targets[0] = bad.targets[0].add(&DiffPoly::jet(1, 2, EPS).shift_eps(2));
        prop_assert!(!m.then(&bad).is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bracket_jacobi(a in density(1), b in density(1), c in density(1)) {
        let eta = MetricEta::identity(1);
        let trunc = |p: DiffPoly| LocalFunctional::new(p.truncate(2));
        let (f, g, h) = (trunc(a), trunc(b), trunc(c));
        let pb = |x: &LocalFunctional, y: &LocalFunctional| poisson_bracket(x, y, &eta);
        let sum = pb(&f, &pb(&g, &h)).normal_form()
            .add(&pb(&g, &pb(&h, &f)).normal_form())
            .add(&pb(&h, &pb(&f, &g)).normal_form());
        prop_assert!(LocalFunctional::new(sum).is_zero());
    }
}
