use intobs_core::exactnum::Rational;
use intobs_core::piident::*;
use intobs_core::trees::Status;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ring(n: usize) -> CoeffRing {
    CoeffRing::new(n, 2, BernoulliTable::standard(14))
}

#[test]
fn exponent_coefficients() {
    let r = ring(3);
    let f = build_f_exponent(&r, 1, 1);
    let s = r.linear(&LinForm::total(3, 1));
    // −(𝐚+b)/2 · B_2 κ_1
    assert_eq!(f.coeff(&Generator::Kappa(1)).unwrap(), &s.scale(&q(-1, 12)));
    // +(𝐚+b)/2 · B_2(𝐚/(𝐚+b)) ψ_{n+1}
    let b2 = r.bernoulli_at(2, &LinForm::total(3, 0));
    assert_eq!(f.coeff(&Generator::Psi { i: 4, k: 1 }).unwrap(), &s.mul(&b2).scale(&q(1, 2)));
}

#[test]
fn p_and_q_coefficients() {
    let r = ring(3);
    let pq = build_pq(&r, 2, 1);
    let k0 = r.constant(q(1, 6)).sub(&r.bernoulli_at(2, &LinForm::total(3, 0)));
    assert_eq!(pq.p.coeff(&Generator::Kappa(0)).unwrap(), &k0);
    // B_2 − B_2(1) = 0 at b = 0
    assert!(r.taylor(&k0, 0).is_zero());
    for m in 1..=5u32 {
        let qm = build_q(&r, 2, m);
        let abar = r.linear(&LinForm::total(3, 0));
        let expect = abar.scale(&intobs_core::exactnum::bernoulli_number(m as usize + 1));
        if expect.is_zero() {
            assert!(qm.coeff(&Generator::Kappa(m)).is_none());
        } else {
            assert_eq!(qm.coeff(&Generator::Kappa(m)).unwrap(), &expect);
        }
    }
    let p2 = build_p(&r, 2, 2);
    let psi = r
        .bernoulli_at(3, &LinForm::complement(3, &[2], 0))
        .sub(&r.bernoulli_at(3, &LinForm::complement(3, &[2], 1)));
    assert_eq!(p2.coeff(&Generator::Psi { i: 2, k: 1 }).unwrap(), &psi);
}

#[test]
fn identities_hold_in_example_range() {
    let r = verify_dilaton_identities(2, 3, 6, &PiOptions::default()).unwrap();
    assert!(r.passed());
    for id in ["i", "ii", "iii", "iv"] {
        assert!(r.entries.iter().any(|e| e.identity == id), "{id}");
    }
    // boundary generators are checked one by one
    assert!(r.entries.iter().any(|e| e.generator.starts_with("xi[g1=1,I={1,3}]")));
}

#[test]
fn full_acceptance_range() {
    let reports = verify_range(5, 6, 8, &PiOptions::default()).unwrap();
    assert_eq!(reports.len(), 6 * 6 - 2);
    assert!(reports.iter().all(PiReport::passed));
}

#[test]
fn transcription_matches_direct_pushforward() {
    let opts = PiOptions { perturb: None, pushforward: true };
    for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 3), (2, 2)] {
        let r = verify_dilaton_identities(g, n, 5, &opts).unwrap();
        let checked = r.entries.iter().filter(|e| e.identity.starts_with("pushforward")).count();
        assert!(checked > 0);
        assert!(r.passed(), "{:?}", r.failures().next());
    }
}

#[test]
fn pushforward_of_whole_exponent() {
    let r = ring(2);
    let (g, m_max) = (1, 4);
    let lhs = pushforward(&build_f_exponent(&r, g, m_max));
    let mut rhs = FormalClass::new(g, 2);
    for m in 1..=m_max {
        let sign = if m % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        let pre = r.s_power(m).scale(&(sign / Rational::from(m as i64 * (m as i64 + 1))));
        for (x, c) in build_p(&r, g, m).terms {
            rhs.add(x, c.mul(&pre));
        }
    }
    assert!(lhs.sub(&rhs).terms.is_empty());
}

#[test]
fn perturbed_bernoulli_number_fails() {
    let opts = PiOptions { perturb: Some((2, q(1, 7))), pushforward: false };
    let r = verify_dilaton_identities(1, 2, 4, &opts).unwrap();
    assert!(!r.passed());
    let bad: Vec<_> = r.failures().collect();
    assert!(bad.iter().any(|e| e.identity == "ii" && e.generator == "kappa_1"));
    assert!(bad.iter().all(|e| e.status == Status::Fail && e.residual != "0"));
}

#[test]
fn boundary_weight_needs_matching_bernoulli_index() {
    // B_m((a_I+b)/(𝐚+b)) − B_{m+1}(a_I/(𝐚+b)) does not vanish at b = 0
    let r = CoeffRing::split(4, &[1, 3], 1, BernoulliTable::standard(10));
    let f = |k, b| r.bernoulli_at(k, &LinForm::subset(4, &[1, 3], b));
    let m = 3;
    assert!(!r.taylor(&f(m, 1).sub(&f(m + 1, 0)), 0).is_zero());
    assert!(r.taylor(&f(m + 1, 1).sub(&f(m + 1, 0)), 0).is_zero());
}

#[test]
fn invalid_arguments() {
    assert!(verify_dilaton_identities(0, 2, 3, &PiOptions::default()).is_err());
    assert!(verify_dilaton_identities(1, 0, 3, &PiOptions::default()).is_err());
    assert!(verify_dilaton_identities(1, 1, 0, &PiOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identities_hold_for_random_moduli(g in 0u32..6, n in 1usize..7, m in 1u32..6) {
        prop_assume!(2 * g as i64 - 2 + n as i64 > 0);
        let r = verify_dilaton_identities(g, n, m, &PiOptions::default()).unwrap();
        prop_assert!(r.passed());
    }

    #[test]
    fn split_and_full_rings_agree_at_b0(m in 1u32..6, side in proptest::collection::btree_set(1u16..5, 1..4)) {
        // the same coefficient computed with all a_i and with y = a_I, compared at a_i = i
        let side: Vec<u16> = side.into_iter().collect();
        let full = CoeffRing::new(4, 1, BernoulliTable::standard(10));
        let split = CoeffRing::split(4, &side, 1, BernoulliTable::standard(10));
        let x = Generator::Boundary { g1: 1, side: side.clone(), k: m };
        let point: Vec<Rational> = vec![q(1, 1), q(2, 1), q(3, 1), q(10, 1)];
        let y: Rational = side.iter().map(|&i| q(i as i64, 1)).sum();
        let a = q(10, 1);
        let ev_full = |c: &BSeries| { let l = c.part(0); l.numerator().eval(&point) / a.pow(l.denominator_power() as i32) };
        let ev_split = |c: &BSeries| { let l = c.part(0); l.numerator().eval(&[y.clone(), a.clone()]) / a.pow(l.denominator_power() as i32) };
        prop_assert_eq!(ev_full(&q_coeff(&full, m, &x)), ev_split(&q_coeff(&split, m, &x)));
        prop_assert_eq!(ev_full(&full.taylor(&p_coeff(&full, m + 1, &x), 1)), ev_split(&split.taylor(&p_coeff(&split, m + 1, &x), 1)));
    }
}
