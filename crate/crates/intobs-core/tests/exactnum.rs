use intobs_core::exactnum::*;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| q(n, d))
}

fn small_poly(vars: VarSet) -> impl Strategy<Value = MultiPoly> {
    let n = vars.len();
    proptest::collection::vec((proptest::collection::vec(0u32..3, n), -5i64..6), 0..5).prop_map(move |terms| {
        let mut p = MultiPoly::zero(&vars);
        for (e, c) in terms {
            p.add_term(e, q(c, 1));
        }
        p
    })
}

#[test]
fn bernoulli_numbers() {
    let expect = [q(1, 1), q(-1, 2), q(1, 6), q(0, 1), q(-1, 30), q(0, 1), q(1, 42), q(0, 1), q(-1, 30)];
    for (m, b) in expect.iter().enumerate() {
        assert_eq!(&bernoulli_number(m), b, "B_{m}");
    }
    assert_eq!(bernoulli_number(12), q(-691, 2730));
    // outside the cached range
    assert_eq!(bernoulli_number(DEFAULT_BERNOULLI_BOUND + 2).is_zero(), DEFAULT_BERNOULLI_BOUND % 2 == 1);
}

#[test]
fn rational_parse_and_display() {
    assert_eq!("6/-4".parse::<Rational>().unwrap(), q(-3, 2));
    assert_eq!(q(-3, 2).to_string(), "-3/2");
    assert_eq!(q(4, 2).to_string(), "2");
    assert!("1/0".parse::<Rational>().is_err());
    assert!("x".parse::<Rational>().is_err());
}

#[test]
fn multinomials() {
    assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), q(12, 1));
    assert!(multinomial(4, &[2, 1]).is_err());
    assert_eq!(Rational::from(binomial(10, 3)), q(120, 1));
}

proptest! {
    #[test]
    fn rational_field_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip(), Rational::one());
        }
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn bernoulli_difference_and_reflection(m in 1usize..14, x in small_rational()) {
        let one = Rational::one();
        let lhs = bernoulli_poly(m, &(&x + &one)) - bernoulli_poly(m, &x);
        prop_assert_eq!(lhs, Rational::from(m as i64) * x.pow(m as i32 - 1));
        let sign = if m % 2 == 0 { one.clone() } else { -one.clone() };
        prop_assert_eq!(bernoulli_poly(m, &(&one - &x)), sign * bernoulli_poly(m, &x));
    }

    #[test]
    fn homogenized_bernoulli_matches_scalar(m in 0usize..10, x in small_rational(), s in 1i64..7) {
        let vars = VarSet::new(&["x", "s"]);
        let h = bernoulli_poly_homogenized(m, &MultiPoly::var(&vars, 0), &MultiPoly::var(&vars, 1));
        let s = q(s, 1);
        let val = h.eval(&[x.clone(), s.clone()]);
        prop_assert_eq!(val, s.pow(m as i32) * bernoulli_poly(m, &(&x / &s)));
    }

    #[test]
    fn polynomial_ring_laws(
        (a, b, c) in {
            let v = VarSet::indexed("x", 3);
            (small_poly(v.clone()), small_poly(v.clone()), small_poly(v))
        },
        pt in proptest::collection::vec(small_rational(), 3),
    ) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
        // Leibniz
        let d = |p: &MultiPoly| p.derivative(1);
        prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
        prop_assert_eq!(a.pow(2), &a * &a);
    }

    #[test]
    fn compose_is_evaluation(
        a in small_poly(VarSet::indexed("x", 2)),
        pt in proptest::collection::vec(small_rational(), 1),
    ) {
        let y = VarSet::indexed("y", 1);
        let images = [MultiPoly::var(&y, 0).pow(2), &MultiPoly::var(&y, 0) + &MultiPoly::one(&y)];
        let c = a.compose(&images, &y);
        let t = &pt[0];
        prop_assert_eq!(c.eval(&pt), a.eval(&[t * t, t + &Rational::one()]));
    }
}
