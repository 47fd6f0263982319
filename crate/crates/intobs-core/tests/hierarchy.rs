use std::sync::Arc;

use intobs_core::correlators::*;
use intobs_core::diffpoly::*;
use intobs_core::exactnum::Rational;
use intobs_core::hierarchy::*;
use intobs_core::trees::Context;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn w(d: u16) -> DiffPoly {
    DiffPoly::jet(1, d, 4)
}

fn kdv_r11() -> DiffPoly {
    w(0).mul(&w(0)).scale(&r(1, 2)).add(&w(2).shift_eps(2).scale(&r(1, 12)))
}

fn kdv_r12() -> DiffPoly {
    let u = w(0);
    u.mul(&u).mul(&u).scale(&r(1, 6))
        .add(&u.mul(&w(2)).shift_eps(2).scale(&r(1, 12)))
        .add(&w(1).mul(&w(1)).shift_eps(2).scale(&r(1, 24)))
        .add(&w(4).shift_eps(4).scale(&r(1, 240)))
}

#[test]
fn kdv_demo_flux_and_equation() {
    let k = kdv_demo().unwrap();
    assert_eq!(k.flux_line(), "1/2*(w[1,0])^2 + 1/12*eps^2*w[1,2]");
    assert_eq!(k.equation_line(), "d/dt[1,1] w[1,0] = w[1,0]*w[1,1] + 1/12*eps^2*w[1,3]");
    assert_eq!(k.integrals[0].value, r(1, 1));
    assert_eq!(k.integrals[1].value, r(1, 12));
}

#[test]
fn tree_and_series_fluxes_agree() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let builder = FluxBuilder::new(Context::new(&obs, &cohft), 4);
    let tau = TauData::build(&obs, &cohft, SeriesBounds::new(4, 7)).unwrap();
    let set = builder.flux_set(3, Some(&tau)).unwrap();
    assert_eq!(set[&(1, 0)][0], w(0));
    assert_eq!(set[&(1, 1)][0], kdv_r11());
    assert_eq!(set[&(1, 2)][0], kdv_r12());
    // substituting the topological solution reproduces the stored derivatives
    for p in 0..=3u32 {
        let lhs = substitute_solution(&set[&(1, p)][0], &tau.w_top).unwrap();
        let rhs = &tau.flux_series(cohft.eta(), 1, p)[0];
        let cap = 4 - p;
        assert_eq!(lhs.filter_level(cap).truncate(4, 4), rhs.filter_level(cap).truncate(4, 4));
    }
}

#[test]
fn tau_function_string_and_dilaton() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let tau = TauData::build(&obs, &cohft, SeriesBounds::new(4, 6)).unwrap();
    assert_eq!(tau.f.coeff(0, &[(1, 0), (1, 0), (1, 0)]), r(1, 6));
    assert_eq!(tau.f.coeff(2, &[(1, 1)]), r(1, 24));
    assert!(tau.string_residual(cohft.eta()).is_zero());
    assert!(tau.dilaton_residual().is_zero());
    // w_top restricted to t^{*,>=1} = 0 is t^{1,0}
    let w0 = tau.w_top[0].restrict(|t| t.1 >= 1);
    let mut expect = FormalSeries::zero(4, 8);
    expect.add_term(0, vec![(1, 0)], r(1, 1));
    assert_eq!(w0.truncate(4, 3), expect.truncate(4, 3));
}

#[test]
fn hamiltonians_and_their_brackets() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let builder = FluxBuilder::new(Context::new(&obs, &cohft), 4);
    let h0 = builder.hamiltonian(1, 0).unwrap();
    assert_eq!(h0, kdv_r11());
    let h1 = builder.hamiltonian(1, 1).unwrap();
    let eta = MetricEta::identity(1);
    let b = poisson_bracket(&LocalFunctional::new(h0.clone()), &LocalFunctional::new(h1.clone()), &eta);
    assert!(b.is_zero());
    // δh_{1,p}/δw = R_{1,p}
    assert_eq!(LocalFunctional::new(h0).var_derivative(1), w(0));
    assert_eq!(LocalFunctional::new(h1).var_derivative(1).truncate(2), kdv_r11().truncate(2));
}

#[test]
fn kdv_flows_commute_and_control_fails() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let builder = FluxBuilder::new(Context::new(&obs, &cohft), 4);
    let mut set = builder.flux_set(2, None).unwrap();
    let pairs = [((1, 1), (1, 2)), ((1, 0), (1, 1)), ((1, 0), (1, 2))];
    let rep = check_commutation(&set, &pairs, 4).unwrap();
    assert!(rep.iter().all(|e| e.commute), "{rep:?}");
    let bad = w(0).mul(&w(0)).scale(&r(1, 2)).add(&w(2).shift_eps(2).scale(&r(1, 13)));
    set.insert((1, 1), vec![bad]);
    let rep = check_commutation(&set, &pairs[..1], 4).unwrap();
    assert!(!rep[0].commute);
}

/// `λ_1 DR_1(−a, 0, a)` against `ψ_2` on M̄_{1,3}: `a²/12`, from Hain's formula.
fn genus1_q_table() -> CorrelatorTable {
    let mut t = CorrelatorTable::trivial(TableKind::DrD);
    for (k, v) in [(0, r(0, 1)), (1, r(0, 1)), (2, r(-1, 12))] {
        let key = CorrelatorKey { g: 1, fields: vec![1, 1, 1], psi: vec![1, 0, 0], class: ClassTag::DrD(vec![0, k]) };
        t.insert(key, v).unwrap();
    }
    t
}

#[test]
fn dr_fluxes() {
    let cohft = TrivialCohft::default();
    let q = dr_flux(&cohft, None, 1, 1, 0, 8).unwrap();
    assert_eq!(q[0], w(0).mul(&w(0)).scale(&r(1, 2)).truncate(0));
    let h = dr_hamiltonian(&cohft, None, 1, 0, 0, 8).unwrap();
    assert_eq!(h, q[0]);
    assert!(matches!(dr_flux(&cohft, None, 1, 1, 2, 8), Err(intobs_core::Error::TableRequired(_))));
    let t = genus1_q_table();
    let q = dr_flux(&cohft, Some(&t), 1, 1, 2, 8).unwrap();
    assert_eq!(q[0], kdv_r11().truncate(2));
}

#[test]
fn miura_maps_for_psi_are_identities() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let builder = FluxBuilder::new(Context::new(&obs, &cohft), 4);
    assert!(builder.miura_to_dr().unwrap().is_identity());
    assert!(builder.normal_generator().unwrap().is_zero());
    assert!(builder.normal_miura().unwrap().is_identity());
}

#[test]
fn vector_potential_two_ways() {
    let (obs, cohft) = (PsiObservable, TrivialCohft::default());
    let bounds = SeriesBounds::new(2, 4);
    let x = vector_potential(&obs, &cohft, bounds).unwrap();
    let table = FcohftView::new(&cohft).to_table(1, bounds.max_points).unwrap();
    let y = vector_potential_table(&table, bounds).unwrap();
    assert_eq!(x, y);
    let tau = TauData::build(&obs, &cohft, bounds).unwrap();
    let d = tau.f.derivative((1, 0));
    let cap = bounds.level_max;
    assert_eq!(d.filter_level(cap).truncate(2, 4), x[0].filter_level(cap).truncate(2, 4));
}

fn psi_obs_table(ranges: &[(u32, usize)]) -> CorrelatorTable {
    let mut t = CorrelatorTable::new(TableKind::ObsO, MetricEta::identity(1));
    for &(g, n_max) in ranges {
        for n in 1..=n_max {
            if 2 * g as i64 - 2 + n as i64 <= 0 {
                continue;
            }
            let dim = 3 * g as i64 - 3 + n as i64;
            for exps in all_vectors(n, dim as u32) {
                let v = psi_correlator(g, &exps);
                let key = CorrelatorKey { g, fields: vec![1; n], psi: vec![0; n], class: ClassTag::ObsO(exps) };
                t.insert(key, v).unwrap();
            }
            t.declare_complete(g, n);
        }
    }
    t
}

fn all_vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=max - used).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn dispersionless_limit_is_universal() {
    let mut t = psi_obs_table(&[(0, 6), (1, 3)]);
    // shift a genus-1 value: the observable differs from Ψ away from genus 0
    let key = CorrelatorKey { g: 1, fields: vec![1, 1, 1], psi: vec![0, 0, 0], class: ClassTag::ObsO(vec![2, 1, 0]) };
    let mut shifted = CorrelatorTable::new(TableKind::ObsO, MetricEta::identity(1));
    for (k, v) in t.entries() {
        let v = if k.canonical(false) == key.canonical(false) { v + r(1, 1) } else { v.clone() };
        shifted.insert(k.clone(), v).unwrap();
    }
    for (g, n) in t.complete_pairs().copied().collect::<Vec<_>>() {
        shifted.declare_complete(g, n);
    }
    t = shifted;
    let table_obs = TableObservable::new(Arc::new(t)).unwrap();
    let cohft = TrivialCohft::default();
    let a = FluxBuilder::new(Context::new(&PsiObservable, &cohft), 0);
    let b = FluxBuilder::new(Context::new(&table_obs, &cohft), 0);
    for p in 0..=3 {
        assert_eq!(a.flux(1, p).unwrap(), b.flux(1, p).unwrap());
    }
    let a2 = FluxBuilder::new(Context::new(&PsiObservable, &cohft), 2);
    let b2 = FluxBuilder::new(Context::new(&table_obs, &cohft), 2);
    assert_ne!(a2.flux(1, 1).unwrap(), b2.flux(1, 1).unwrap());
}

#[test]
fn hodge_demo_values() {
    let one = hodge_demo(1).unwrap();
    assert!(one.vanishes);
    assert_eq!(one.lambda_123_psi, r(1, 362880));
    assert_eq!(one.bernoulli_value, r(1, 362880));
    assert_eq!(one.lambda2_cubed, r(1, 725760));
    assert_eq!(hodge_demo(2).unwrap().coefficient.to_string(), "(x1^2*x2 + x1*x2^2)/362880");
    let three = hodge_demo(3).unwrap();
    assert_eq!(three.coefficient.coeff(&[1, 1, 1]), r(2, 362880));
    assert_eq!(three.coefficient.coeff(&[0, 2, 1]), r(1, 362880));
    assert!(!three.vanishes);
}
