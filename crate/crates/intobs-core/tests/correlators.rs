use intobs_core::correlators::*;
use intobs_core::exactnum::Rational;
use intobs_core::Error;
use std::sync::Arc;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn psi_goldens() {
    assert_eq!(psi_correlator(0, &[0, 0, 0]), r(1, 1));
    assert_eq!(psi_correlator(1, &[1]), r(1, 24));
    assert_eq!(psi_correlator(0, &[0, 0, 1, 0]), r(1, 1));
    assert_eq!(psi_correlator(1, &[2, 1, 0]), r(1, 12));
    assert_eq!(psi_correlator(2, &[4]), r(1, 1152));
    assert_eq!(psi_correlator(3, &[7]), r(1, 82944));
    assert_eq!(psi_correlator(2, &[2, 3]), r(29, 5760));
    assert_eq!(psi_correlator(1, &[1, 1]), r(1, 24));
}

#[test]
fn dimension_vanishing() {
    assert!(psi_correlator(1, &[0]).is_zero());
    assert!(psi_correlator(0, &[1, 0, 0]).is_zero());
    assert!(psi_correlator(2, &[1, 1, 1]).is_zero());
}

fn keys(g: u32, n: usize) -> Vec<Vec<u32>> {
    let dim = 3 * g as i64 - 3 + n as i64;
    if dim < 0 {
        return vec![];
    }
    let mut out = vec![vec![]];
    for i in 0..n {
        let mut next = vec![];
        for v in out {
            let used: u32 = v.iter().sum();
            let left = dim as u32 - used;
            if i + 1 == n {
                let mut w = v.clone();
                w.push(left);
                next.push(w);
            } else {
                for k in 0..=left {
                    let mut w = v.clone();
                    w.push(k);
                    next.push(w);
                }
            }
        }
        out = next;
    }
    out
}

#[test]
fn string_and_dilaton_up_to_genus_3() {
    for g in 0..=3u32 {
        for n in 1..=5usize {
            if 2 * g as i64 - 2 + n as i64 <= 0 {
                continue;
            }
            for d in keys(g, n) {
                let mut with0 = d.clone();
                with0.push(0);
                let mut expected = Rational::zero();
                for j in 0..n {
                    if d[j] > 0 {
                        let mut e = d.clone();
                        e[j] -= 1;
                        expected += psi_correlator(g, &e);
                    }
                }
                assert_eq!(psi_correlator(g, &with0), expected, "string at g={g} d={d:?}");
            }
            for d in keys(g, n) {
                let mut with1 = d.clone();
                with1.push(1);
                let factor = Rational::from(2 * g as i64 - 2 + n as i64);
                assert_eq!(psi_correlator(g, &with1), factor * psi_correlator(g, &d), "dilaton at g={g} d={d:?}");
            }
        }
    }
}

#[test]
fn genus0_closed_form_agrees() {
    assert_eq!(psi_correlator_genus0(&[0, 1, 2, 0, 0, 0]), r(3, 1));
    assert_eq!(psi_correlator_genus0(&[1, 1, 1, 0, 0, 0]), r(6, 1));
    for n in 3..=8usize {
        for d in keys(0, n) {
            assert_eq!(psi_correlator(0, &d), psi_correlator_genus0(&d), "{d:?}");
        }
    }
}

#[test]
fn hodge_relations() {
    assert!(hodge_reduce(&[3, 3], 3).unwrap().is_empty());
    let two_31 = hodge_reduce(&[2, 2], 3).unwrap();
    assert_eq!(two_31.len(), 1);
    assert_eq!(two_31[&vec![1, 3]], r(2, 1));
    let cube = hodge_reduce(&[1, 1, 1], 3).unwrap();
    assert_eq!(cube.len(), 1);
    assert_eq!(cube[&vec![1, 2]], r(2, 1));
    assert_eq!(lambda_top_triple(3).unwrap(), r(1, 725760));
    assert_eq!(lambda_top_triple(2).unwrap(), r(1, 2880));
    assert_eq!(hodge_top_integral(&[1, 2, 3], 3).unwrap(), r(1, 1451520));
    assert_eq!(hodge_top_integral(&[1, 2], 2).unwrap(), r(1, 5760));
    // dilaton lift to one marked point
    let chain = r(4, 1) * hodge_top_integral(&[1, 2, 3], 3).unwrap();
    assert_eq!(chain, r(1, 362880));
    assert!(matches!(hodge_reduce(&[4], 3), Err(Error::InvalidArgument(_))));
}

#[test]
fn dr_correlator_genus0() {
    let c = TrivialCohft::default();
    assert_eq!(dr_correlator(&c, 0, &[1, 1, 1], &[0, 0, 0], &[0, 0], None).unwrap(), r(-1, 1));
    // first-order term on M̄_{0,3} vanishes by dimension
    assert_eq!(dr_correlator(&c, 0, &[1, 1, 1], &[0, 0, 0], &[1, 0], None).unwrap(), r(0, 1));
    assert_eq!(dr_correlator(&c, 0, &[1, 1, 1, 1], &[0, 0, 0, 0], &[1, 0, 0], None).unwrap(), r(1, 1));
    assert!(matches!(
        dr_correlator(&c, 1, &[1, 1], &[0, 0], &[0], None),
        Err(Error::TableRequired(_))
    ));
}

#[test]
fn table_semantics() {
    let mut t = CorrelatorTable::new(TableKind::CohftPsi, intobs_core::diffpoly::MetricEta::identity(2));
    t.insert(CorrelatorKey::plain(0, vec![1, 2, 2], vec![0, 0, 0]), r(3, 1)).unwrap();
    assert_eq!(t.lookup(&CorrelatorKey::plain(0, vec![2, 1, 2], vec![0, 0, 0])).unwrap(), r(3, 1));
    let clash = t.insert(CorrelatorKey::plain(0, vec![2, 2, 1], vec![0, 0, 0]), r(4, 1));
    assert!(matches!(clash, Err(Error::Inconsistent(_))));
    assert!(matches!(t.lookup(&CorrelatorKey::plain(0, vec![1, 1, 1], vec![0, 0, 0])), Err(Error::MissingKey(_))));
    t.declare_complete(0, 3);
    assert!(t.lookup(&CorrelatorKey::plain(0, vec![1, 1, 1], vec![0, 0, 0])).unwrap().is_zero());
    assert!(t.insert(CorrelatorKey::plain(0, vec![1, 1], vec![0, 0]), r(1, 1)).is_err());
    let trivial = Arc::new(CorrelatorTable::trivial(TableKind::CohftPsi));
    let c = TableCohft::new(trivial).unwrap();
    assert_eq!(c.correlator(1, &[1], &[1]).unwrap(), r(1, 24));
}

#[test]
fn fcohft_view_of_trivial() {
    let c = TrivialCohft::default();
    let v = FcohftView::new(&c);
    assert_eq!(v.correlator(0, 1, 1, &[1, 1, 1], &[0, 0, 0]).unwrap(), r(1, 1));
    assert_eq!(v.correlator(1, 1, 1, &[1], &[1]).unwrap(), r(1, 24));
}
