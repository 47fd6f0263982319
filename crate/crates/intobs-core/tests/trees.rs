use std::collections::BTreeSet;
use std::sync::Arc;

use intobs_core::correlators::*;
use intobs_core::exactnum::{MultiPoly, Rational};
use intobs_core::trees::*;

/// Canonical trees from an explicit parent map, genus map and leg map.
fn build(v: usize, parent: &[usize], genus: &[u32], leg_at: &[usize]) -> Node {
    let kids: Vec<Node> = (1..parent.len()).filter(|&c| parent[c] == v).map(|c| build(c, parent, genus, leg_at)).collect();
    let legs: Vec<u16> = (0..leg_at.len()).filter(|&i| leg_at[i] == v).map(|i| i as u16 + 1).collect();
    Node::new(genus[v], legs, kids)
}

fn for_each_vector(len: usize, base: usize, f: &mut dyn FnMut(&[usize])) {
    let mut v = vec![0usize; len];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            v[i] += 1;
            if v[i] < base {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// Brute force over parent maps with `parent[v] < v`, which reaches every rooted tree.
fn brute_trees(g: u32, n: usize, m: usize) -> BTreeSet<Node> {
    let mut out = BTreeSet::new();
    let kmax = (2 * g as i64 - 2 + n as i64 + m as i64).max(0) as usize;
    for k in 1..=kmax {
        let mut parents: Vec<Vec<usize>> = vec![vec![0]];
        for v in 1..k {
            parents = parents
                .into_iter()
                .flat_map(|p| {
                    (0..v).map(move |q| {
                        let mut w = p.clone();
                        w.push(q);
                        w
                    })
                })
                .collect();
        }
        for p in &parents {
            for_each_vector(k, g as usize + 1, &mut |gs| {
                let gs: Vec<u32> = gs.iter().map(|&x| x as u32).collect();
                if gs.iter().sum::<u32>() != g {
                    return;
                }
                for_each_vector(n, k, &mut |legs| {
                    let node = build(0, p, &gs, legs);
                    let t = StableRootedTree::new(node.clone(), n, m);
                    if t.is_stable() {
                        out.insert(node);
                    }
                });
            });
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for (g, n, m) in [(0, 3, 0), (0, 4, 0), (0, 2, 1), (0, 3, 1), (0, 4, 1), (0, 2, 2), (0, 3, 2), (1, 1, 0), (1, 2, 0),
        (1, 1, 1), (1, 2, 1), (1, 3, 0), (1, 0, 2), (2, 0, 1), (2, 1, 0), (2, 1, 1), (2, 2, 0)]
    {
        let fast: BTreeSet<Node> = enumerate_trees(g, n, m).into_iter().map(|t| t.root).collect();
        let slow = brute_trees(g, n, m);
        assert_eq!(fast, slow, "(g,n,m) = ({g},{n},{m})");
        assert!(enumerate_trees(g, n, m).iter().all(|t| t.is_stable() && t.genus() == g));
    }
}

#[test]
fn small_tree_counts() {
    assert_eq!(enumerate_trees(0, 1, 2).len(), 1);
    assert_eq!(enumerate_trees(0, 3, 0).len(), 1);
    assert!(enumerate_trees(0, 1, 1).is_empty());
    assert_eq!(enumerate_trees(0, 3, 1).len(), 4);
}

#[test]
fn level_function_counts() {
    let chain = Node::new(0, vec![1], vec![Node::new(0, vec![2], vec![Node::new(0, vec![3, 4], vec![])])]);
    let t = StableRootedTree::new(chain, 4, 1);
    assert_eq!(enumerate_levels(&t), vec![vec![0, 1, 2]]);
    let cherry = Node::new(0, vec![], vec![Node::new(0, vec![1, 2], vec![]), Node::new(0, vec![3, 4], vec![])]);
    let t = StableRootedTree::new(cherry, 4, 1);
    assert_eq!(enumerate_levels(&t).len(), 3);
    let single = StableRootedTree::new(Node::new(1, vec![1], vec![]), 1, 0);
    assert_eq!(enumerate_levels(&single), vec![vec![0]]);
}

fn psi_ctx() -> (PsiObservable, TrivialCohft) {
    (PsiObservable, TrivialCohft::default())
}

#[test]
fn lrt2_genus_0_and_1() {
    let (obs, cohft) = psi_ctx();
    let ctx = Context::new(&obs, &cohft);
    for (g, n) in [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2)] {
        for lrt2 in [Lrt2Mode::Weak, Lrt2Mode::Strong] {
            let opts = CheckOptions { probes: ProbeMode::Full, lrt2 };
            let r = check_lrt(&ctx, 2, g, n, &opts).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.checked > 0);
        }
    }
}

#[test]
fn lrt_higher_m_genus_0() {
    let (obs, cohft) = psi_ctx();
    let ctx = Context::new(&obs, &cohft);
    let opts = CheckOptions { probes: ProbeMode::Full, ..Default::default() };
    for (m, n) in [(3, 1), (3, 2), (4, 1), (1, 2), (1, 3), (0, 3), (0, 4)] {
        let r = check_lrt(&ctx, m, 0, n, &opts).unwrap();
        assert!(r.passed(), "{r:?}");
    }
    let r = check_lrt(&ctx, 0, 1, 1, &opts).unwrap();
    assert!(matches!(r.status, Status::Unsupported(_)));
}

#[test]
fn perturbed_observable_breaks_lrt2() {
    let obs = PerturbedObservable { inner: PsiObservable, g: 0, insertion: vec![0, 0, 0, 1], delta: Rational::one() };
    let cohft = TrivialCohft::default();
    let ctx = Context::new(&obs, &cohft);
    let r = check_lrt(&ctx, 2, 0, 2, &CheckOptions::default()).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(!r.violations.is_empty());
}

#[test]
fn master_relations_genus_0() {
    let (obs, cohft) = psi_ctx();
    let ctx = Context::new(&obs, &cohft);
    let opts = CheckOptions { probes: ProbeMode::Full, ..Default::default() };
    for n in 2..=4 {
        assert!(check_master(&ctx, 1, 0, n, &opts).unwrap().passed());
    }
    for n in 1..=3 {
        assert!(check_master(&ctx, 2, 0, n, &opts).unwrap().passed());
        assert!(check_geometric_master(&ctx, 2, 0, n, &opts).unwrap().passed());
    }
    for n in 2..=3 {
        assert!(check_geometric_master(&ctx, 1, 0, n, &opts).unwrap().passed());
    }
}

/// Genus-1 D-term on M̄_{1,2}: `−λ_1 DR_1(a,−a) = −a²λ_1(ψ_1+ψ_2)/2`, integral `−a²/24`.
fn genus1_dr_table() -> CorrelatorTable {
    let mut t = CorrelatorTable::trivial(TableKind::DrD);
    let vals = [(0, Rational::zero()), (1, Rational::zero()), (2, Rational::new(-1, 24))];
    for (k, v) in vals {
        let key = CorrelatorKey { g: 1, fields: vec![1, 1], psi: vec![0, 0], class: ClassTag::DrD(vec![k]) };
        t.insert(key, v).unwrap();
    }
    t
}

#[test]
fn master_relation_genus_1_with_table() {
    let (obs, cohft) = psi_ctx();
    let table = genus1_dr_table();
    let ctx = Context::new(&obs, &cohft).with_dr_table(Some(&table));
    let r = check_master(&ctx, 1, 1, 1, &CheckOptions { probes: ProbeMode::Full, ..Default::default() }).unwrap();
    assert!(r.passed(), "{r:?}");
    let xi = integrate_xi(&ctx, 1, 1, 1, &unit_insertions(2)).unwrap();
    assert!(xi.filter(|e| e[1] == 0 && e[0] == 2).is_zero());
    let bare = Context::new(&obs, &cohft);
    assert!(integrate_xi(&bare, 1, 1, 1, &unit_insertions(2)).is_err());
}

/// Forgetting the last frozen point: with `b = 0` and field 1 there, the pushforward
/// multiplies by `𝐚 = Σ a_i`.
#[test]
fn pushforward_of_frozen_point() {
    let (obs, cohft) = psi_ctx();
    let ctx = Context::new(&obs, &cohft);
    for (g, n, m) in [(0, 2, 3), (0, 3, 3), (1, 1, 3), (0, 2, 4)] {
        let hi = integrate_b(&ctx, g, n, m, &unit_insertions(n + m)).unwrap();
        let lo = integrate_b(&ctx, g, n, m - 1, &unit_insertions(n + m - 1)).unwrap();
        let idx: Vec<usize> = (n..n + m).collect();
        let lo_idx: Vec<usize> = (n..n + m - 1).collect();
        let a = ab_vars(n, 0);
        let hi0 = hi.coeff_of(&idx, &vec![0; m]).restrict(&a);
        let lo0 = lo.coeff_of(&lo_idx, &vec![0; m - 1]).restrict(&a);
        let sum_a = MultiPoly::linear(&a, &vec![Rational::one(); n]);
        assert_eq!(hi0, &sum_a * &lo0, "(g,n,m) = ({g},{n},{m})");
    }
    // From two frozen points down to one the b = 0 part integrates to zero.
    for (g, n) in [(0, 2), (0, 3), (1, 1), (1, 2)] {
        let hi = integrate_b(&ctx, g, n, 2, &unit_insertions(n + 2)).unwrap();
        assert!(hi.coeff_of(&[n, n + 1], &[0, 0]).is_zero(), "(g,n) = ({g},{n})");
    }
}

#[test]
fn geometric_master_needs_degree_bound() {
    let mut t = CorrelatorTable::trivial(TableKind::CohftPsi);
    t.set_trivial(false);
    let cohft = TableCohft::new(Arc::new(t)).unwrap();
    let obs = PsiObservable;
    let ctx = Context::new(&obs, &cohft);
    let r = check_geometric_master(&ctx, 2, 0, 2, &CheckOptions::default()).unwrap();
    assert!(matches!(r.status, Status::Unsupported(_)));
}
