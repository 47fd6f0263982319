use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Vertex of a rooted tree in canonical form: children sorted, legs sorted (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub genus: u32,
    pub legs: Vec<u16>,
    pub children: Vec<Node>,
}

impl Node {
    pub fn new(genus: u32, mut legs: Vec<u16>, mut children: Vec<Node>) -> Self {
        legs.sort_unstable();
        children.sort();
        Node { genus, legs, children }
    }

    pub fn total_genus(&self) -> u32 {
        self.genus + self.children.iter().map(Node::total_genus).sum::<u32>()
    }

    pub fn all_legs(&self) -> Vec<u16> {
        let mut v = self.legs.clone();
        for c in &self.children {
            v.extend(c.all_legs());
        }
        v.sort_unstable();
        v
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(Node::vertex_count).sum::<usize>()
    }
}

/// Flattened vertex data, preorder with the root first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub genus: u32,
    pub legs: Vec<u16>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Regular legs in the subtree of this vertex.
    pub below: Vec<u16>,
}

/// Stable rooted tree with `n` regular legs and `m` frozen legs on the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableRootedTree {
    pub root: Node,
    pub n: usize,
    pub m: usize,
    pub vertices: Vec<Vertex>,
}

impl StableRootedTree {
    pub fn new(root: Node, n: usize, m: usize) -> Self {
        let mut vertices = Vec::new();
        flatten(&root, None, &mut vertices);
        StableRootedTree { root, n, m, vertices }
    }

    pub fn genus(&self) -> u32 {
        self.root.total_genus()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Number of half-edges `|H(v)|` including frozen legs on the root.
    pub fn valence(&self, v: usize) -> usize {
        let x = &self.vertices[v];
        x.legs.len() + x.children.len() + if x.parent.is_some() { 1 } else { self.m }
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0)
    }

    /// Dimension of the moduli space at vertex `v`.
    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.vertices[v].genus as i64 - 3 + self.valence(v) as i64
    }

    /// Every non-root vertex is a child of the root.
    pub fn height_at_most_one(&self) -> bool {
        self.vertices.iter().skip(1).all(|v| v.parent == Some(0) && v.children.is_empty())
    }
}

fn flatten(node: &Node, parent: Option<usize>, out: &mut Vec<Vertex>) -> usize {
    let idx = out.len();
    out.push(Vertex { genus: node.genus, legs: node.legs.clone(), parent, children: Vec::new(), below: node.all_legs() });
    for c in &node.children {
        let ci = flatten(c, Some(idx), out);
        out[idx].children.push(ci);
    }
    idx
}

type Memo = BTreeMap<(u32, u64, usize), Vec<Node>>;

/// All stable rooted trees of genus `g` with regular legs `1..=n` and `m` frozen legs on the
/// root, up to isomorphisms fixing the legs, in canonical order.
pub fn enumerate_trees(g: u32, n: usize, m: usize) -> Vec<StableRootedTree> {
    if 2 * g as i64 - 2 + n as i64 + m as i64 <= 0 {
        return Vec::new();
    }
    let mut memo = Memo::new();
    let all = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let roots = gen_node(g, all, m, &mut memo);
    let set: BTreeSet<Node> = roots.into_iter().collect();
    set.into_iter().map(|r| StableRootedTree::new(r, n, m)).collect()
}

/// Nodes of total genus `g`, carrying exactly the legs in `mask`, with `extra` further
/// half-edges at the top vertex (1 for the edge to a parent, `m` for the root).
fn gen_node(g: u32, mask: u64, extra: usize, memo: &mut Memo) -> Vec<Node> {
    if let Some(v) = memo.get(&(g, mask, extra)) {
        return v.clone();
    }
    let mut out = BTreeSet::new();
    for gv in 0..=g {
        for own in submasks(mask) {
            let rest = mask & !own;
            // a lone child carrying everything would recurse into this very call
            let whole_ok = !(gv == 0 && own == 0 && extra <= 1);
            for forest in gen_forest(g - gv, rest, whole_ok, memo) {
                let valence = own.count_ones() as i64 + forest.len() as i64 + extra as i64;
                if 2 * gv as i64 - 2 + valence > 0 {
                    out.insert(Node::new(gv, legs_of(own), forest));
                }
            }
        }
    }
    let v: Vec<Node> = out.into_iter().collect();
    memo.insert((g, mask, extra), v.clone());
    v
}

/// Multisets of child subtrees with total genus `g` and leg set exactly `mask`.
fn gen_forest(g: u32, mask: u64, whole_ok: bool, memo: &mut Memo) -> Vec<Vec<Node>> {
    if mask == 0 {
        let top = if whole_ok { g } else { g.saturating_sub(1) };
        return legless_forests(g, top, None, memo);
    }
    let low = mask & mask.wrapping_neg();
    let mut out = Vec::new();
    for sub in submasks(mask & !low) {
        let first = sub | low;
        for gc in 0..=g {
            if !whole_ok && first == mask && gc == g {
                continue;
            }
            let heads = gen_node(gc, first, 1, memo);
            if heads.is_empty() {
                continue;
            }
            let tails = gen_forest(g - gc, mask & !first, true, memo);
            for h in &heads {
                for t in &tails {
                    let mut f = t.clone();
                    f.push(h.clone());
                    f.sort();
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Multisets of legless subtrees with total genus `g`, each of genus at most `max_h` and not exceeding `bound` in the
/// canonical order (to avoid listing a multiset twice).
fn legless_forests(g: u32, max_h: u32, bound: Option<&Node>, memo: &mut Memo) -> Vec<Vec<Node>> {
    if g == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for h in 1..=max_h.min(g) {
        for t in gen_node(h, 0, 1, memo) {
            if bound.is_some_and(|b| t > *b) {
                continue;
            }
            for mut rest in legless_forests(g - h, g - h, Some(&t), memo) {
                rest.push(t.clone());
                rest.sort();
                out.push(rest);
            }
        }
    }
    out
}

fn submasks(mask: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut s = mask;
    loop {
        v.push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    v.reverse();
    v
}

fn legs_of(mask: u64) -> Vec<u16> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i as u16 + 1).collect()
}

/// Level functions: root at 0, strictly increasing towards the leaves, no empty levels.
pub fn enumerate_levels(t: &StableRootedTree) -> Vec<Vec<u32>> {
    let nv = t.vertices.len();
    let mut out = Vec::new();
    let mut cur = vec![0u32; nv];
    fn go(t: &StableRootedTree, v: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let nv = t.vertices.len();
        if v == nv {
            let top = *cur.iter().max().unwrap();
            let mut seen = vec![false; top as usize + 1];
            for &l in cur.iter() {
                seen[l as usize] = true;
            }
            if seen.iter().all(|&s| s) {
                out.push(cur.clone());
            }
            return;
        }
        let p = t.vertices[v].parent.expect("non-root vertex");
        for l in cur[p] + 1..nv as u32 {
            cur[v] = l;
            go(t, v + 1, cur, out);
        }
    }
    if nv == 1 {
        return vec![vec![0]];
    }
    go(t, 1, &mut cur, &mut out);
    out
}
