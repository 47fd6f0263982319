use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::{enumerate_levels, enumerate_trees, StableRootedTree};
use crate::correlators::{a1_correlator, dr_correlator, Cohft, CorrelatorTable, Field, Observable};
use crate::exactnum::{MultiPoly, Rational, VarSet};
use crate::Error;

/// Everything the tree sums read from.
#[derive(Clone, Copy)]
pub struct Context<'a> {
    pub obs: &'a dyn Observable,
    pub cohft: &'a dyn Cohft,
    pub dr_table: Option<&'a CorrelatorTable>,
}

impl<'a> Context<'a> {
    pub fn new(obs: &'a dyn Observable, cohft: &'a dyn Cohft) -> Self {
        Context { obs, cohft, dr_table: None }
    }

    pub fn with_dr_table(mut self, t: Option<&'a CorrelatorTable>) -> Self {
        self.dr_table = t;
        self
    }
}

/// Field and ψ-probe on each of the `n + m` markings (regular legs first, then frozen).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Insertions {
    pub fields: Vec<Field>,
    pub probe: Vec<u32>,
}

impl Insertions {
    pub fn unit(len: usize) -> Self {
        Insertions { fields: vec![1; len], probe: vec![0; len] }
    }

    fn probe_sum(&self) -> u32 {
        self.probe.iter().sum()
    }
}

/// `a1..an, b1..bm`.
pub fn ab_vars(n: usize, m: usize) -> VarSet {
    VarSet::indexed("a", n).concat(&VarSet::indexed("b", m))
}

#[derive(Clone, Copy)]
enum SlotKind {
    Form(usize),
    Frozen(usize),
    Zero,
}

#[derive(Clone, Copy)]
struct Slot {
    field: Field,
    probe: u32,
    kind: SlotKind,
}

struct Powers<'p> {
    forms: &'p [MultiPoly],
    cache: Vec<Vec<MultiPoly>>,
}

impl<'p> Powers<'p> {
    fn new(forms: &'p [MultiPoly]) -> Self {
        Powers { forms, cache: forms.iter().map(|f| vec![MultiPoly::one(f.vars()), f.clone()]).collect() }
    }

    fn get(&mut self, j: usize, k: u32) -> &MultiPoly {
        while self.cache[j].len() <= k as usize {
            let next = self.cache[j].last().unwrap() * &self.forms[j];
            self.cache[j].push(next);
        }
        &self.cache[j][k as usize]
    }
}

/// Exponent vectors of length `len` with sum in `lo..=hi`.
fn compositions(len: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn go(i: usize, left: u32, lo: u32, used: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            if used >= lo {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            go(i + 1, left - k, lo, used + k, cur, out);
        }
        cur[i] = 0;
    }
    if lo <= hi {
        go(0, hi, lo, 0, &mut cur, &mut out);
    }
    out
}

/// `Σ_{K,F} ∏form^K ∏b^F ∫ Coeff_{x^K y^F} O · ψ^{probe} pc`, with `|K| = d` if given.
fn vertex_obs(
    ctx: &Context<'_>,
    g: u32,
    slots: &[Slot],
    powers: &mut Powers<'_>,
    vars: &VarSet,
    degree: Option<u32>,
) -> Result<MultiPoly, Error> {
    let dim = 3 * g as i64 - 3 + slots.len() as i64;
    let budget = dim - slots.iter().map(|s| s.probe as i64).sum::<i64>();
    let mut out = MultiPoly::zero(vars);
    if budget < 0 {
        return Ok(out);
    }
    let budget = budget as u32;
    let pos: Vec<usize> = (0..slots.len()).filter(|&i| matches!(slots[i].kind, SlotKind::Form(_))).collect();
    let frz: Vec<usize> = (0..slots.len()).filter(|&i| matches!(slots[i].kind, SlotKind::Frozen(_))).collect();
    let (lo, hi) = match degree {
        Some(d) if d > budget => return Ok(out),
        Some(d) => (d, d),
        None => (0, budget),
    };
    let fields: Vec<Field> = slots.iter().map(|s| s.field).collect();
    let probes: Vec<u32> = slots.iter().map(|s| s.probe).collect();
    for k in compositions(pos.len(), lo, hi) {
        let ksum: u32 = k.iter().sum();
        for f in compositions(frz.len(), 0, budget - ksum) {
            let mut exps = vec![0u32; slots.len()];
            for (i, &s) in pos.iter().enumerate() {
                exps[s] = k[i];
            }
            for (i, &s) in frz.iter().enumerate() {
                exps[s] = f[i];
            }
            let val = ctx.obs.integrate(ctx.cohft, g, &fields, &exps, &probes)?;
            if val.is_zero() {
                continue;
            }
            let mut bexp = vec![0u32; vars.len()];
            for (i, &s) in frz.iter().enumerate() {
                if let SlotKind::Frozen(var) = slots[s].kind {
                    bexp[var] = f[i];
                }
            }
            let mut term = MultiPoly::monomial(vars, bexp, val);
            for (i, &s) in pos.iter().enumerate() {
                if let SlotKind::Form(j) = slots[s].kind {
                    if k[i] > 0 {
                        term = &term * powers.get(j, k[i]);
                    }
                }
            }
            out.add_assign_ref(&term);
        }
    }
    Ok(out)
}

/// `Σ_K ∏form^K ∫ Coeff_{a^K} D · ψ^{probe} pc` on a vertex whose last slot is the special point.
fn vertex_dr(ctx: &Context<'_>, g: u32, slots: &[Slot], powers: &mut Powers<'_>, vars: &VarSet) -> Result<MultiPoly, Error> {
    let dim = 3 * g as i64 - 3 + slots.len() as i64;
    let budget = dim - slots.iter().map(|s| s.probe as i64).sum::<i64>();
    let mut out = MultiPoly::zero(vars);
    if budget < 0 {
        return Ok(out);
    }
    let fields: Vec<Field> = slots.iter().map(|s| s.field).collect();
    let probes: Vec<u32> = slots.iter().map(|s| s.probe).collect();
    let npos = slots.len() - 1;
    for k in compositions(npos, 0, budget as u32) {
        let val = dr_correlator(ctx.cohft, g, &fields, &probes, &k, ctx.dr_table)?;
        if val.is_zero() {
            continue;
        }
        let mut term = MultiPoly::constant(vars, val);
        for (i, &ki) in k.iter().enumerate() {
            if ki > 0 {
                if let SlotKind::Form(j) = slots[i].kind {
                    term = &term * powers.get(j, ki);
                }
            }
        }
        out.add_assign_ref(&term);
    }
    Ok(out)
}

struct TreeForms {
    /// Forms: `a_1..a_n` then `a(e)` for each non-root vertex `v` at index `n + v − 1`.
    forms: Vec<MultiPoly>,
    edge_product: MultiPoly,
}

fn tree_forms(t: &StableRootedTree, vars: &VarSet) -> TreeForms {
    let mut forms: Vec<MultiPoly> = (0..t.n).map(|i| MultiPoly::var(vars, i)).collect();
    let mut edge_product = MultiPoly::one(vars);
    for v in t.vertices.iter().skip(1) {
        let mut f = MultiPoly::zero(vars);
        for &l in &v.below {
            f.add_assign_ref(&MultiPoly::var(vars, l as usize - 1));
        }
        edge_product = &edge_product * &f;
        forms.push(f);
    }
    TreeForms { forms, edge_product }
}

/// Slots of vertex `v`: own legs, edges to children, then frozen legs (root) or the edge to
/// the parent (non-root).
fn vertex_slots(t: &StableRootedTree, v: usize, ins: &Insertions, mu: &[Field], nu: &[Field]) -> Vec<Slot> {
    let x = &t.vertices[v];
    let mut s = Vec::with_capacity(t.valence(v));
    for &l in &x.legs {
        let i = l as usize - 1;
        s.push(Slot { field: ins.fields[i], probe: ins.probe[i], kind: SlotKind::Form(i) });
    }
    for &c in &x.children {
        s.push(Slot { field: mu[c], probe: 0, kind: SlotKind::Form(t.n + c - 1) });
    }
    if x.parent.is_none() {
        for j in 0..t.m {
            s.push(Slot { field: ins.fields[t.n + j], probe: ins.probe[t.n + j], kind: SlotKind::Frozen(t.n + j) });
        }
    } else {
        s.push(Slot { field: nu[v], probe: 0, kind: SlotKind::Zero });
    }
    s
}

/// Edge field labellings `(μ, ν)` with weight `∏ η^{μν}`; index = child vertex.
fn labellings(t: &StableRootedTree, cohft: &dyn Cohft) -> Vec<(Vec<Field>, Vec<Field>, Rational)> {
    let support = cohft.eta().upper_support();
    let nv = t.vertices.len();
    let mut out = vec![(vec![0; nv], vec![0; nv], Rational::one())];
    for v in 1..nv {
        let mut next = Vec::with_capacity(out.len() * support.len());
        for (mu, nu, w) in &out {
            for (a, b, c) in &support {
                let mut mu2 = mu.clone();
                let mut nu2 = nu.clone();
                mu2[v] = *a;
                nu2[v] = *b;
                next.push((mu2, nu2, w * c));
            }
        }
        out = next;
    }
    out
}

fn tree_b(ctx: &Context<'_>, t: &StableRootedTree, ins: &Insertions, vars: &VarSet) -> Result<MultiPoly, Error> {
    let tf = tree_forms(t, vars);
    let mut total = MultiPoly::zero(vars);
    if tf.edge_product.is_zero() {
        return Ok(total);
    }
    let levels = enumerate_levels(t);
    let nv = t.vertices.len();
    let m = t.m as i64;
    for (mu, nu, w) in labellings(t, ctx.cohft) {
        let mut powers = Powers::new(&tf.forms);
        // vp[v][d]
        let mut vp: Vec<Vec<MultiPoly>> = Vec::with_capacity(nv);
        for v in 0..nv {
            let slots = vertex_slots(t, v, ins, &mu, &nu);
            let dim = t.vertex_dim(v).max(0) as u32;
            let mut row = Vec::with_capacity(dim as usize + 1);
            for d in 0..=dim {
                row.push(vertex_obs(ctx, t.vertices[v].genus, &slots, &mut powers, vars, Some(d))?);
            }
            vp.push(row);
        }
        let mut sum = MultiPoly::zero(vars);
        for lv in &levels {
            let top = *lv.iter().max().unwrap();
            let mut states: BTreeMap<i64, MultiPoly> = BTreeMap::new();
            states.insert(0, MultiPoly::one(vars));
            let mut count = 0i64;
            let mut genus = 0i64;
            for l in 0..=top {
                let at: Vec<usize> = (0..nv).filter(|&v| lv[v] == l).collect();
                count += at.len() as i64;
                genus += at.iter().map(|&v| t.vertices[v].genus as i64).sum::<i64>();
                // level polynomial by total degree
                let mut lp: BTreeMap<i64, MultiPoly> = BTreeMap::new();
                lp.insert(0, MultiPoly::one(vars));
                for &v in &at {
                    let mut next: BTreeMap<i64, MultiPoly> = BTreeMap::new();
                    for (s, p) in &lp {
                        for (d, q) in vp[v].iter().enumerate() {
                            if q.is_zero() {
                                continue;
                            }
                            let e = next.entry(s + d as i64).or_insert_with(|| MultiPoly::zero(vars));
                            e.add_assign_ref(&(p * q));
                        }
                    }
                    lp = next;
                }
                let mut next: BTreeMap<i64, MultiPoly> = BTreeMap::new();
                for (dsum, p) in &states {
                    for (s, q) in &lp {
                        let d2 = dsum + s;
                        if l < top && d2 + count - 1 > 2 * genus - 2 + m {
                            continue;
                        }
                        let e = next.entry(d2).or_insert_with(|| MultiPoly::zero(vars));
                        e.add_assign_ref(&(p * q));
                    }
                }
                states = next;
                if states.is_empty() {
                    break;
                }
            }
            let mut lsum = MultiPoly::zero(vars);
            for p in states.values() {
                lsum.add_assign_ref(p);
            }
            if top % 2 == 1 {
                lsum = -lsum;
            }
            sum.add_assign_ref(&lsum);
        }
        total.add_scaled(&sum, &w);
    }
    Ok(&total * &tf.edge_product)
}

fn check_insertions(g: u32, n: usize, m: usize, ins: &Insertions) -> Result<(), Error> {
    if 2 * g as i64 - 2 + n as i64 + m as i64 <= 0 {
        return Err(Error::InvalidArgument(format!("unstable (g,n,m) = ({g},{n},{m})")));
    }
    if ins.fields.len() != n + m || ins.probe.len() != n + m {
        return Err(Error::InvalidArgument(format!("insertions must cover {} markings", n + m)));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn sum_over<T, F>(items: &[T], vars: &VarSet, f: F) -> Result<MultiPoly, Error>
where
    T: Sync,
    F: Fn(&T) -> Result<MultiPoly, Error> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).try_reduce(|| MultiPoly::zero(vars), |a, b| Ok(a + b))
}

#[cfg(not(feature = "parallel"))]
fn sum_over<T, F>(items: &[T], vars: &VarSet, f: F) -> Result<MultiPoly, Error>
where
    F: Fn(&T) -> Result<MultiPoly, Error>,
{
    let mut acc = MultiPoly::zero(vars);
    for it in items {
        acc.add_assign_ref(&f(it)?);
    }
    Ok(acc)
}

/// `∫_{M̄_{g,n+m}} B^m_{g,n} · ψ^{probe} · pc(fields)` as a polynomial in `a1..an, b1..bm`.
pub fn integrate_b(ctx: &Context<'_>, g: u32, n: usize, m: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    check_insertions(g, n, m, ins)?;
    let vars = ab_vars(n, m);
    let trees = enumerate_trees(g, n, m);
    sum_over(&trees, &vars, |t| tree_b(ctx, t, ins, &vars))
}

/// Integrated master class split as `(D-term, remaining terms)`.
pub fn integrate_xi_parts(
    ctx: &Context<'_>,
    g: u32,
    n: usize,
    m: usize,
    ins: &Insertions,
) -> Result<(MultiPoly, MultiPoly), Error> {
    Ok((xi_dterm(ctx, g, n, m, ins)?, xi_rest(ctx, g, n, m, ins)?))
}

fn xi_dterm(ctx: &Context<'_>, g: u32, n: usize, m: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    if m == 0 {
        return Err(Error::InvalidArgument("master classes need m >= 1".into()));
    }
    check_insertions(g, n, m, ins)?;
    let vars = ab_vars(n, m);
    if m != 1 {
        return Ok(MultiPoly::zero(&vars));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("D-term needs n >= 1".into()));
    }
    let forms: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(&vars, i)).collect();
    let mut powers = Powers::new(&forms);
    let mut slots: Vec<Slot> =
        (0..n).map(|i| Slot { field: ins.fields[i], probe: ins.probe[i], kind: SlotKind::Form(i) }).collect();
    slots.push(Slot { field: ins.fields[n], probe: ins.probe[n], kind: SlotKind::Zero });
    vertex_dr(ctx, g, &slots, &mut powers, &vars)
}

fn xi_rest(ctx: &Context<'_>, g: u32, n: usize, m: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    if m == 0 {
        return Err(Error::InvalidArgument("master classes need m >= 1".into()));
    }
    check_insertions(g, n, m, ins)?;
    let vars = ab_vars(n, m);
    let trees: Vec<StableRootedTree> =
        enumerate_trees(g, n, m).into_iter().filter(|t| t.height_at_most_one()).collect();
    sum_over(&trees, &vars, |t| {
        let tf = tree_forms(t, &vars);
        if tf.edge_product.is_zero() {
            return Ok(MultiPoly::zero(&vars));
        }
        let mut acc = MultiPoly::zero(&vars);
        for (mu, nu, w) in labellings(t, ctx.cohft) {
            let mut powers = Powers::new(&tf.forms);
            let root = vertex_slots(t, 0, ins, &mu, &nu);
            let mut p = vertex_obs(ctx, t.vertices[0].genus, &root, &mut powers, &vars, None)?;
            for v in 1..t.vertices.len() {
                if p.is_zero() {
                    break;
                }
                let slots = vertex_slots(t, v, ins, &mu, &nu);
                p = &p * &vertex_dr(ctx, t.vertices[v].genus, &slots, &mut powers, &vars)?;
            }
            acc.add_scaled(&p, &w);
        }
        Ok(&acc * &tf.edge_product)
    })
}

/// `∫ Ξ^m_{g,n} · ψ^{probe} · pc(fields)`.
pub fn integrate_xi(ctx: &Context<'_>, g: u32, n: usize, m: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    let (d, r) = integrate_xi_parts(ctx, g, n, m, ins)?;
    Ok(d + r)
}

/// `∫ Υ^m_{g,n} · ψ^{probe} · pc(fields)`, using `Υ = D-term + (Ξ − D-term)·∏(1 − b_iψ_{n+i})`.
pub fn integrate_upsilon(ctx: &Context<'_>, g: u32, n: usize, m: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    let d = xi_dterm(ctx, g, n, m, ins)?;
    let vars = ab_vars(n, m);
    let mut out = d;
    for mask in 0u32..(1 << m) {
        let mut shifted = ins.clone();
        let mut bexp = vec![0u32; n + m];
        for i in 0..m {
            if mask >> i & 1 == 1 {
                shifted.probe[n + i] += 1;
                bexp[n + i] = 1;
            }
        }
        let r = xi_rest(ctx, g, n, m, &shifted)?;
        let sign = if mask.count_ones() % 2 == 0 { Rational::one() } else { -Rational::one() };
        out.add_assign_ref(&(&r * &MultiPoly::monomial(&vars, bexp, sign)));
    }
    Ok(out)
}

/// `∫_{M̄_{g,n+1}} A¹_{g,n} · ψ^{probe} · pc(fields)` in the ring `a1..an, b1`.
pub fn integrate_a1(ctx: &Context<'_>, g: u32, n: usize, ins: &Insertions) -> Result<MultiPoly, Error> {
    check_insertions(g, n, 1, ins)?;
    let vars = ab_vars(n, 1);
    let dim = 3 * g as i64 - 2 + n as i64 - ins.probe_sum() as i64;
    let mut out = MultiPoly::zero(&vars);
    if dim < 0 {
        return Ok(out);
    }
    for k in compositions(n, 0, dim as u32) {
        let v = a1_correlator(ctx.cohft, g, &ins.fields, &ins.probe, &k, ctx.dr_table)?;
        let mut e = k.clone();
        e.push(0);
        out.add_term(e, v);
    }
    Ok(out)
}

/// Integrated `B^m` for a list of insertions.
#[derive(Clone, Debug)]
pub struct IntegratedBClass {
    pub g: u32,
    pub n: usize,
    pub m: usize,
    pub vars: VarSet,
    pub entries: BTreeMap<Insertions, MultiPoly>,
}

impl IntegratedBClass {
    /// Coefficient of `∏ b_i^{e_i}` as a polynomial in the `a` variables.
    pub fn coeff_b(&self, ins: &Insertions, b_exps: &[u32]) -> Option<MultiPoly> {
        let p = self.entries.get(ins)?;
        let idx: Vec<usize> = (self.n..self.n + self.m).collect();
        Some(p.coeff_of(&idx, b_exps).restrict(&VarSet::indexed("a", self.n)))
    }
}

pub fn assemble_b(
    ctx: &Context<'_>,
    g: u32,
    n: usize,
    m: usize,
    insertions: &[Insertions],
) -> Result<IntegratedBClass, Error> {
    let mut entries = BTreeMap::new();
    for ins in insertions {
        entries.insert(ins.clone(), integrate_b(ctx, g, n, m, ins)?);
    }
    Ok(IntegratedBClass { g, n, m, vars: ab_vars(n, m), entries })
}

/// All `len`-tuples of fields and all probes with total degree at most `max_probe`.
pub fn all_insertions(len: usize, n_fields: usize, max_probe: u32) -> Vec<Insertions> {
    let mut fields = vec![Vec::new()];
    for _ in 0..len {
        fields = fields
            .into_iter()
            .flat_map(|v: Vec<Field>| {
                (1..=n_fields as Field).map(move |f| {
                    let mut w = v.clone();
                    w.push(f);
                    w
                })
            })
            .collect();
    }
    let probes = compositions(len, 0, max_probe);
    let mut out = Vec::new();
    for f in &fields {
        for p in &probes {
            out.push(Insertions { fields: f.clone(), probe: p.clone() });
        }
    }
    out
}
