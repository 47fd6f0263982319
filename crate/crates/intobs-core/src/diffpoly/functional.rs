use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use spin::Mutex;

use super::eta::MetricEta;
use super::jet::{DiffPoly, Jet, JetMonomial};
use crate::exactnum::Rational;

type Vector = BTreeMap<Vec<Jet>, Rational>;

/// Reduced row echelon basis of `∂_x(cell of order k−1)` inside the cell of order `k`.
struct ImageBasis {
    rows: BTreeMap<Vec<Jet>, Vector>,
}

impl ImageBasis {
    fn build(fields: &[u16], k: u32) -> ImageBasis {
        let mut rows: BTreeMap<Vec<Jet>, Vector> = BTreeMap::new();
        if k == 0 || fields.is_empty() {
            return ImageBasis { rows };
        }
        for f in monomials(fields, k - 1) {
            let img = DiffPoly::monomial(JetMonomial { eps: 0, factors: f }, Rational::one(), 0).d_x();
            let mut v: Vector = img.terms().map(|(m, c)| (m.factors.clone(), c.clone())).collect();
            reduce(&rows, &mut v);
            let Some((pivot, pc)) = v.iter().next_back().map(|(p, c)| (p.clone(), c.clone())) else {
                continue;
            };
            let inv = pc.recip();
            for c in v.values_mut() {
                *c *= &inv;
            }
            for row in rows.values_mut() {
                if let Some(c) = row.get(&pivot).cloned() {
                    axpy(row, &v, &-c);
                }
            }
            rows.insert(pivot, v);
        }
        ImageBasis { rows }
    }
}

fn axpy(target: &mut Vector, v: &Vector, c: &Rational) {
    for (m, x) in v {
        let e = target.entry(m.clone()).or_default();
        *e += x * c;
        if e.is_zero() {
            target.remove(m);
        }
    }
}

fn reduce(rows: &BTreeMap<Vec<Jet>, Vector>, v: &mut Vector) {
    for (pivot, row) in rows.iter().rev() {
        if let Some(c) = v.get(pivot).cloned() {
            axpy(v, row, &-c);
        }
    }
}

/// All sorted jet monomials with the given sorted field multiset and total order `k`.
pub fn monomials(fields: &[u16], k: u32) -> Vec<Vec<Jet>> {
    let mut groups: Vec<(u16, usize)> = Vec::new();
    for &f in fields {
        match groups.last_mut() {
            Some((g, c)) if *g == f => *c += 1,
            _ => groups.push((f, 1)),
        }
    }
    let mut out = Vec::new();
    let mut cur: Vec<Jet> = Vec::new();
    fill_groups(&groups, k, &mut cur, &mut out);
    out
}

fn fill_groups(groups: &[(u16, usize)], k: u32, cur: &mut Vec<Jet>, out: &mut Vec<Vec<Jet>>) {
    let Some(&(alpha, c)) = groups.first() else {
        if k == 0 {
            out.push(cur.clone());
        }
        return;
    };
    for s in 0..=k {
        for parts in partitions_into(s, c) {
            let len = cur.len();
            cur.extend(parts.iter().map(|&d| (alpha, d as u16)));
            fill_groups(&groups[1..], k - s, cur, out);
            cur.truncate(len);
        }
    }
}

/// Non-decreasing sequences of `c` non-negative integers summing to `s`.
fn partitions_into(s: u32, c: usize) -> Vec<Vec<u32>> {
    fn go(s: u32, c: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if c == 0 {
            if s == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut x = min;
        while x as usize * c <= s as usize {
            cur.push(x);
            go(s - x, c - 1, x, cur, out);
            cur.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    go(s, c, 0, &mut Vec::new(), &mut out);
    out
}

static BASES: Mutex<BTreeMap<(Vec<u16>, u32), Arc<ImageBasis>>> = Mutex::new(BTreeMap::new());

fn basis(fields: &[u16], k: u32) -> Arc<ImageBasis> {
    let key = (fields.to_vec(), k);
    if let Some(b) = BASES.lock().get(&key) {
        return b.clone();
    }
    let b = Arc::new(ImageBasis::build(fields, k));
    BASES.lock().entry(key).or_insert(b).clone()
}

/// Element of `A[[ε]] / ∂_x A[[ε]]`, stored through a density.
#[derive(Clone, Debug)]
pub struct LocalFunctional {
    pub density: DiffPoly,
}

impl LocalFunctional {
    pub fn new(density: DiffPoly) -> Self {
        LocalFunctional { density }
    }

    /// Canonical density: each cell (ε-power, field multiset, total jet order) is reduced
    /// modulo the echelon basis of the ∂_x-image, eliminating the largest monomials.
    pub fn normal_form(&self) -> DiffPoly {
        let mut cells: BTreeMap<(u32, Vec<u16>, u32), Vector> = BTreeMap::new();
        for (m, c) in self.density.terms() {
            cells
                .entry((m.eps, m.field_multiset(), m.jet_order()))
                .or_default()
                .insert(m.factors.clone(), c.clone());
        }
        let mut out = DiffPoly::zero(self.density.eps_max());
        for ((eps, fields, k), mut v) in cells {
            reduce(&basis(&fields, k).rows, &mut v);
            for (f, c) in v {
                out.add_term(JetMonomial { eps, factors: f }, c);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form().is_zero()
    }

    /// Independent test: a density is a total derivative iff all variational derivatives
    /// and its constant term vanish.
    pub fn is_zero_variational(&self) -> bool {
        if !self.density.coeff(&JetMonomial::one()).is_zero() {
            return false;
        }
        (1..=self.density.max_field()).all(|a| self.density.var_derivative(a).is_zero())
    }

    pub fn var_derivative(&self, alpha: u16) -> DiffPoly {
        self.density.var_derivative(alpha)
    }

    pub fn sub(&self, other: &LocalFunctional) -> LocalFunctional {
        LocalFunctional::new(self.density.sub(&other.density))
    }

    pub fn equals(&self, other: &LocalFunctional) -> bool {
        self.sub(other).is_zero()
    }
}

/// `{F, G} = ∫ δF/δw^α η^{αβ} ∂_x δG/δw^β dx`, returned in normal form.
pub fn poisson_bracket(f1: &LocalFunctional, f2: &LocalFunctional, eta: &MetricEta) -> LocalFunctional {
    let eps_max = f1.density.eps_max().min(f2.density.eps_max());
    let mut dens = DiffPoly::zero(eps_max);
    let n = eta.n() as u16;
    let d1: Vec<DiffPoly> = (1..=n).map(|a| f1.var_derivative(a)).collect();
    let d2: Vec<DiffPoly> = (1..=n).map(|b| f2.var_derivative(b).d_x()).collect();
    for (a, b, c) in eta.upper_support() {
        dens = dens.add(&d1[a as usize - 1].mul(&d2[b as usize - 1]).scale(&c));
    }
    LocalFunctional::new(LocalFunctional::new(dens).normal_form())
}
