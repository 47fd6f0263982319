use alloc::vec::Vec;

use crate::exactnum::Rational;
use crate::Error;

/// Symmetric nondegenerate pairing on the space of fields, with its inverse.
/// Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricEta {
    eta: Vec<Vec<Rational>>,
    inv: Vec<Vec<Rational>>,
}

impl MetricEta {
    pub fn identity(n: usize) -> Self {
        let m: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        MetricEta { eta: m.clone(), inv: m }
    }

    pub fn new(eta: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = eta.len();
        if n == 0 || eta.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("eta must be a nonempty square matrix".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if eta[i][j] != eta[j][i] {
                    return Err(Error::InvalidArgument("eta is not symmetric".into()));
                }
            }
        }
        let inv = invert(&eta).ok_or_else(|| Error::InvalidArgument("eta is not invertible".into()))?;
        Ok(MetricEta { eta, inv })
    }

    pub fn n(&self) -> usize {
        self.eta.len()
    }

    /// `η_{αβ}`.
    pub fn lower(&self, a: u16, b: u16) -> &Rational {
        &self.eta[a as usize - 1][b as usize - 1]
    }

    /// `η^{αβ}`.
    pub fn upper(&self, a: u16, b: u16) -> &Rational {
        &self.inv[a as usize - 1][b as usize - 1]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.eta
    }

    pub fn inverse_matrix(&self) -> &[Vec<Rational>] {
        &self.inv
    }

    /// Nonzero entries `(α, β, η^{αβ})`.
    pub fn upper_support(&self) -> Vec<(u16, u16, Rational)> {
        let mut v = Vec::new();
        for (i, row) in self.inv.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    v.push((i as u16 + 1, j as u16 + 1, c.clone()));
                }
            }
        }
        v
    }
}

fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
