use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::flux::FluxBuilder;
use crate::correlators::{hodge_reduce, hodge_top_integral, lambda_top_triple, psi_correlator, HodgeSpec, PsiObservable, TrivialCohft};
use crate::diffpoly::DiffPoly;
use crate::exactnum::{bernoulli_number, MultiPoly, Rational};
use crate::trees::Context;
use crate::Error;

/// One integral `∫_{M̄_{g,n}} ∏ψ_i^{d_i}` quoted by a demo.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralEntry {
    pub g: u32,
    pub psi: Vec<u32>,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct KdvReport {
    pub integrals: Vec<IntegralEntry>,
    /// `R^1_{1,1}`.
    pub flux: DiffPoly,
    /// `∂_x R^1_{1,1}`, the right-hand side of the flow `t^{1,1}`.
    pub equation: DiffPoly,
}

impl KdvReport {
    pub fn flux_line(&self) -> String {
        self.flux.display_with("w")
    }

    pub fn equation_line(&self) -> String {
        alloc::format!("d/dt[1,1] w[1,0] = {}", self.equation.display_with("w"))
    }
}

/// The KdV flux of the trivial CohFT with the Ψ observable, through `ε²`.
pub fn kdv_demo() -> Result<KdvReport, Error> {
    let obs = PsiObservable;
    let cohft = TrivialCohft::default();
    let builder = FluxBuilder::new(Context::new(&obs, &cohft), 2);
    let flux = builder.flux(1, 1)?.remove(0);
    let equation = flux.d_x();
    let integrals = vec![
        IntegralEntry { g: 0, psi: vec![0, 0, 1, 0], value: psi_correlator(0, &[0, 0, 1, 0]) },
        IntegralEntry { g: 1, psi: vec![2, 1, 0], value: psi_correlator(1, &[2, 1, 0]) },
    ];
    Ok(KdvReport { integrals, flux, equation })
}

#[derive(Clone, Debug)]
pub struct HodgeReport {
    pub m: usize,
    /// Coefficient of `ε⁶ w^{1,4}` in the generator, a polynomial in `x_1..x_M`.
    pub coefficient: MultiPoly,
    /// `∫_{M̄_3} λ_2³`.
    pub lambda2_cubed: Rational,
    /// `∫_{M̄_3} λ_1λ_2λ_3`.
    pub lambda_123: Rational,
    /// `∫_{M̄_{3,1}} λ_3λ_2λ_1ψ_1`.
    pub lambda_123_psi: Rational,
    /// `2|B_4||B_6|/576`.
    pub bernoulli_value: Rational,
    pub vanishes: bool,
}

/// Leading genus-3 term of the normal generator for the product of `M` Hodge CohFTs.
///
/// Only `g = 3, n = 1` contributes at `ε⁶ w^{1,4}`: the degree-3 part of `∏Λ(x_i)` times the
/// `λ_3` factor, with the degree-one part of the class reducing to `ψ_1 − λ_1`.
pub fn hodge_demo(m: usize) -> Result<HodgeReport, Error> {
    let spec = HodgeSpec::new(m)?;
    let vars = spec.vars();
    let lambda2_cubed = lambda_top_triple(3)?;
    let lambda_123 = hodge_top_integral(&[1, 2, 3], 3)?;
    let dilaton = Rational::from(2 * 3 - 2);
    let lambda_123_psi = &lambda_123 * &dilaton;
    let b4 = bernoulli_number(4).abs();
    let b6 = bernoulli_number(6).abs();
    let bernoulli_value = Rational::from(2) * b4 * b6 / Rational::from(576);

    let mut coefficient = MultiPoly::zero(&vars);
    for js in degree_splits(m, 3) {
        let mut idx: Vec<u32> = js.iter().copied().filter(|&j| j > 0).collect();
        idx.push(3);
        // the ψ_1 part against λ_3 ∏λ_{j_i}
        let with_psi = top_coefficient(&idx)?;
        // the −λ_1 part
        let mut with_l1 = idx.clone();
        with_l1.push(1);
        let with_lambda1 = top_coefficient(&with_l1)?;
        let c = with_psi * &lambda_123_psi - with_lambda1 * &lambda_123_psi;
        if !c.is_zero() {
            coefficient.add_term(js.clone(), c);
        }
    }
    let vanishes = coefficient.is_zero();
    Ok(HodgeReport { m, coefficient, lambda2_cubed, lambda_123, lambda_123_psi, bernoulli_value, vanishes })
}

/// Coefficient of `λ_1λ_2λ_3` after reducing a genus-3 λ-monomial; zero off degree 6.
fn top_coefficient(idx: &[u32]) -> Result<Rational, Error> {
    if idx.iter().sum::<u32>() != 6 {
        return Ok(Rational::zero());
    }
    let reduced = hodge_reduce(idx, 3)?;
    Ok(reduced.get(&vec![1, 2, 3]).cloned().unwrap_or_default())
}

/// Vectors `(j_1..j_M)` with sum `total` and each `j_i ≤ total`.
fn degree_splits(m: usize, total: u32) -> Vec<Vec<u32>> {
    if m == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in 0..=total {
        for mut rest in degree_splits(m - 1, total - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}
