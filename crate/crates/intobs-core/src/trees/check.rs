use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::assemble::{
    ab_vars, all_insertions, integrate_a1, integrate_b, integrate_upsilon, integrate_xi, Context, Insertions,
};
use crate::correlators::Field;
use crate::exactnum::{MultiPoly, Rational};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProbeMode {
    /// Only the insertion `ψ^0`.
    #[default]
    Zero,
    /// Every ψ-monomial able to detect a class above the degree bound.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Lrt2Mode {
    /// Only the `b2^0` coefficient, all powers of `b1`.
    #[default]
    Weak,
    /// All `b` coefficients.
    Strong,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub probes: ProbeMode,
    pub lrt2: Lrt2Mode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unsupported(String),
}

impl Status {
    pub fn as_str(&self) -> &str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unsupported(_) => "unsupported",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub fields: Vec<Field>,
    pub probe: Vec<u32>,
    pub monomial: String,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub relation: String,
    pub g: u32,
    pub n: usize,
    pub m: usize,
    pub status: Status,
    /// Number of (fields, probe) insertions evaluated.
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn new(relation: String, g: u32, n: usize, m: usize) -> Self {
        CheckReport { relation, g, n, m, status: Status::Pass, checked: 0, violations: Vec::new() }
    }

    fn unsupported(relation: String, g: u32, n: usize, m: usize, why: String) -> Self {
        let mut r = Self::new(relation, g, n, m);
        r.status = Status::Unsupported(why);
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn finish(mut self) -> Self {
        if !self.violations.is_empty() {
            self.status = Status::Fail;
        }
        self
    }

    /// Record every term of `p` accepted by `bad`.
    fn scan<F: Fn(&[u32]) -> bool>(&mut self, ins: &Insertions, p: &MultiPoly, bad: F) {
        self.checked += 1;
        for (e, c) in p.sorted_terms() {
            if bad(e) {
                self.violations.push(Violation {
                    fields: ins.fields.clone(),
                    probe: ins.probe.clone(),
                    monomial: p.fmt_monomial(e),
                    value: c.clone(),
                });
            }
        }
    }
}

fn dim(g: u32, len: usize) -> i64 {
    3 * g as i64 - 3 + len as i64
}

fn insertions_for(ctx: &Context<'_>, g: u32, len: usize, bound: i64, mode: ProbeMode) -> Vec<Insertions> {
    let max_probe = match mode {
        ProbeMode::Zero => 0,
        ProbeMode::Full => (dim(g, len) - bound - 1).max(0) as u32,
    };
    all_insertions(len, ctx.cohft.n_fields(), max_probe)
}

fn a_degree(e: &[u32], n: usize) -> i64 {
    e[..n].iter().map(|&x| x as i64).sum()
}

/// Check the `m`-th tree relation for `B^m_{g,n}`.
pub fn check_lrt(ctx: &Context<'_>, m: usize, g: u32, n: usize, opts: &CheckOptions) -> Result<CheckReport, Error> {
    let name = match (m, opts.lrt2) {
        (2, Lrt2Mode::Strong) => String::from("LRT-2 (strong)"),
        _ => format!("LRT-{m}"),
    };
    if 2 * g as i64 - 2 + n as i64 + m as i64 <= 0 {
        return Err(Error::InvalidArgument(format!("unstable (g,n,m) = ({g},{n},{m})")));
    }
    match m {
        0 => {
            if g != 0 {
                let why = String::from("LRT-0 is only available in genus 0, where A = Ψ");
                return Ok(CheckReport::unsupported(name, g, n, m, why));
            }
            let mut r = CheckReport::new(name, g, n, m);
            let vars = ab_vars(n, 0);
            for ins in insertions_for(ctx, g, n, -1, opts.probes) {
                let b = integrate_b(ctx, g, n, 0, &ins)?;
                let mut psi = MultiPoly::zero(&vars);
                let budget = dim(g, n) - ins.probe.iter().map(|&x| x as i64).sum::<i64>();
                if budget >= 0 {
                    for k in all_insertions(n, 1, budget as u32) {
                        let d: Vec<u32> = k.probe.iter().zip(&ins.probe).map(|(a, b)| a + b).collect();
                        psi.add_term(k.probe.clone(), ctx.cohft.correlator(g, &ins.fields, &d)?);
                    }
                }
                r.scan(&ins, &(b - psi), |_| true);
            }
            Ok(r.finish())
        }
        1 => {
            let bound = 2 * g as i64 - 1;
            let mut r = CheckReport::new(name, g, n, m);
            if n == 0 {
                return Err(Error::InvalidArgument("LRT-1 needs n >= 1".into()));
            }
            for ins in insertions_for(ctx, g, n + 1, bound, opts.probes) {
                let b = integrate_b(ctx, g, n, 1, &ins)?.filter(|e| e[n] == 0);
                let a = integrate_a1(ctx, g, n, &ins)?;
                r.scan(&ins, &(b - a), |e| a_degree(e, n) > bound);
            }
            Ok(r.finish())
        }
        _ => {
            let bound = 2 * g as i64 - 2 + m as i64;
            let weak = m == 2 && opts.lrt2 == Lrt2Mode::Weak;
            let mut r = CheckReport::new(name, g, n, m);
            for ins in insertions_for(ctx, g, n + m, bound, opts.probes) {
                let mut b = integrate_b(ctx, g, n, m, &ins)?;
                if weak {
                    b = b.filter(|e| e[n + 1] == 0);
                }
                r.scan(&ins, &b, |e| a_degree(e, n) > bound);
            }
            Ok(r.finish())
        }
    }
}

/// Degree bound on the master class `Ξ^m_{g,n}`.
pub fn check_master(ctx: &Context<'_>, m: usize, g: u32, n: usize, opts: &CheckOptions) -> Result<CheckReport, Error> {
    if m == 0 {
        return Err(Error::InvalidArgument("master relations need m >= 1".into()));
    }
    let bound = if m == 1 { 2 * g as i64 - 1 } else { 2 * g as i64 - 2 + m as i64 };
    let mut r = CheckReport::new(format!("M-{m}"), g, n, m);
    for ins in insertions_for(ctx, g, n + m, bound, opts.probes) {
        let mut xi = integrate_xi(ctx, g, n, m, &ins)?;
        if m == 1 {
            xi = xi.filter(|e| e[n] == 0);
        }
        r.scan(&ins, &xi, |e| a_degree(e, n) > bound);
    }
    Ok(r.finish())
}

/// Cohomological degree bound `2g − 2 + m` on `Υ^m_{g,n}`, detected through ψ-probes. Needs
/// the CohFT to declare a degree bound.
pub fn check_geometric_master(
    ctx: &Context<'_>,
    m: usize,
    g: u32,
    n: usize,
    _opts: &CheckOptions,
) -> Result<CheckReport, Error> {
    let name = format!("GM-{m}");
    if m == 0 {
        return Err(Error::InvalidArgument("master relations need m >= 1".into()));
    }
    let Some(delta) = ctx.cohft.degree_bound(g, n + m) else {
        let why = String::from("the CohFT declares no degree bound");
        return Ok(CheckReport::unsupported(name, g, n, m, why));
    };
    let bound = 2 * g as i64 - 2 + m as i64;
    let d = dim(g, n + m);
    let mut r = CheckReport::new(name, g, n, m);
    let max_probe = d - delta as i64 - bound - 1;
    if max_probe < 0 {
        return Ok(r);
    }
    for ins in all_insertions(n + m, ctx.cohft.n_fields(), max_probe as u32) {
        let u = integrate_upsilon(ctx, g, n, m, &ins)?;
        r.scan(&ins, &u, |_| true);
    }
    Ok(r.finish())
}

/// Unit insertions with `ψ^0` everywhere.
pub fn unit_insertions(len: usize) -> Insertions {
    Insertions { fields: vec![1; len], probe: vec![0; len] }
}
