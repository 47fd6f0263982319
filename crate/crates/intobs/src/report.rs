//! JSON shapes of the machine-readable reports.
use intobs_core::diffpoly::DiffPoly;
use intobs_core::exactnum::MultiPoly;
use intobs_core::piident::{PiEntry, PiReport};
use intobs_core::trees::{CheckReport, Status, Violation};
use serde::Serialize;

use crate::table_io::Q;

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub monomial: String,
    pub value: Q,
    pub fields: Vec<u16>,
    pub probe: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub relation: String,
    pub g: u32,
    pub n: usize,
    pub m: usize,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub checked: usize,
    pub violations: Vec<ViolationJson>,
}

fn reason(s: &Status) -> Option<String> {
    match s {
        Status::Unsupported(why) => Some(why.clone()),
        _ => None,
    }
}

impl From<&Violation> for ViolationJson {
    fn from(v: &Violation) -> Self {
        ViolationJson { monomial: v.monomial.clone(), value: Q(v.value.clone()), fields: v.fields.clone(), probe: v.probe.clone() }
    }
}

impl From<&CheckReport> for CheckJson {
    fn from(r: &CheckReport) -> Self {
        CheckJson {
            relation: r.relation.clone(),
            g: r.g,
            n: r.n,
            m: r.m,
            status: r.status.as_str().into(),
            reason: reason(&r.status),
            checked: r.checked,
            violations: r.violations.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PiEntryJson {
    pub identity: String,
    pub m: u32,
    pub generator: String,
    pub status: String,
    pub residual: String,
}

impl From<&PiEntry> for PiEntryJson {
    fn from(e: &PiEntry) -> Self {
        PiEntryJson {
            identity: e.identity.clone(),
            m: e.m,
            generator: e.generator.clone(),
            status: e.status.as_str().into(),
            residual: e.residual.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PiReportJson {
    pub g: u32,
    pub n: usize,
    pub m_max: u32,
    pub status: String,
    pub checked: usize,
    /// All entries with `full`, otherwise only the failing ones.
    pub entries: Vec<PiEntryJson>,
}

impl PiReportJson {
    pub fn new(r: &PiReport, full: bool) -> Self {
        let entries = r.entries.iter().filter(|e| full || e.status != Status::Pass).map(Into::into).collect();
        PiReportJson {
            g: r.g,
            n: r.n,
            m_max: r.m_max,
            status: if r.passed() { "pass" } else { "fail" }.into(),
            checked: r.entries.len(),
            entries,
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub unsupported: usize,
}

impl Summary {
    pub fn add(&mut self, status: &str) {
        match status {
            "pass" => self.pass += 1,
            "fail" => self.fail += 1,
            _ => self.unsupported += 1,
        }
    }

    /// 1 on any failure, 2 when something could not be checked, otherwise 0.
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            1
        } else if self.unsupported > 0 {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DiffPolyTerm {
    pub eps: u32,
    pub jets: Vec<(u16, u16)>,
    pub coeff: Q,
}

/// Sorted term list of a differential polynomial.
pub fn diffpoly_json(p: &DiffPoly) -> Vec<DiffPolyTerm> {
    let mut terms: Vec<DiffPolyTerm> =
        p.terms().map(|(m, c)| DiffPolyTerm { eps: m.eps, jets: m.factors.clone(), coeff: Q(c.clone()) }).collect();
    terms.sort_by(|a, b| (a.eps, &a.jets).cmp(&(b.eps, &b.jets)));
    terms
}

#[derive(Debug, Serialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: Q,
}

pub fn multipoly_json(p: &MultiPoly) -> Vec<PolyTerm> {
    p.sorted_terms().into_iter().map(|(e, c)| PolyTerm { exponents: e.clone(), coeff: Q(c.clone()) }).collect()
}
