use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::psi::psi_correlator;
use crate::diffpoly::MetricEta;
use crate::exactnum::Rational;
use crate::Error;

/// 1-based field index.
pub type Field = u16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableKind {
    CohftPsi,
    ObsO,
    DrD,
    FcohftPsi,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::CohftPsi => "cohft_psi",
            TableKind::ObsO => "obs_O",
            TableKind::DrD => "dr_D",
            TableKind::FcohftPsi => "fcohft_psi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cohft_psi" => Some(TableKind::CohftPsi),
            "obs_O" | "obs_o" => Some(TableKind::ObsO),
            "dr_D" | "dr_d" => Some(TableKind::DrD),
            "fcohft_psi" => Some(TableKind::FcohftPsi),
            _ => None,
        }
    }
}

/// What is integrated besides `pc · ∏ψ^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassTag {
    Plain,
    /// Product of `λ_i` over the listed indices.
    Lambda(Vec<u32>),
    /// Coefficient of `∏ a_i^{k_i}` (i = 1..n) in `D_{g,n+1}`; the last point is the special one.
    DrD(Vec<u32>),
    /// Coefficient of a monomial in `O_{g,n}`, one exponent per marking.
    ObsO(Vec<u32>),
    /// Coefficient of `∏ a_i^{k_i}` in the class `A¹_{g,n}` on `M̄_{g,n+1}`; the last point is special.
    A1(Vec<u32>),
}

impl ClassTag {
    fn per_slot(&self) -> Option<&[u32]> {
        match self {
            ClassTag::DrD(m) | ClassTag::ObsO(m) | ClassTag::A1(m) => Some(m),
            _ => None,
        }
    }

    fn with_slots(&self, v: Vec<u32>) -> ClassTag {
        match self {
            ClassTag::DrD(_) => ClassTag::DrD(v),
            ClassTag::ObsO(_) => ClassTag::ObsO(v),
            ClassTag::A1(_) => ClassTag::A1(v),
            other => other.clone(),
        }
    }

    /// Whether the last slot is distinguished and excluded from the symmetrization.
    fn fixed_last(&self) -> bool {
        matches!(self, ClassTag::DrD(_) | ClassTag::A1(_))
    }
}

/// One moduli-space integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub g: u32,
    pub fields: Vec<Field>,
    pub psi: Vec<u32>,
    pub class: ClassTag,
}

impl CorrelatorKey {
    pub fn plain(g: u32, fields: Vec<Field>, psi: Vec<u32>) -> Self {
        CorrelatorKey { g, fields, psi, class: ClassTag::Plain }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    /// Structural validation: stability, arity and index ranges.
    pub fn validate(&self, n_fields: usize) -> Result<(), Error> {
        let n = self.fields.len();
        if self.psi.len() != n {
            return Err(Error::InvalidArgument(format!("{self}: fields and psi differ in length")));
        }
        if 2 * self.g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::InvalidArgument(format!("{self}: unstable (2g-2+n <= 0)")));
        }
        if let Some(&f) = self.fields.iter().find(|&&f| f == 0 || f as usize > n_fields) {
            return Err(Error::InvalidArgument(format!("{self}: field index {f} outside 1..{n_fields}")));
        }
        match &self.class {
            ClassTag::DrD(m) | ClassTag::A1(m) if m.len() + 1 != n => {
                Err(Error::InvalidArgument(format!("{self}: monomial must have n-1 = {} entries", n - 1)))
            }
            ClassTag::ObsO(m) if m.len() != n => {
                Err(Error::InvalidArgument(format!("{self}: monomial must have n = {n} entries")))
            }
            _ => Ok(()),
        }
    }

    /// Sort slot tuples `(field, psi, exponent)` jointly; distinguished slots stay put.
    pub fn canonical(&self, first_fixed: bool) -> CorrelatorKey {
        let n = self.fields.len();
        let slots = self.class.per_slot();
        let lo = usize::from(first_fixed).min(n);
        let hi = if self.class.fixed_last() { n.saturating_sub(1) } else { n };
        let mut tuples: Vec<(Field, u32, u32)> = (lo..hi.max(lo))
            .map(|i| (self.fields[i], self.psi[i], slots.and_then(|s| s.get(i).copied()).unwrap_or(0)))
            .collect();
        tuples.sort_unstable();
        let mut fields = self.fields.clone();
        let mut psi = self.psi.clone();
        let mut mono: Vec<u32> = slots.map(|s| s.to_vec()).unwrap_or_default();
        for (k, (f, p, e)) in tuples.into_iter().enumerate() {
            fields[lo + k] = f;
            psi[lo + k] = p;
            if slots.is_some() {
                mono[lo + k] = e;
            }
        }
        let class = match &self.class {
            ClassTag::Lambda(ix) => {
                let mut ix = ix.clone();
                ix.sort_unstable();
                ClassTag::Lambda(ix)
            }
            c if slots.is_some() => c.with_slots(mono),
            c => c.clone(),
        };
        CorrelatorKey { g: self.g, fields, psi, class }
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={} fields={:?} psi={:?}", self.g, self.fields, self.psi)?;
        match &self.class {
            ClassTag::Plain => Ok(()),
            ClassTag::Lambda(ix) => write!(f, " lambda={ix:?}"),
            ClassTag::DrD(m) => write!(f, " dr_d={m:?}"),
            ClassTag::ObsO(m) => write!(f, " obs_o={m:?}"),
            ClassTag::A1(m) => write!(f, " a1={m:?}"),
        }
    }
}

/// Externally supplied correlators of one kind.
#[derive(Clone, Debug)]
pub struct CorrelatorTable {
    kind: TableKind,
    eta: MetricEta,
    trivial: bool,
    complete: BTreeSet<(u32, usize)>,
    degree_bounds: BTreeMap<(u32, usize), u32>,
    entries: BTreeMap<CorrelatorKey, Rational>,
    pub note: String,
}

impl CorrelatorTable {
    pub fn new(kind: TableKind, eta: MetricEta) -> Self {
        CorrelatorTable {
            kind,
            eta,
            trivial: false,
            complete: BTreeSet::new(),
            degree_bounds: BTreeMap::new(),
            entries: BTreeMap::new(),
            note: String::new(),
        }
    }

    /// `N = 1`, `η = 1`, plain correlators delegated to the ψ-engine.
    pub fn trivial(kind: TableKind) -> Self {
        let mut t = CorrelatorTable::new(kind, MetricEta::identity(1));
        t.trivial = true;
        t
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn eta(&self) -> &MetricEta {
        &self.eta
    }

    pub fn n_fields(&self) -> usize {
        self.eta.n()
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn set_trivial(&mut self, t: bool) {
        self.trivial = t;
    }

    pub fn declare_complete(&mut self, g: u32, n: usize) {
        self.complete.insert((g, n));
    }

    pub fn is_complete(&self, g: u32, n: usize) -> bool {
        self.complete.contains(&(g, n))
    }

    pub fn complete_pairs(&self) -> impl Iterator<Item = &(u32, usize)> {
        self.complete.iter()
    }

    /// Optional per-(g,n) bound on the Chow degree of the underlying classes.
    pub fn set_degree_bound(&mut self, g: u32, n: usize, bound: u32) {
        self.degree_bounds.insert((g, n), bound);
    }

    pub fn degree_bound(&self, g: u32, n: usize) -> Option<u32> {
        self.degree_bounds.get(&(g, n)).copied()
    }

    pub fn degree_bounds(&self) -> &BTreeMap<(u32, usize), u32> {
        &self.degree_bounds
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CorrelatorKey, &Rational)> {
        self.entries.iter()
    }

    fn canon(&self, key: &CorrelatorKey) -> CorrelatorKey {
        key.canonical(self.kind == TableKind::FcohftPsi)
    }

    /// Insert after canonicalization; a conflicting value for the same canonical key is an error.
    pub fn insert(&mut self, key: CorrelatorKey, value: Rational) -> Result<(), Error> {
        key.validate(self.n_fields())?;
        let c = self.canon(&key);
        match self.entries.get(&c) {
            Some(old) if *old != value => Err(Error::Inconsistent(format!(
                "symmetry inconsistency at {key}: {old} vs {value}"
            ))),
            Some(_) => Ok(()),
            None => {
                self.entries.insert(c, value);
                Ok(())
            }
        }
    }

    /// Value of `key`, zero if absent from a complete `(g, n)`, otherwise a missing-key error.
    pub fn lookup(&self, key: &CorrelatorKey) -> Result<Rational, Error> {
        key.validate(self.n_fields())?;
        if self.trivial && key.class == ClassTag::Plain {
            return Ok(psi_correlator(key.g, &key.psi));
        }
        let c = self.canon(key);
        if let Some(v) = self.entries.get(&c) {
            return Ok(v.clone());
        }
        if self.is_complete(key.g, key.n()) {
            Ok(Rational::zero())
        } else {
            Err(Error::MissingKey(format!("{} table has no entry {key}", self.kind.as_str())))
        }
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<&Rational> {
        self.entries.get(&self.canon(key))
    }
}
