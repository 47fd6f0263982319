//! JSON-lines correlator tables.
//!
//! The first non-blank line is the header, every following line one entry:
//!
//! ```text
//! {"kind": "dr_D", "N": 1, "eta": [["1"]], "complete": [[1, 2]], "trivial": true}
//! {"g": 1, "fields": [1, 1], "psi": [0, 0], "class": {"tag": "dr_d", "monomial": [2]}, "value": "-1/24"}
//! ```
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use intobs_core::correlators::{ClassTag, CorrelatorKey, CorrelatorTable, TableKind};
use intobs_core::diffpoly::MetricEta;
use intobs_core::exactnum::Rational;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::CliError;

/// Environment variable holding extra directories to search for relative table paths.
pub const TABLE_PATH_VAR: &str = "COHFT_TABLE_PATH";

/// A rational read from either a JSON integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(|v| Q(Rational::from(v))).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                v.trim().parse::<Rational>().map(Q).map_err(|_| E::custom(format!("bad rational {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<Q>>>,
    #[serde(default)]
    pub complete: Vec<(u32, usize)>,
    #[serde(default)]
    pub trivial: bool,
    /// `[g, n, d]`: the classes on `M̄_{g,n}` live in Chow degree at most `d`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degree_bounds: Vec<(u32, usize, u32)>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassJson {
    Plain,
    Lambda { indices: Vec<u32> },
    DrD { monomial: Vec<u32> },
    ObsO { monomial: Vec<u32> },
    A1 { monomial: Vec<u32> },
}

impl From<ClassJson> for ClassTag {
    fn from(c: ClassJson) -> Self {
        match c {
            ClassJson::Plain => ClassTag::Plain,
            ClassJson::Lambda { indices } => ClassTag::Lambda(indices),
            ClassJson::DrD { monomial } => ClassTag::DrD(monomial),
            ClassJson::ObsO { monomial } => ClassTag::ObsO(monomial),
            ClassJson::A1 { monomial } => ClassTag::A1(monomial),
        }
    }
}

impl From<&ClassTag> for ClassJson {
    fn from(c: &ClassTag) -> Self {
        match c {
            ClassTag::Plain => ClassJson::Plain,
            ClassTag::Lambda(v) => ClassJson::Lambda { indices: v.clone() },
            ClassTag::DrD(v) => ClassJson::DrD { monomial: v.clone() },
            ClassTag::ObsO(v) => ClassJson::ObsO { monomial: v.clone() },
            ClassTag::A1(v) => ClassJson::A1 { monomial: v.clone() },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub g: u32,
    pub fields: Vec<u16>,
    pub psi: Vec<u32>,
    pub class: ClassJson,
    pub value: Q,
}

/// Resolve `p` directly, then against each directory of `COHFT_TABLE_PATH`.
pub fn resolve_table_path(p: &Path) -> Result<PathBuf, CliError> {
    if p.exists() || p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    if let Some(dirs) = std::env::var_os(TABLE_PATH_VAR) {
        for dir in std::env::split_paths(&dirs) {
            let c = dir.join(p);
            if c.exists() {
                return Ok(c);
            }
        }
    }
    Ok(p.to_path_buf())
}

pub fn load_table(path: &Path, expected: Option<TableKind>) -> Result<CorrelatorTable, CliError> {
    let path = resolve_table_path(path)?;
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    parse_table(&text, expected).map_err(|(line, msg)| CliError::Table { path, line, msg })
}

/// Parse a table from JSON-lines text; errors carry the 1-based line number.
pub fn parse_table(text: &str, expected: Option<TableKind>) -> Result<CorrelatorTable, (usize, String)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((hl, hdr)) = lines.next() else {
        return Err((1, "empty table: missing header line".into()));
    };
    let header: Header = serde_json::from_str(hdr).map_err(|e| (hl + 1, format!("header: {e}")))?;
    let kind = TableKind::parse(&header.kind).ok_or_else(|| (hl + 1, format!("unknown table kind {:?}", header.kind)))?;
    if let Some(want) = expected {
        if want != kind {
            return Err((hl + 1, format!("expected a {} table, found {}", want.as_str(), kind.as_str())));
        }
    }
    if header.n == 0 {
        return Err((hl + 1, "N must be at least 1".into()));
    }
    let eta = match header.eta {
        None => MetricEta::identity(header.n),
        Some(rows) => {
            if rows.len() != header.n || rows.iter().any(|r| r.len() != header.n) {
                return Err((hl + 1, format!("eta must be {0}x{0}", header.n)));
            }
            let m = rows.into_iter().map(|r| r.into_iter().map(|q| q.0).collect()).collect();
            MetricEta::new(m).map_err(|e| (hl + 1, format!("eta: {e}")))?
        }
    };
    if header.trivial && header.n != 1 {
        return Err((hl + 1, "a trivial table must have N = 1".into()));
    }
    let mut table = CorrelatorTable::new(kind, eta);
    table.set_trivial(header.trivial);
    table.note = header.note;
    for (g, n) in header.complete {
        table.declare_complete(g, n);
    }
    for (g, n, d) in header.degree_bounds {
        table.set_degree_bound(g, n, d);
    }
    for (i, line) in lines {
        let e: Entry = serde_json::from_str(line).map_err(|e| (i + 1, format!("entry: {e}")))?;
        let key = CorrelatorKey { g: e.g, fields: e.fields, psi: e.psi, class: e.class.into() };
        table.insert(key.clone(), e.value.0).map_err(|err| (i + 1, format!("entry {key}: {err}")))?;
    }
    Ok(table)
}

/// Inverse of [`parse_table`]; entries come out canonicalized and sorted.
pub fn write_table(table: &CorrelatorTable) -> String {
    let eta = table.eta().matrix().iter().map(|r| r.iter().map(|x| Q(x.clone())).collect()).collect();
    let header = Header {
        kind: table.kind().as_str().into(),
        n: table.n_fields(),
        eta: Some(eta),
        complete: table.complete_pairs().copied().collect(),
        trivial: table.is_trivial(),
        degree_bounds: table.degree_bounds().iter().map(|(&(g, n), &d)| (g, n, d)).collect(),
        note: table.note.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (k, v) in table.entries() {
        let e = Entry {
            g: k.g,
            fields: k.fields.clone(),
            psi: k.psi.clone(),
            class: (&k.class).into(),
            value: Q(v.clone()),
        };
        out.push_str(&serde_json::to_string(&e).expect("entry serializes"));
        out.push('\n');
    }
    out
}
