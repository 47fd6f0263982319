//! Argument parsing and command dispatch.
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use intobs_core::correlators::{
    psi_correlator, Cohft, CorrelatorKey, CorrelatorTable, Observable, PsiObservable, TableCohft, TableKind,
    TableObservable, TrivialCohft,
};
use intobs_core::diffpoly::{DiffPoly, MiuraMap};
use intobs_core::exactnum::Rational;
use intobs_core::hierarchy::{check_commutation, hodge_demo, kdv_demo, FluxBuilder, SeriesBounds, TauData};
use intobs_core::piident::{verify_dilaton_identities, PiOptions};
use intobs_core::trees::{check_geometric_master, check_lrt, check_master, CheckOptions, CheckReport, Context, Lrt2Mode};
use serde::Serialize;
use serde_json::json;

use crate::algebra::{run_algebra_suite, AlgebraOptions};
use crate::config::{FileConfig, Overrides, RunConfig};
use crate::error::CliError;
use crate::report::{diffpoly_json, multipoly_json, CheckJson, PiReportJson, Summary};
use crate::table_io::load_table;

#[derive(Debug, Parser)]
#[command(name = "intobs", version, about = "Integrable observables: correlators, relation checks and hierarchies")]
pub struct Cli {
    /// TOML file with defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one CohFT correlator.
    Correlator(CorrelatorArgs),
    /// Check a relation over ranges of (g, n, m) and emit a JSON report.
    Check(CheckArgs),
    /// Build and inspect hierarchies.
    Hierarchy {
        #[command(subcommand)]
        action: HierarchyCmd,
    },
}

#[derive(Debug, Args)]
pub struct CorrelatorArgs {
    #[arg(long)]
    pub g: u32,
    /// ψ-exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub psi: Vec<u32>,
    /// Field indices (default all 1).
    #[arg(long, value_delimiter = ',')]
    pub fields: Option<Vec<u16>>,
    /// A cohft_psi table; without it the trivial CohFT is used.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Lrt1,
    Lrt2,
    Lrtm,
    Master,
    Gmaster,
    PiDilaton,
    Algebra,
}

/// Inclusive range `a..b` or a single value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span(pub u32, pub u32);

impl Span {
    fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.0..=self.1
    }
}

fn parse_span(s: &str) -> Result<Span, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let span = match s.split_once("..") {
        Some((a, b)) => Span(num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            Span(v, v)
        }
    };
    if span.0 > span.1 {
        return Err(format!("empty range {s}"));
    }
    Ok(span)
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// `trivial` or a cohft_psi table.
    #[arg(long)]
    pub cohft: Option<String>,
    /// `psi` or an obs_O table.
    #[arg(long)]
    pub obs: Option<String>,
    /// dr_D table for positive-genus DR correlators.
    #[arg(long)]
    pub dr_table: Option<PathBuf>,
    /// Cap on points per vertex when the CohFT declares no degree bound.
    #[arg(long)]
    pub max_points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub relation: Relation,
    #[arg(long, value_parser = parse_span)]
    pub g: Option<Span>,
    #[arg(long, value_parser = parse_span)]
    pub n: Option<Span>,
    #[arg(long, value_parser = parse_span)]
    pub m: Option<Span>,
    #[command(flatten)]
    pub source: SourceArgs,
    /// LRT-2 on every b-coefficient instead of b2^0 only.
    #[arg(long)]
    pub strong: bool,
    /// ψ-probes: `zero` or `full`.
    #[arg(long)]
    pub probes: Option<String>,
    /// pi-dilaton: also compare against the direct pushforward (slow beyond n = 4).
    #[arg(long)]
    pub pushforward: bool,
    /// pi-dilaton: shift a Bernoulli number, `j:delta` (negative control).
    #[arg(long)]
    pub perturb_bernoulli: Option<String>,
    /// pi-dilaton: list passing entries too.
    #[arg(long)]
    pub all: bool,
    /// algebra: number of random cases.
    #[arg(long)]
    pub count: Option<usize>,
    /// algebra: truncation ε^eps.
    #[arg(long)]
    pub eps: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum HierarchyCmd {
    /// Fluxes and Hamiltonian densities.
    Build {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: Option<u32>,
        #[arg(long)]
        p_max: Option<u32>,
        /// Cross-check every flux against the tau-function route.
        #[arg(long)]
        tau: bool,
        #[arg(long)]
        json: bool,
    },
    /// The KdV example: trivial CohFT, Ψ observable.
    Kdv {
        #[arg(long)]
        json: bool,
    },
    /// Leading coefficient for a product of M Hodge CohFTs.
    Hodge {
        #[arg(long = "M", short = 'M')]
        m: usize,
        #[arg(long)]
        json: bool,
    },
    /// Miura maps to the DR hierarchy and to normal coordinates.
    Miura {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        eps: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Commutation of pairs of flows, e.g. `--pairs 1,1:1,2`.
    Commute {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, num_args = 1.., required = true, value_parser = parse_pair)]
        pairs: Vec<FlowPair>,
        #[arg(long)]
        eps: Option<u32>,
    },
}

/// `((β, p), (β', p'))`.
pub type FlowPair = ((u16, u32), (u16, u32));

fn parse_pair(s: &str) -> Result<FlowPair, String> {
    let flow = |t: &str| -> Result<(u16, u32), String> {
        let (b, p) = t.split_once(',').ok_or_else(|| format!("flow {t:?} must be beta,p"))?;
        Ok((b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?, p.trim().parse().map_err(|e| format!("{p:?}: {e}"))?))
    };
    let (a, b) = s.split_once(':').ok_or_else(|| format!("pair {s:?} must be beta,p:beta,p"))?;
    Ok((flow(a)?, flow(b)?))
}

/// What a command produced: text for stdout (or `--out`) and the exit code.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn overrides(cli: &Cli) -> Overrides {
    let mut o =
        Overrides { workers: cli.workers, seed: cli.seed, out: cli.out.clone(), ..Default::default() };
    let src = match &cli.command {
        Command::Check(a) => {
            o.probes = a.probes.clone();
            o.eps = a.eps;
            Some(&a.source)
        }
        Command::Hierarchy { action } => match action {
            HierarchyCmd::Build { source, eps, p_max, .. } => {
                o.eps = *eps;
                o.p_max = *p_max;
                Some(source)
            }
            HierarchyCmd::Miura { source, eps, .. } | HierarchyCmd::Commute { source, eps, .. } => {
                o.eps = *eps;
                Some(source)
            }
            _ => None,
        },
        Command::Correlator(_) => None,
    };
    if let Some(s) = src {
        o.cohft = s.cohft.clone();
        o.obs = s.obs.clone();
        o.dr_table = s.dr_table.clone();
        o.max_points = s.max_points;
    }
    o
}

pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    RunConfig::merge(file, overrides(cli))
}

/// Parse-free entry point: resolve the configuration, size the pool and run.
pub fn execute(cli: &Cli) -> Result<(RunConfig, Output), CliError> {
    let cfg = resolve_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let out = pool.install(|| run(cli, &cfg))?;
    Ok((cfg, out))
}

pub fn run(cli: &Cli, cfg: &RunConfig) -> Result<Output, CliError> {
    match &cli.command {
        Command::Correlator(a) => cmd_correlator(a),
        Command::Check(a) => cmd_check(a, cfg),
        Command::Hierarchy { action } => cmd_hierarchy(action, cfg),
    }
}

fn cmd_correlator(a: &CorrelatorArgs) -> Result<Output, CliError> {
    let n = a.psi.len();
    if 2 * a.g as i64 - 2 + n as i64 <= 0 {
        return Err(CliError::Usage(format!("M_{{{},{}}} is unstable (2g-2+n <= 0)", a.g, n)));
    }
    let fields = a.fields.clone().unwrap_or_else(|| vec![1; n]);
    if fields.len() != n {
        return Err(CliError::Usage(format!("{} fields for {} psi exponents", fields.len(), n)));
    }
    let (value, provenance) = match &a.table {
        Some(p) => {
            let t = load_table(p, Some(TableKind::CohftPsi))?;
            let v = t.lookup(&CorrelatorKey::plain(a.g, fields, a.psi.clone()))?;
            (v, if t.is_trivial() { "builtin" } else { "table" })
        }
        None => {
            if fields.iter().any(|&f| f != 1) {
                return Err(CliError::Usage("the trivial CohFT has only field 1; pass --table".into()));
            }
            (psi_correlator(a.g, &a.psi), "builtin")
        }
    };
    Ok(Output::ok(format!("{value}\nprovenance: {provenance}\n")))
}

/// The CohFT, observable and DR table selected by the configuration.
pub struct Sources {
    pub cohft: Box<dyn Cohft>,
    pub obs: Box<dyn Observable>,
    pub dr: Option<CorrelatorTable>,
}

impl Sources {
    pub fn load(cfg: &RunConfig) -> Result<Self, CliError> {
        let cohft: Box<dyn Cohft> = match cfg.cohft.as_str() {
            "trivial" => Box::new(TrivialCohft::default()),
            p => Box::new(TableCohft::new(Arc::new(load_table(p.as_ref(), Some(TableKind::CohftPsi))?))?),
        };
        let obs: Box<dyn Observable> = match cfg.obs.as_str() {
            "psi" => Box::new(PsiObservable),
            p => {
                let t = load_table(p.as_ref(), Some(TableKind::ObsO))?;
                if t.n_fields() != cohft.n_fields() || t.eta() != cohft.eta() {
                    return Err(CliError::Usage(format!("{p}: N and eta differ from the CohFT")));
                }
                Box::new(TableObservable::new(Arc::new(t))?)
            }
        };
        let dr = match &cfg.dr_table {
            Some(p) => {
                let t = load_table(p, Some(TableKind::DrD))?;
                if t.n_fields() != cohft.n_fields() {
                    return Err(CliError::Usage(format!("{}: N differs from the CohFT", p.display())));
                }
                Some(t)
            }
            None => None,
        };
        Ok(Sources { cohft, obs, dr })
    }

    pub fn context(&self) -> Context<'_> {
        Context::new(self.obs.as_ref(), self.cohft.as_ref()).with_dr_table(self.dr.as_ref())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_check(a: &CheckArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    match a.relation {
        Relation::PiDilaton => return check_pi(a),
        Relation::Algebra => return check_algebra(a, cfg),
        _ => {}
    }
    let (m_span, name) = match a.relation {
        Relation::Lrt1 => (Span(1, 1), "lrt1"),
        Relation::Lrt2 => (Span(2, 2), "lrt2"),
        Relation::Lrtm => (a.m.unwrap_or(Span(3, 3)), "lrtm"),
        Relation::Master => (a.m.unwrap_or(Span(1, 2)), "master"),
        _ => (a.m.unwrap_or(Span(1, 2)), "gmaster"),
    };
    if matches!(a.relation, Relation::Lrt1 | Relation::Lrt2) && a.m.is_some_and(|s| s != m_span) {
        return Err(CliError::Usage(format!("{name} fixes m = {}", m_span.0)));
    }
    let g_span = a.g.unwrap_or(Span(0, 1));
    let n_span = a.n.unwrap_or(Span(1, 3));
    let mut cases = Vec::new();
    for g in g_span.iter() {
        for n in n_span.iter() {
            for m in m_span.iter() {
                let chi = 2 * g as i64 - 2 + n as i64;
                let stable = match a.relation {
                    Relation::Lrt2 | Relation::Lrtm => chi + m as i64 > 0,
                    _ => n >= 1 && chi + m as i64 > 0 && m >= 1,
                };
                if stable {
                    cases.push((g, n as usize, m as usize));
                }
            }
        }
    }
    let src = Sources::load(cfg)?;
    let ctx = src.context();
    let opts = CheckOptions { probes: cfg.probes, lrt2: if a.strong { Lrt2Mode::Strong } else { Lrt2Mode::Weak } };
    let relation = a.relation;
    let reports: Vec<CheckReport> = cases
        .par_iter()
        .map(|&(g, n, m)| match relation {
            Relation::Lrt1 | Relation::Lrt2 | Relation::Lrtm => check_lrt(&ctx, m, g, n, &opts),
            Relation::Master => check_master(&ctx, m, g, n, &opts),
            _ => check_geometric_master(&ctx, m, g, n, &opts),
        })
        .collect::<Result<_, _>>()?;
    let mut summary = Summary::default();
    let reports: Vec<CheckJson> = reports.iter().map(CheckJson::from).collect();
    for r in &reports {
        summary.add(&r.status);
    }
    let code = summary.exit_code();
    let text = to_json(&json!({
        "relation": name,
        "cohft": cfg.cohft,
        "obs": cfg.obs,
        "summary": summary,
        "reports": reports,
    }));
    Ok(Output { text, code })
}

fn check_pi(a: &CheckArgs) -> Result<Output, CliError> {
    let g_span = a.g.unwrap_or(Span(0, 5));
    let n_span = a.n.unwrap_or(Span(1, 6));
    let m_span = a.m.unwrap_or(Span(1, 8));
    if m_span.0 == 0 {
        return Err(CliError::Usage("m starts at 1".into()));
    }
    let perturb = match &a.perturb_bernoulli {
        Some(s) => {
            let bad = || CliError::Usage(format!("--perturb-bernoulli expects j:delta, got {s:?}"));
            let (j, d) = s.split_once(':').ok_or_else(bad)?;
            Some((j.trim().parse::<usize>().map_err(|_| bad())?, d.trim().parse::<Rational>().map_err(|_| bad())?))
        }
        None => None,
    };
    let opts = PiOptions { perturb, pushforward: a.pushforward };
    let mut cases = Vec::new();
    for g in g_span.iter() {
        for n in n_span.iter().filter(|&n| n >= 1) {
            if 2 * g as i64 - 2 + n as i64 > 0 {
                cases.push((g, n as usize));
            }
        }
    }
    let reports = cases
        .par_iter()
        .map(|&(g, n)| {
            let mut r = verify_dilaton_identities(g, n, m_span.1, &opts)?;
            r.entries.retain(|e| e.m >= m_span.0);
            Ok(r)
        })
        .collect::<Result<Vec<_>, intobs_core::Error>>()?;
    let mut summary = Summary::default();
    let reports: Vec<PiReportJson> = reports.iter().map(|r| PiReportJson::new(r, a.all)).collect();
    for r in &reports {
        summary.add(&r.status);
    }
    let code = summary.exit_code();
    let text = to_json(&json!({
        "relation": "pi-dilaton",
        "m": [m_span.0, m_span.1],
        "summary": summary,
        "reports": reports,
    }));
    Ok(Output { text, code })
}

fn check_algebra(a: &CheckArgs, cfg: &RunConfig) -> Result<Output, CliError> {
    let opts = AlgebraOptions { seed: cfg.seed, count: a.count.unwrap_or(100), eps: cfg.eps.unwrap_or(4) };
    let r = run_algebra_suite(opts)?;
    let code = if r.passed() { 0 } else { 1 };
    let text = to_json(&json!({
        "relation": "algebra",
        "status": if r.passed() { "pass" } else { "fail" },
        "report": r,
    }));
    Ok(Output { text, code })
}

fn flux_name(alpha: usize, beta: u16, p: u32) -> String {
    format!("R^{alpha}_{{{beta},{p}}}")
}

fn miura_lines(name: &str, m: &MiuraMap, out: &mut String) {
    for (i, t) in m.targets.iter().enumerate() {
        out.push_str(&format!("{name}[{}] = {}\n", i + 1, t.display_with("w")));
    }
    out.push_str(&format!("{name} identity: {}\n", m.is_identity()));
}

fn builder<'a>(src: &'a Sources, cfg: &RunConfig, eps: u32) -> FluxBuilder<'a> {
    let b = FluxBuilder::new(src.context(), eps);
    match cfg.max_points {
        Some(k) => b.with_max_points(k),
        None => b,
    }
}

fn cmd_hierarchy(action: &HierarchyCmd, cfg: &RunConfig) -> Result<Output, CliError> {
    match action {
        HierarchyCmd::Kdv { json } => {
            let k = kdv_demo()?;
            if *json {
                let ints: Vec<_> = k
                    .integrals
                    .iter()
                    .map(|e| json!({"g": e.g, "psi": e.psi, "value": e.value.to_string()}))
                    .collect();
                return Ok(Output::ok(to_json(&json!({
                    "integrals": ints,
                    "flux": diffpoly_json(&k.flux),
                    "equation": diffpoly_json(&k.equation),
                }))));
            }
            let mut s = String::new();
            for e in &k.integrals {
                let taus: Vec<String> = e.psi.iter().map(|d| format!("tau_{d}")).collect();
                s.push_str(&format!("<{}>_{} = {}\n", taus.join(" "), e.g, e.value));
            }
            s.push_str(&format!("{} = {}\n", flux_name(1, 1, 1), k.flux_line()));
            s.push_str(&k.equation_line());
            s.push('\n');
            Ok(Output::ok(s))
        }
        HierarchyCmd::Hodge { m, json } => {
            let h = hodge_demo(*m)?;
            if *json {
                return Ok(Output::ok(to_json(&json!({
                    "M": h.m,
                    "coefficient": multipoly_json(&h.coefficient),
                    "lambda2_cubed": h.lambda2_cubed.to_string(),
                    "lambda_123": h.lambda_123.to_string(),
                    "lambda_123_psi": h.lambda_123_psi.to_string(),
                    "bernoulli_value": h.bernoulli_value.to_string(),
                }))));
            }
            let s = format!(
                "M = {}\n\
                 coefficient of eps^6*w[1,4]: {}\n\
                 int lambda_2^3 over M_3 = {}\n\
                 int lambda_1*lambda_2*lambda_3 over M_3 = {}\n\
                 int lambda_3*lambda_2*lambda_1*psi_1 over M_3,1 = {}\n\
                 2*|B_4|*|B_6|/576 = {}\n",
                h.m, h.coefficient, h.lambda2_cubed, h.lambda_123, h.lambda_123_psi, h.bernoulli_value
            );
            Ok(Output::ok(s))
        }
        HierarchyCmd::Build { tau, json, .. } => {
            let eps = cfg.eps.unwrap_or(2);
            let p_max = cfg.p_max.unwrap_or(2);
            let src = Sources::load(cfg)?;
            let b = builder(&src, cfg, eps);
            let tau_data = if *tau {
                Some(TauData::build(src.obs.as_ref(), src.cohft.as_ref(), SeriesBounds::new(eps, eps + p_max + 2))?)
            } else {
                None
            };
            let set = b.flux_set(p_max, tau_data.as_ref())?;
            let nf = src.cohft.n_fields() as u16;
            let mut hams: Vec<((u16, u32), DiffPoly)> = Vec::new();
            for beta in 1..=nf {
                for p in 0..p_max {
                    hams.push(((beta, p), b.hamiltonian(beta, p)?));
                }
            }
            if *json {
                let fluxes: Vec<_> = set
                    .iter()
                    .flat_map(|(&(beta, p), comps)| {
                        comps.iter().enumerate().map(move |(a, r)| {
                            json!({"alpha": a + 1, "beta": beta, "p": p, "terms": diffpoly_json(r)})
                        })
                    })
                    .collect();
                let hs: Vec<_> = hams
                    .iter()
                    .map(|((beta, p), h)| json!({"beta": beta, "p": p, "terms": diffpoly_json(h)}))
                    .collect();
                return Ok(Output::ok(to_json(&json!({"eps": eps, "fluxes": fluxes, "hamiltonians": hs}))));
            }
            let mut s = format!("eps^{eps} truncation, p <= {p_max}\n");
            for (&(beta, p), comps) in &set {
                for (a, r) in comps.iter().enumerate() {
                    s.push_str(&format!("{} = {}\n", flux_name(a + 1, beta, p), r.display_with("w")));
                }
            }
            for ((beta, p), h) in &hams {
                s.push_str(&format!("h_{{{beta},{p}}} = {}\n", h.display_with("w")));
            }
            Ok(Output::ok(s))
        }
        HierarchyCmd::Miura { json, .. } => {
            let eps = cfg.eps.unwrap_or(4);
            let src = Sources::load(cfg)?;
            let b = builder(&src, cfg, eps);
            let to_dr = b.miura_to_dr()?;
            let normal = b.normal_miura()?;
            if *json {
                let t = |m: &MiuraMap| m.targets.iter().map(diffpoly_json).collect::<Vec<_>>();
                return Ok(Output::ok(to_json(&json!({
                    "eps": eps,
                    "to_dr": t(&to_dr),
                    "normal": t(&normal),
                    "normal_generator": diffpoly_json(&b.normal_generator()?),
                }))));
            }
            let mut s = String::new();
            miura_lines("u_dr", &to_dr, &mut s);
            miura_lines("u_norm", &normal, &mut s);
            Ok(Output::ok(s))
        }
        HierarchyCmd::Commute { pairs, .. } => {
            let eps = cfg.eps.unwrap_or(4);
            let src = Sources::load(cfg)?;
            let b = builder(&src, cfg, eps);
            let nf = src.cohft.n_fields() as u16;
            if pairs.iter().any(|(x, y)| x.0 == 0 || y.0 == 0 || x.0 > nf || y.0 > nf) {
                return Err(CliError::Usage(format!("flow index beta must lie in 1..{nf}")));
            }
            let p_max = pairs.iter().map(|(x, y)| x.1.max(y.1)).max().unwrap_or(0);
            let set = b.flux_set(p_max, None)?;
            let rep = check_commutation(&set, pairs, eps)?;
            let all = rep.iter().all(|e| e.commute);
            let mut s = String::new();
            for e in &rep {
                s.push_str(&e.describe());
                s.push('\n');
            }
            s.push_str(&format!("commute: {all}\n"));
            Ok(Output { text: s, code: if all { 0 } else { 1 } })
        }
    }
}
