//! Run configuration: command-line flags over an optional TOML file over defaults.
use std::path::{Path, PathBuf};

use intobs_core::trees::ProbeMode;
use serde::Deserialize;

use crate::error::CliError;

/// Keys accepted in the `--config` file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cohft: Option<String>,
    pub obs: Option<String>,
    pub dr_table: Option<PathBuf>,
    pub eps: Option<u32>,
    pub p_max: Option<u32>,
    pub max_points: Option<usize>,
    pub probes: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Settings after merging; per-command defaults for `eps` and `p_max` are applied by the commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub workers: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub cohft: String,
    pub obs: String,
    pub dr_table: Option<PathBuf>,
    pub eps: Option<u32>,
    pub p_max: Option<u32>,
    pub max_points: Option<usize>,
    pub probes: ProbeMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workers: 1,
            seed: 0,
            out: None,
            cohft: "trivial".into(),
            obs: "psi".into(),
            dr_table: None,
            eps: None,
            p_max: None,
            max_points: None,
            probes: ProbeMode::Full,
        }
    }
}

pub fn parse_probes(s: &str) -> Result<ProbeMode, CliError> {
    match s {
        "zero" => Ok(ProbeMode::Zero),
        "full" => Ok(ProbeMode::Full),
        _ => Err(CliError::Usage(format!("probes must be zero or full, got {s:?}"))),
    }
}

/// Values given on the command line, each overriding the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub cohft: Option<String>,
    pub obs: Option<String>,
    pub dr_table: Option<PathBuf>,
    pub eps: Option<u32>,
    pub p_max: Option<u32>,
    pub max_points: Option<usize>,
    pub probes: Option<String>,
}

impl RunConfig {
    pub fn merge(file: FileConfig, flags: Overrides) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let probes = match flags.probes.or(file.probes) {
            Some(s) => parse_probes(&s)?,
            None => d.probes,
        };
        let cfg = RunConfig {
            workers: flags.workers.or(file.workers).unwrap_or(d.workers),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            out: flags.out.or(file.out),
            cohft: flags.cohft.or(file.cohft).unwrap_or(d.cohft),
            obs: flags.obs.or(file.obs).unwrap_or(d.obs),
            dr_table: flags.dr_table.or(file.dr_table),
            eps: flags.eps.or(file.eps),
            p_max: flags.p_max.or(file.p_max),
            max_points: flags.max_points.or(file.max_points),
            probes,
        };
        if cfg.workers == 0 {
            return Err(CliError::Usage("workers must be positive".into()));
        }
        if cfg.eps.is_some_and(|e| e % 2 != 0) {
            return Err(CliError::Usage("eps (the truncation 2G) must be even".into()));
        }
        if cfg.max_points == Some(0) {
            return Err(CliError::Usage("max-points must be positive".into()));
        }
        Ok(cfg)
    }
}
