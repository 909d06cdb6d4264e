use std::path::{Path, PathBuf};

use risbound_core::bounds::{BoundKind, NioOptions};
use risbound_core::io::load_model;
use risbound_core::optimizers::{GaParams, ES_CAP};
use risbound_core::scenario::{generate_scenario, load_set, LoadSet, ScenarioSpec};
use risbound_core::ModelParameters;
use risbound_sdp::SolverOptions;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "ES")]
    Es,
    #[serde(rename = "CD")]
    Cd,
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "P-SDR")]
    Psdr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Es, Method::Cd, Method::Ga, Method::Psdr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Es => "ES",
            Method::Cd => "CD",
            Method::Ga => "GA",
            Method::Psdr => "P-SDR",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "es" => Ok(Method::Es),
            "cd" => Ok(Method::Cd),
            "ga" => Ok(Method::Ga),
            "psdr" | "p-sdr" => Ok(Method::Psdr),
            other => Err(CliError::Config(format!("unknown method `{other}` (expected es, cd, ga, psdr)"))),
        }
    }
}

pub fn parse_bound(s: &str) -> CliResult<BoundKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "ni" => Ok(BoundKind::Ni),
        "nio" => Ok(BoundKind::Nio),
        "ibd" => Ok(BoundKind::Ibd),
        "sdr" => Ok(BoundKind::Sdr),
        other => Err(CliError::Config(format!("unknown bound `{other}` (expected ni, nio, ibd, sdr)"))),
    }
}

/// Splits a comma-separated list, drops duplicates and sorts it.
pub fn parse_list<T: Ord>(s: &str, item: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    let mut out = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(item)
        .collect::<CliResult<Vec<T>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn parse_ns(s: &str) -> CliResult<Vec<usize>> {
    let ns = parse_list(s, |t| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("invalid n_s `{}`", t.trim())))
    })?;
    if ns.contains(&0) {
        return Err(CliError::Config("n_s values must be positive".into()));
    }
    Ok(ns)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!("unknown format `{other}` (expected csv, json)"))),
        }
    }
}

/// Where the model comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    File(PathBuf),
    Generated(ScenarioSpec),
}

impl ModelSource {
    /// Row label: the file stem, or `gen-n<n_s>-s<seed>`.
    pub fn label(&self) -> String {
        match self {
            ModelSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
            ModelSource::Generated(spec) => format!("gen-n{}-s{}", spec.n_s, spec.seed),
        }
    }
}

/// Transmit and noise power for the capacity columns, in mW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityParams {
    pub p_t_mw: f64,
    pub sigma2_mw: f64,
}

impl Default for CapacityParams {
    fn default() -> Self {
        Self {
            p_t_mw: 10.0,
            sigma2_mw: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: ModelSource,
    /// Overrides the loads stored in the model.
    pub loads: Option<LoadSet>,
    pub bounds: Vec<BoundKind>,
    pub methods: Vec<Method>,
    /// Sweep points; empty means the full model only.
    pub ns: Vec<usize>,
    pub seed: u64,
    pub capacity: CapacityParams,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
    pub timing: bool,
    pub solver: SolverOptions,
    pub nio: NioOptions,
    pub ga: GaParams,
}

impl RunConfig {
    pub fn new(source: ModelSource) -> Self {
        Self {
            source,
            loads: None,
            bounds: Vec::new(),
            methods: Vec::new(),
            ns: Vec::new(),
            seed: 0,
            capacity: CapacityParams::default(),
            out: None,
            format: Format::Csv,
            jobs: None,
            timing: false,
            solver: SolverOptions::default(),
            nio: NioOptions::default(),
            ga: GaParams::default(),
        }
    }

    /// Loads the model and checks everything that can be checked before any
    /// bound or optimizer runs.
    pub fn resolve(&self) -> CliResult<ModelParameters> {
        let cap = &self.capacity;
        if !(cap.p_t_mw > 0.0 && cap.p_t_mw.is_finite()) {
            return Err(CliError::Config(format!("--pt-mw must be positive, got {}", cap.p_t_mw)));
        }
        if !(cap.sigma2_mw > 0.0 && cap.sigma2_mw.is_finite()) {
            return Err(CliError::Config(format!("--sigma2-mw must be positive, got {}", cap.sigma2_mw)));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        let model = match &self.source {
            ModelSource::File(path) => {
                let m = load_model(path)?;
                match self.loads {
                    Some(ls) => m.with_loads(ls.alpha, ls.beta)?,
                    None => m,
                }
            }
            ModelSource::Generated(spec) => {
                let mut spec = spec.clone();
                if let Some(ls) = self.loads {
                    spec.loads = ls;
                }
                spec.validate()?;
                generate_scenario(&spec)?
            }
        };
        let n = model.n_s();
        if let Some(&bad) = self.ns.iter().find(|&&k| k > n) {
            return Err(CliError::Config(format!("sweep point n_s = {bad} exceeds the model's {n} elements")));
        }
        let largest = self.ns.iter().copied().max().unwrap_or(n);
        if self.methods.contains(&Method::Es) && largest > ES_CAP {
            return Err(CliError::Config(format!(
                "exhaustive search over {largest} elements exceeds the cap of {ES_CAP}"
            )));
        }
        Ok(model)
    }

    /// Name of the load set in use: the override, a reference set matching
    /// the model's loads exactly, or `custom`.
    pub fn load_set_name(&self, model: &ModelParameters) -> String {
        if let Some(ls) = self.loads {
            return ls.name.as_str().to_string();
        }
        LoadSet::ALL
            .iter()
            .find(|ls| ls.alpha == model.alpha() && ls.beta == model.beta())
            .map(|ls| ls.name.as_str().to_string())
            .unwrap_or_else(|| "custom".to_string())
    }
}

pub fn parse_loads(s: &str) -> CliResult<LoadSet> {
    load_set(s).map_err(|_| CliError::Config(format!("unknown load set `{s}` (expected pm, pin, 01)")))
}

pub fn model_path(path: &Path) -> ModelSource {
    ModelSource::File(path.to_path_buf())
}
