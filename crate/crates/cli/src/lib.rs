//! Experiment runner: configuration, registry, deterministic execution and reports.

pub mod config;
pub mod experiments;
pub mod registry;
pub mod report;
pub mod rng;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use config::ExperimentConfig;
use registry::{check_spec, select, Ctx, Entry};
use report::{CheckResult, Environment, ExperimentResult, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] cqm_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol_scale: Option<f64>,
}

fn run_entry(entry: &Entry, config: &ExperimentConfig, seed: u64, out: &Path, tol_scale: f64) -> (ExperimentResult, f64) {
    let start = Instant::now();
    let mut ctx = Ctx { config, seed, dir: out.join(entry.name), artifacts: Vec::new() };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (entry.run)(&mut ctx)))
        .unwrap_or_else(|_| Err(CliError::Config(format!("experiment {} panicked", entry.name))));
    let elapsed = start.elapsed().as_secs_f64();
    let checks: Vec<CheckResult> = entry
        .checks
        .iter()
        .map(|spec| {
            let tolerance = config.tolerances.get(spec.name).copied().unwrap_or(spec.tolerance) * tol_scale;
            let tags = spec.tags.iter().map(|t| t.to_string()).collect();
            match &outcome {
                Ok(values) => {
                    let residual = values.iter().find(|(n, _)| *n == spec.name).map(|(_, v)| *v);
                    let passed = residual.is_some_and(|r| r < tolerance);
                    let error = match residual {
                        None => Some("not measured".to_string()),
                        Some(r) if r.is_nan() => Some("residual is NaN".to_string()),
                        Some(_) => None,
                    };
                    CheckResult { name: spec.name.to_string(), tags, residual: residual.filter(|r| r.is_finite()), tolerance, passed, error }
                }
                Err(e) => CheckResult { name: spec.name.to_string(), tags, residual: None, tolerance, passed: false, error: Some(e.to_string()) },
            }
        })
        .collect();
    let result = ExperimentResult {
        name: entry.name.to_string(),
        kind: entry.kind.to_string(),
        tags: entry.tags().iter().map(|t| t.to_string()).collect(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        artifacts: ctx.artifacts,
    };
    (result, elapsed)
}

/// Runs the configured experiments and writes `report.json`.
pub fn run_config(config: &ExperimentConfig, overrides: &Overrides) -> Result<RunReport, CliError> {
    let entries = select(&config.kind)?;
    for name in config.tolerances.keys() {
        if check_spec(name).is_none() {
            return Err(CliError::Config(format!("schema error: unknown check {name:?} in tolerances")));
        }
    }
    let tol_scale = overrides.tol_scale.unwrap_or(1.0);
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return Err(CliError::Config(format!("--tol-scale must be positive, got {tol_scale}")));
    }
    let randomized = entries.iter().any(|e| matches!(e.kind, "verify-cocycle" | "classical" | "dress"));
    let seed = match overrides.seed.or(config.seed) {
        Some(s) => s,
        None if randomized => return Err(CliError::Config("schema error: seed is required for randomized suites".into())),
        None => 0,
    };
    let out = overrides.out.clone().unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&out)?;

    let start = Instant::now();
    let results: Vec<(ExperimentResult, f64)> = entries.par_iter().map(|e| run_entry(e, config, seed, &out, tol_scale)).collect();
    let mut timing = BTreeMap::new();
    let mut experiments = Vec::with_capacity(results.len());
    for (r, t) in results {
        timing.insert(r.name.clone(), t);
        experiments.push(r);
    }
    timing.insert("total".to_string(), start.elapsed().as_secs_f64());
    let report = RunReport {
        schema_version: config::SCHEMA_VERSION,
        kind: config.kind.clone(),
        environment: Environment { version: env!("CARGO_PKG_VERSION").to_string(), seed, tol_scale },
        passed: experiments.iter().all(|e| e.passed),
        experiments,
        timing,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    std::fs::write(out.join("report.json"), json)?;
    Ok(report)
}

pub fn run(config_path: &Path, overrides: &Overrides) -> Result<RunReport, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    run_config(&config, overrides)
}
