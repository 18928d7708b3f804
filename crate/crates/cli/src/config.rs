//! Experiment configuration (JSON, schema version 1).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cqm_core::bundle::{GaugeField, ModelParams, Shift};
use cqm_core::cocycle::{Harmonic, LagrangianModel, PairHarmonic};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub gauge_field: Option<GaugeSpec>,
    #[serde(default)]
    pub params: Params,
    /// Overrides keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_out() -> PathBuf {
    PathBuf::from("cqm-out")
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n_particles: usize,
    pub spatial_dim: usize,
    pub masses: Vec<f64>,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default)]
    pub potential: PotentialSpec,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Free,
    Harmonic { k: f64 },
    PairHarmonic { k: f64 },
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self { n_particles: 2, spatial_dim: 1, masses: vec![1.0, 2.0], hbar: 1.0, potential: PotentialSpec::PairHarmonic { k: 0.5 } }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<LagrangianModel<f64>, CliError> {
        let params = ModelParams::new(self.n_particles, self.spatial_dim, self.masses.clone(), self.hbar).map_err(|e| CliError::Config(e.to_string()))?;
        let layout = params.layout();
        Ok(match self.potential {
            PotentialSpec::Free => LagrangianModel::free(params),
            PotentialSpec::Harmonic { k } => {
                let dim = params.dim();
                LagrangianModel::with_potential(params, Harmonic::isotropic(dim, k))
            }
            PotentialSpec::PairHarmonic { k } => LagrangianModel::with_potential(params, PairHarmonic { layout, k }),
        })
    }
}

/// Piecewise-linear gauge field; with `support`, it vanishes outside `[lo, hi]`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub samples: Vec<(f64, Vec<f64>)>,
    #[serde(default)]
    pub support: Option<(f64, f64)>,
}

impl GaugeSpec {
    pub fn build(&self) -> Result<GaugeField<f64>, CliError> {
        let samples: Vec<(f64, Shift<f64>)> = self.samples.iter().map(|(t, v)| (*t, Shift::new(v.clone()))).collect();
        match self.support {
            Some((lo, hi)) => GaugeField::with_support(samples, lo, hi),
            None => GaugeField::new(samples),
        }
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, rename = "verify-cocycle")]
    pub cocycle: CocycleParams,
    #[serde(default)]
    pub classical: ClassicalParams,
    #[serde(default)]
    pub hpf: HpfParams,
    #[serde(default)]
    pub quantum: QuantumParams,
    #[serde(default)]
    pub boost: BoostParams,
    #[serde(default)]
    pub dress: DressParams,
    #[serde(default)]
    pub frame: FrameParams,
    #[serde(default)]
    pub pathint: PathintParams,
}

macro_rules! defaults {
    ($name:ident { $($field:ident : $ty:ty = $val:expr),* $(,)? }) => {
        #[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name { $(pub $field: $ty),* }
        impl Default for $name {
            fn default() -> Self { Self { $($field: $val),* } }
        }
    };
}

defaults!(CocycleParams { probes: usize = 10_000 });
defaults!(ClassicalParams { pairs: usize = 100, slices: usize = 200, probes: usize = 20 });
defaults!(HpfParams { nt: usize = 50, nx: usize = 50, slices: usize = 8 });
defaults!(QuantumParams { points: usize = 512, steps: usize = 1000 });
defaults!(BoostParams { grids: Vec<usize> = vec![32, 64, 1024], velocity: f64 = 1.0 });
defaults!(DressParams { probes: usize = 100, points: usize = 256 });
defaults!(FrameParams { points: usize = 64 });
defaults!(PathintParams { points: usize = 512, slices: usize = 8, relational_points: usize = 1024 });

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("schema error: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("schema error: unsupported schema_version {}", cfg.schema_version)));
        }
        for (name, tol) in &cfg.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(CliError::Config(format!("schema error: tolerance {name} must be positive, got {tol}")));
            }
        }
        Ok(cfg)
    }

    pub fn model_spec(&self) -> ModelSpec {
        self.model.clone().unwrap_or_default()
    }
}
