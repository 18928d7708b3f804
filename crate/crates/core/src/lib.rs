//! Cocyclic formulation of N-particle classical and quantum mechanics on the
//! configuration bundle `T x R^{dN}`, with its relational (dressed) version.

pub mod bundle;
pub mod classical;
pub mod cocycle;
pub mod dressing;
pub mod error;
pub mod io;
pub mod linalg;
pub mod path;
pub mod pathint;
pub mod quantum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Double-precision aliases.
pub type ModelParams = bundle::ModelParams<f64>;
pub type Config = bundle::Config<f64>;
pub type Shift = bundle::Shift<f64>;
pub type GaugeField = bundle::GaugeField<f64>;
pub type DiscretePath = path::DiscretePath<f64>;
pub type LagrangianModel = cocycle::LagrangianModel<f64>;
pub type HpfTable = classical::HpfTable<f64>;
pub type WaveGrid = quantum::WaveGrid<f64>;
pub type GridSpec = quantum::GridSpec<f64>;
pub type PropagatorKernel = pathint::PropagatorKernel<f64>;
