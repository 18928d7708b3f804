pub mod classical;
pub mod cocycle;
pub mod dressing;
pub mod pathint;
pub mod quantum;

use cqm_core::bundle::{GaugeField, Shift};
use cqm_core::path::DiscretePath;

use crate::rng::ProbeRng;

pub(crate) fn uniform_times(t0: f64, t1: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|k| t0 + (t1 - t0) * k as f64 / m as f64).collect()
}

/// Smooth random path `a + b t + c sin(3 t)` per coordinate on `[0, 1]`.
pub(crate) fn random_path(rng: &mut ProbeRng, dim: usize, m: usize) -> DiscretePath<f64> {
    let coef: Vec<[f64; 3]> = (0..dim).map(|_| [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)]).collect();
    DiscretePath::from_fn(uniform_times(0.0, 1.0, m), |t| coef.iter().map(|c| c[0] + c[1] * t + c[2] * (3.0 * t).sin()).collect())
        .expect("uniform times are increasing")
}

/// Random gauge field with knots inside `[0.1, 0.9]`, vanishing outside.
pub(crate) fn random_gauge(rng: &mut ProbeRng, dim: usize) -> GaugeField<f64> {
    let amps = rng.vec(dim, -1.0, 1.0);
    let freq = rng.uniform(0.5, 2.0);
    let samples = (1..16)
        .map(|k| {
            let t = 0.1 + 0.8 * k as f64 / 16.0;
            let b = (std::f64::consts::PI * (t - 0.1) / 0.8).sin().powi(2);
            (t, Shift::new(amps.iter().enumerate().map(|(c, a)| a * b * (1.0 + 0.5 * (freq * (c as f64 + 1.0) * t).cos())).collect()))
        })
        .collect();
    GaugeField::with_support(samples, 0.1, 0.9).expect("knots lie inside the support")
}

pub(crate) fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}
