use cqm_core::io::{marginal_csv, write_wave};
use cqm_core::quantum::{
    boost_covariance_check, commutator_expectation, covariant_derivative_residual, evolve, meta_action, GridSpec, HamiltonianSpec,
    PlaneWavePhase, WaveGrid,
};
use num_complex::Complex;

use crate::registry::{Ctx, Measurements};
use crate::CliError;

pub fn invariants(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let q = &ctx.config.params.quantum;
    let spec: GridSpec<f64> = GridSpec::uniform(1, 20.0, q.points)?;
    let free = HamiltonianSpec::free(vec![1.0], 1.0);

    let psi = WaveGrid::gaussian(spec.clone(), &[0.5], &[0.7], &[1.0])?;
    let trap = HamiltonianSpec::free(vec![1.0], 1.0).with_potential(&spec, |x| 0.5 * x[0] * x[0]);
    let after = evolve(&psi, &trap, 1e-3, q.steps)?;
    let drift = (after.norm() - psi.norm()).abs() * 1000.0 / q.steps as f64;

    let s0: f64 = 1.0;
    let packet = WaveGrid::gaussian(spec.clone(), &[0.0], &[s0], &[0.0])?;
    let t: f64 = 2.0;
    let spread = evolve(&packet, &free, 0.01, 200)?;
    let (_, var): (f64, f64) = spread.moments(0);
    let sigma = (s0 * s0 + (t / (2.0 * s0)) * (t / (2.0 * s0))).sqrt();
    let sigma_err = (var.sqrt() - sigma).abs();
    ctx.write("marginal.csv", marginal_csv(&spread, 0).as_bytes())?;
    let mut bin = Vec::new();
    write_wave(&mut bin, &spread)?;
    ctx.write("packet.cqmw", &bin)?;

    let g = WaveGrid::gaussian(spec, &[0.3], &[1.0], &[0.5])?;
    let comm = (commutator_expectation(&g, 0, 1.0)? - Complex::new(0.0, 1.0)).norm();
    Ok(vec![("norm-drift", drift), ("packet-spreading", sigma_err), ("commutator", comm)])
}

pub fn covariant(_ctx: &mut Ctx) -> Result<Measurements, CliError> {
    // normalised plane wave commensurate with the box
    let k = 2.0 * std::f64::consts::PI * 2.0 / 40.0;
    let spec = GridSpec::uniform(1, 20.0, 512)?;
    let mut psi = WaveGrid::from_fn(spec, 0.0, |x| Complex::from_polar(1.0, k * x[0]))?;
    psi.normalize();
    let h = HamiltonianSpec::free(vec![1.0], 1.0);
    let series = (0..5).map(|s| evolve(&psi, &h, 0.01, s + 1)).collect::<Result<Vec<_>, _>>()?;
    let phase = PlaneWavePhase { p: vec![k], masses: vec![1.0] };
    let r = covariant_derivative_residual(&series, &phase, 1.0)?;
    let ma = meta_action(&series, &phase, &[1.0, 0.3], 1.0)?;
    Ok(vec![("covariant-derivative-space", r.dx), ("covariant-derivative-time", r.dt), ("meta-action", ma.norm())])
}

pub fn boost(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let b = &ctx.config.params.boost;
    let h = HamiltonianSpec::free(vec![1.0], 1.0);
    let mut errs = Vec::new();
    let mut csv = String::from("points,error\n");
    for &n in &b.grids {
        let spec = GridSpec::uniform(1, 20.0, n)?;
        let psi = WaveGrid::gaussian(spec, &[0.0], &[1.0], &[0.0])?;
        let e = boost_covariance_check(&psi, &[b.velocity], 1.0, &h, 1)?;
        csv.push_str(&format!("{n},{e}\n"));
        errs.push(e);
    }
    ctx.write("refinement.csv", csv.as_bytes())?;
    let ratio = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let finest = *errs.last().ok_or_else(|| CliError::Config("schema error: boost.grids is empty".into()))?;
    Ok(vec![("boost-covariance", finest), ("boost-refinement", ratio)])
}
