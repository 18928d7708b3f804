use cqm_core::bundle::{Config, ModelParams};
use cqm_core::classical::{solve_critical_path, SolverOptions};
use cqm_core::cocycle::LagrangianModel;
use cqm_core::dressing::{dress_config, dress_path, dressed_action_split, dressed_critical_path, identity_suite, relational_kinetic_density, DressingChoice, IdentityReport, IDENTITY_NAMES};
use cqm_core::path::Frame;
use cqm_core::quantum::{aligned_relative_error, dress_wavefunction, evolve, frame_change_local, Axis, GridSpec, HamiltonianSpec, WaveGrid};
use num_complex::Complex;

use super::{max_abs, random_gauge, random_path};
use crate::registry::{Ctx, Measurements};
use crate::rng::ProbeRng;
use crate::CliError;

fn three_particles() -> Result<LagrangianModel<f64>, CliError> {
    Ok(LagrangianModel::free(ModelParams::with_unit_hbar(3, 1, vec![1.0, 2.5, 0.7])?))
}

fn anchor_pair(rng: &mut ProbeRng, n: usize) -> (usize, usize) {
    let i = rng.index(n);
    let j = (i + 1 + rng.index(n - 1)) % n;
    (i, j)
}

pub fn identities(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let model = three_particles()?;
    let layout = model.layout();
    let mut rng = ProbeRng::new(ctx.seed, 8);
    let mut report = IdentityReport::default();
    let mut split = 0.0f64;
    let mut csv = String::from("probe,anchor_i,anchor_j,max_residual\n");
    for probe in 0..ctx.config.params.dress.probes {
        let path = random_path(&mut rng, 3, 64);
        let g = random_gauge(&mut rng, 3);
        let (i, j) = anchor_pair(&mut rng, 3);
        let r = identity_suite(&model, &path, i, j, &g)?;
        csv.push_str(&format!("{probe},{i},{j},{}\n", r.max()));
        report.merge_max(&r);
        let (a, b) = dressed_action_split(&model, &path, DressingChoice::new(&layout, i)?)?;
        split = split.max((a - b).abs() / (1.0 + a.abs()));
    }
    ctx.write("identities.csv", csv.as_bytes())?;

    // L(dressed x, dressed v) against sum_{k != i} m_k/2 |v_k - v_i|^2
    let mut pointwise = 0.0f64;
    for _ in 0..100 {
        let x = rng.vec(3, -2.0, 2.0);
        let v = rng.vec(3, -2.0, 2.0);
        let i = rng.index(3);
        let u = DressingChoice::new(&layout, i)?;
        let xd = dress_config(&layout, &Config::new(0.0, x)?, u)?;
        let vd: Vec<f64> = v.iter().map(|c| c - v[i]).collect();
        let lhs = model.lagrangian(&xd.xbar, &vd);
        let rhs = relational_kinetic_density(&model, &v, i);
        pointwise = pointwise.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }

    let mut out: Measurements = IDENTITY_NAMES.iter().map(|n| (*n, report.get(n).unwrap_or(f64::NAN))).collect();
    out.push(("dressed-lagrangian-pointwise", pointwise));
    out.push(("dressed-action-split", split));
    Ok(out)
}

pub fn consistency(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let model = three_particles()?;
    let layout = model.layout();
    let opts = SolverOptions::default();
    let mut rng = ProbeRng::new(ctx.seed, 9);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p0 = Config::new(0.0, rng.vec(3, -1.0, 1.0))?;
        let p1 = Config::new(rng.uniform(0.5, 2.0), rng.vec(3, -1.0, 1.0))?;
        let u = DressingChoice::new(&layout, rng.index(3))?;
        let bare = solve_critical_path(&model, &p0, &p1, 40, &opts)?;
        let q0 = dress_config(&layout, &p0, u)?;
        let q1 = dress_config(&layout, &p1, u)?;
        let rel = dressed_critical_path(&model, &q0, &q1, u, 40, &opts)?;
        let dressed = dress_path(&layout, &bare.path, u)?;
        worst = worst.max(max_abs(dressed.x.iter().flatten().zip(rel.path.x.iter().flatten()).map(|(a, b)| a - b)));
    }
    Ok(vec![("relational-critical-path", worst)])
}

pub fn commutation(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let n = ctx.config.params.dress.points;
    let params = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0])?;
    let layout = params.layout();
    let ax = Axis::symmetric(16.0, n)?;
    let spec = GridSpec::new(vec![ax, ax])?;
    // product in the anchor particle
    let mut psi0 = WaveGrid::from_fn(spec, 0.0, |x: &[f64]| {
        let a = (-(x[0] - 0.2) * (x[0] - 0.2) / 2.0).exp();
        Complex::from_polar(a * (-(x[1] - 1.0) * (x[1] - 1.0) / 1.5).exp(), -0.7 * x[1])
    })?;
    psi0.normalize();
    let bare = evolve(&psi0, &HamiltonianSpec::bare(&params), 1e-2, 100)?;
    let late = dress_wavefunction(&bare, &layout, 0, None)?;
    let early = dress_wavefunction(&psi0, &layout, 0, None)?;
    let rel = evolve(&early, &HamiltonianSpec::relational(&params, 0)?, 1e-2, 100)?;
    Ok(vec![("dress-evolve-commutation", aligned_relative_error(&rel, &late)?)])
}

pub fn frame(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let n = ctx.config.params.frame.points;
    let layout = three_particles()?.layout();
    let ax = Axis::symmetric(6.0, n)?;
    let spec = GridSpec::new(vec![ax, ax])?;
    let psi = WaveGrid::new(
        spec.clone(),
        0.0,
        spec.sample(|x: &[f64]| Complex::from_polar((-(x[0] - 0.5) * (x[0] - 0.5) - 0.5 * (x[1] + 1.0) * (x[1] + 1.0)).exp(), x[0] * x[1])),
        Frame::Relational { anchor: 0 },
    )?;
    // box-periodic so wrapped representatives carry the same phase
    let w = 2.0 * std::f64::consts::PI / 12.0;
    let c = move |x: &[f64]| 0.4 * (w * x[1]).sin() - 0.7 * (w * x[2]).cos();
    let there = frame_change_local(&psi, &layout, 2, 1.0, c)?;
    let mut a: Vec<f64> = psi.amps.iter().map(|v| v.norm()).collect();
    let mut b: Vec<f64> = there.amps.iter().map(|v| v.norm()).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let modulus = max_abs(a.iter().zip(&b).map(|(x, y)| x - y));
    let norm = (there.norm() - psi.norm()).abs();
    let back = frame_change_local(&there, &layout, 0, 1.0, |y| -c(&[0.0, y[1] - y[0], -y[0]]))?;
    let fid = psi.inner(&back)?.norm() / psi.norm_sq();
    Ok(vec![("frame-change-modulus", modulus), ("frame-change-norm", norm), ("frame-change-round-trip", 1.0 - fid)])
}
