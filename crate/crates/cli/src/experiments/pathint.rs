use cqm_core::bundle::{Config, ModelParams};
use cqm_core::classical::{hpf_table, SolverOptions};
use cqm_core::cocycle::{path_cocycle_along, LagrangianModel};
use cqm_core::dressing::frame_shift;
use cqm_core::io::{kernel_slice_csv, write_kernel};
use cqm_core::path::DiscretePath;
use cqm_core::pathint::{
    classical_split, compose, flip_kernel, kernel_fidelity, propagate_separable, propagate_wavefunction, relational_propagator,
    sliced_propagator, PropagatorKernel, SliceScheme,
};
use cqm_core::quantum::{dress_wavefunction, evolve, Axis, GridSpec, HamiltonianSpec, WaveGrid};
use num_complex::Complex;

use crate::registry::{Ctx, Measurements};
use crate::CliError;

const HALF_WIDTH: f64 = 15.0;

fn scheme(n: usize, m: usize, t0: f64, t1: f64) -> Result<SliceScheme<f64>, CliError> {
    Ok(SliceScheme::new(m, Axis::symmetric(HALF_WIDTH, n)?, t0, t1)?)
}

fn single(mass: f64) -> Result<ModelParams<f64>, CliError> {
    Ok(ModelParams::with_unit_hbar(1, 1, vec![mass])?)
}

/// Frame-change phase `c(Z_01)` along the straight relational path of
/// separation `d` (anchor 0), from the cocycle engine.
fn frame_phase(model: &LagrangianModel<f64>, d: f64, t: f64) -> Result<f64, CliError> {
    let path = DiscretePath::straight(&Config::new(0.0, vec![0.0, 0.0])?, &Config::new(t, vec![0.0, d])?, 1)?;
    let z = frame_shift(&model.layout(), &path, 0, 1)?.z;
    Ok(path_cocycle_along(model, &path, &z)?.value)
}

pub fn run(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let p = ctx.config.params.pathint.clone();
    let unit = single(1.0)?;
    let k = sliced_propagator(&unit, &scheme(p.points, p.slices, 0.0, 1.0)?)?;
    let kernel_error = k.analytic_error(1.0, 1.0);
    let uniformity = k.modulus_uniformity();
    ctx.write("kernel_slice.csv", kernel_slice_csv(&k, p.points / 2).as_bytes())?;
    let mut bin = Vec::new();
    write_kernel(&mut bin, &k)?;
    ctx.write("kernel.cqmw", &bin)?;

    let levels = [(p.points / 4, p.slices / 4), (p.points / 2, p.slices / 2)];
    let mut errs = Vec::new();
    for (n, m) in levels {
        errs.push(sliced_propagator(&unit, &scheme(n, m.max(1), 0.0, 1.0)?)?.analytic_error(1.0, 1.0));
    }
    errs.push(kernel_error);
    let refinement = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);

    // classical split against solver-built HPF values at every separation
    let model = LagrangianModel::free(unit.clone());
    let dx = k.axis.dx();
    let half = p.points as i64 / 2;
    let xs: Vec<Vec<f64>> = (-half..=half).map(|j| vec![j as f64 * dx]).collect();
    let hpf = hpf_table(&model, &Config::new(0.0, vec![0.0])?, &[1.0], &xs, 4, &SolverOptions::default())?;
    let split = classical_split(&k, &hpf, 1.0)?;
    let c = cqm_core::pathint::central_half(&k.axis);
    let mut agreement = 0.0f64;
    for (i, &a) in c.iter().enumerate() {
        for (j, &b) in c.iter().enumerate() {
            let d = k.axis.point(a) - k.axis.point(b);
            agreement = agreement.max((split.s_c[i * c.len() + j] - 0.5 * d * d).abs());
        }
    }

    let first = sliced_propagator(&unit, &scheme(p.points, p.slices / 2, 0.0, 0.5)?)?;
    let second = sliced_propagator(&unit, &scheme(p.points, p.slices / 2, 0.5, 1.0)?)?;
    let both = compose(&first, &second)?;
    let semigroup = both.central_relative_error(|x, x0| at_points(&k, x, x0));

    let spec = GridSpec::new(vec![k.axis])?;
    let psi0 = WaveGrid::gaussian(spec, &[-1.0], &[1.0], &[1.0])?;
    let a = propagate_wavefunction(&k, &psi0)?;
    let b = evolve(&psi0, &HamiltonianSpec::free(vec![1.0], 1.0), 1e-2, 100)?;
    let propagate = a.l2_distance(&b)? / b.norm();

    let pair = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0])?;
    let rs = scheme(p.relational_points, p.slices, 0.0, 1.0)?;
    let k_rel = relational_propagator(&pair, &rs, 0)?;
    let relational = k_rel.analytic_error(2.0, 1.0);
    let bare2 = sliced_propagator(&single(2.0)?, &rs)?;
    let frame_agreement = match (k_rel.split, bare2.split) {
        (Some(x), Some(y)) => (x.normalization - y.normalization).norm() / y.normalization.norm(),
        _ => f64::NAN,
    };

    let k_other = relational_propagator(&pair, &rs, 1)?;
    let pair_model = LagrangianModel::free(pair.clone());
    let n = k_rel.axis.n;
    let rdx = k_rel.axis.dx();
    let phases = (0..2 * n - 1)
        .map(|j| frame_phase(&pair_model, (j as f64 - (n as f64 - 1.0)) * rdx, 1.0))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let mut phased = k_rel.clone();
    for a in 0..n {
        for b in 0..n {
            phased.k[a * n + b] *= Complex::from_polar(1.0, phases[a + n - 1 - b]);
        }
    }
    let swap = 1.0 - kernel_fidelity(&flip_kernel(&k_other), &phased);

    let small = scheme(p.points / 2, (p.slices / 2).max(1), 0.0, 1.0)?;
    let ax = small.axis;
    let ka = sliced_propagator(&single(1.0)?, &small)?;
    let kb = sliced_propagator(&single(2.0)?, &small)?;
    let grid = GridSpec::new(vec![ax, ax])?;
    let state = WaveGrid::gaussian(grid, &[0.0, 1.0], &[1.5, 1.0], &[0.0, -0.5])?;
    let bare = propagate_separable(&[&ka, &kb], &state)?;
    let after = dress_wavefunction(&bare, &pair.layout(), 0, None)?;
    let k_small = relational_propagator(&pair, &small, 0)?;
    let rel = propagate_wavefunction(&k_small, &dress_wavefunction(&state, &pair.layout(), 0, None)?)?;
    let consistency = 1.0 - rel.inner(&after)?.norm() / (rel.norm() * after.norm());

    Ok(vec![
        ("kernel-error", kernel_error),
        ("kernel-uniformity", uniformity),
        ("kernel-refinement", refinement),
        ("split-normalization", split.deviation),
        ("split-hpf-agreement", agreement),
        ("semigroup", semigroup),
        ("propagate-vs-evolve", propagate),
        ("relational-kernel", relational),
        ("split-frame-agreement", frame_agreement),
        ("anchor-swap", swap),
        ("dressed-bare-consistency", consistency),
    ])
}

fn at_points(k: &PropagatorKernel<f64>, x: f64, x0: f64) -> Complex<f64> {
    let n = k.axis.n;
    let idx = |v: f64| ((v - k.axis.lo) / k.axis.dx()).round() as usize % n;
    k.at(idx(x), idx(x0))
}
