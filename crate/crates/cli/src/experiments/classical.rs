use cqm_core::bundle::{Config, GaugeField, ModelParams, Shift};
use cqm_core::classical::{
    action, action_gauge_transformed, el_residual, flat_connection, gauge_split_rhs, hj_residual, hpf_table, noether_charge,
    solve_critical_path, SolverOptions,
};
use cqm_core::cocycle::{path_linear_cocycle, Harmonic, LagrangianModel, PairHarmonic};
use cqm_core::io::{hpf_csv, path_csv};

use super::{max_abs, random_gauge, random_path, uniform_times};
use crate::registry::{Ctx, Measurements};
use crate::rng::ProbeRng;
use crate::CliError;

pub fn gauge_split(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let model = ctx.config.model_spec().build()?;
    let dim = model.dim();
    let mut rng = ProbeRng::new(ctx.seed, 2);
    let mut worst = 0.0f64;
    for _ in 0..ctx.config.params.classical.pairs {
        let path = random_path(&mut rng, dim, 64);
        let g = random_gauge(&mut rng, dim);
        let direct = action_gauge_transformed(&model, &path, &g)?;
        let split = gauge_split_rhs(&model, &path, &g)?;
        worst = worst.max((direct - split).abs() / (1.0 + direct.abs()));
    }
    let g = match &ctx.config.gauge_field {
        Some(spec) => spec.build()?,
        None => GaugeField::boost(&Shift::new(vec![0.5; dim]), 0.0, 1.0)?,
    };
    if g.samples().first().map(|s| s.1.len()) != Some(dim) {
        return Err(CliError::Config(format!("schema error: gauge_field samples must have {dim} components")));
    }
    let path = random_path(&mut rng, dim, 64);
    let direct = action_gauge_transformed(&model, &path, &g)?;
    let split = gauge_split_rhs(&model, &path, &g)?;
    Ok(vec![("gauge-split", worst), ("gauge-split-config", (direct - split).abs() / (1.0 + direct.abs()))])
}

pub fn variational(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let m = ctx.config.params.classical.slices;
    let opts = SolverOptions::default();
    let mut rng = ProbeRng::new(ctx.seed, 3);

    let free = LagrangianModel::free(ModelParams::with_unit_hbar(2, 2, vec![1.0, 2.0])?);
    let p0 = Config::new(0.0, rng.vec(4, -1.0, 1.0))?;
    let p1 = Config::new(1.5, rng.vec(4, -1.0, 1.0))?;
    let sol = solve_critical_path(&free, &p0, &p1, m, &opts)?;
    let line = max_abs(sol.path.x.iter().zip(&sol.path.t).flat_map(|(x, t)| {
        let s = (t - p0.t) / (p1.t - p0.t);
        x.iter().enumerate().map(|(c, xc)| xc - (p0.x[c] + s * (p1.x[c] - p0.x[c]))).collect::<Vec<_>>()
    }));
    let free_el = max_abs(el_residual(&free, &sol.path)?.into_iter().flatten());
    ctx.write("free_path.csv", path_csv(&sol.path).as_bytes())?;

    let params = ModelParams::with_unit_hbar(1, 1, vec![1.0])?;
    let harm = LagrangianModel::with_potential(params, Harmonic::isotropic(1, 1.0));
    let h0 = Config::new(0.0, vec![0.0])?;
    let h1 = Config::new(1.0, vec![1f64.sin()])?;
    let hs = solve_critical_path(&harm, &h0, &h1, m, &opts)?;
    let sine = max_abs(hs.path.x.iter().zip(&hs.path.t).map(|(x, t)| x[0] - t.sin()));
    let harm_el = max_abs(el_residual(&harm, &hs.path)?.into_iter().flatten());
    ctx.write("harmonic_path.csv", path_csv(&hs.path).as_bytes())?;

    // central differences of the action along endpoint-fixed variations
    let (mut fd, mut lin) = (0.0f64, 0.0f64);
    let eps = 1e-4;
    for _ in 0..ctx.config.params.classical.probes {
        let a = rng.vec(3, -1.0, 1.0);
        let chi: Vec<Vec<f64>> = hs
            .path
            .t
            .iter()
            .map(|t| vec![a.iter().enumerate().map(|(j, aj)| aj * ((j as f64 + 1.0) * std::f64::consts::PI * t).sin()).sum()])
            .collect();
        let plus = hs.path.shifted(&chi.iter().map(|c| vec![eps * c[0]]).collect::<Vec<_>>());
        let minus = hs.path.shifted(&chi.iter().map(|c| vec![-eps * c[0]]).collect::<Vec<_>>());
        fd = fd.max(((action(&harm, &plus)? - action(&harm, &minus)?) / (2.0 * eps)).abs());
        lin = lin.max(path_linear_cocycle(&harm, &hs.path, &chi)?.abs());
    }

    // total momentum along a critical path of a translation-invariant model
    let layout = free.layout();
    let springs = LagrangianModel::with_potential(ModelParams::with_unit_hbar(2, 2, vec![1.0, 2.0])?, PairHarmonic { layout, k: 0.7 });
    let sp = solve_critical_path(&springs, &p0, &p1, m, &opts)?;
    let q = noether_charge(&springs, &sp.path, &layout.replicate(&[1.0, 0.0]))?;
    let drift = max_abs(q.iter().map(|v| v - q[0])) / (1.0 + q[0].abs());

    Ok(vec![
        ("free-critical-path", line),
        ("harmonic-critical-path", sine),
        ("free-el-residual", free_el),
        ("harmonic-el-residual", harm_el),
        ("stationarity", fd),
        ("linear-cocycle-stationarity", lin),
        ("noether-charge", drift),
    ])
}

pub fn hpf(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let p = &ctx.config.params.hpf;
    let model = LagrangianModel::free(ModelParams::with_unit_hbar(1, 1, vec![1.0])?);
    let p0 = Config::new(0.0, vec![0.0])?;
    let ts = uniform_times(1.0, 2.0, p.nt - 1);
    let xs: Vec<Vec<f64>> = uniform_times(-1.0, 1.0, p.nx - 1).into_iter().map(|x| vec![x]).collect();
    let tab = hpf_table(&model, &p0, &ts, &xs, p.slices, &SolverOptions::default())?;
    let exact = tab.free_closed_form(&model);
    let closed = max_abs(tab.s.iter().flatten().zip(exact.iter().flatten()).map(|(a, b)| a - b));
    let hj = hj_residual(&tab, &model)?;
    let curl = flat_connection(&tab, model.hbar())?.curl()?;
    ctx.write("hpf.csv", hpf_csv(&tab).as_bytes())?;
    Ok(vec![("hpf-closed-form", closed), ("hamilton-jacobi", hj), ("flat-connection-curl", curl)])
}
