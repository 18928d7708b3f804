use cqm_core::bundle::{Config, Shift};
use cqm_core::cocycle::{cocycle_property_residual, point_cocycle, translation_invariance_defect, CocycleAccumulator};

use crate::registry::{Ctx, Measurements};
use crate::rng::ProbeRng;
use crate::CliError;

pub fn run(ctx: &mut Ctx) -> Result<Measurements, CliError> {
    let model = ctx.config.model_spec().build()?;
    let layout = model.layout();
    let dim = model.dim();
    let probes = ctx.config.params.cocycle.probes;
    let mut rng = ProbeRng::new(ctx.seed, 1);
    let (mut worst, mut worst_inv, mut worst_phase) = (0.0f64, 0.0f64, 0.0f64);
    let mut csv = String::from("probe,residual\n");
    for k in 0..probes {
        let p = Config::new(rng.uniform(0.0, 1.0), rng.vec(dim, -2.0, 2.0))?;
        let v = Shift::new(rng.vec(dim, -2.0, 2.0));
        let x = Shift::new(rng.vec(dim, -1.0, 1.0));
        let y = Shift::new(rng.vec(dim, -1.0, 1.0));
        let cxy = point_cocycle(&model, &p, &v, &x.add(&y), &x.add(&y))?;
        let cx = point_cocycle(&model, &p, &v, &x, &x)?;
        let px = Config::new(p.t, p.x.iter().zip(&x.v).map(|(a, b)| a + b).collect())?;
        let vx = v.add(&x);
        let cy = point_cocycle(&model, &px, &vx, &y, &y)?;
        let scale = 1.0 + cxy.abs() + cx.abs() + cy.abs();
        let r = cocycle_property_residual(&model, &p, &v, &x, &y)? / scale;
        worst = worst.max(r);
        csv.push_str(&format!("{k},{r}\n"));

        let back = point_cocycle(&model, &px, &vx, &x.neg(), &x.neg())?;
        worst_inv = worst_inv.max((cx + back).abs() / (1.0 + cx.abs() + back.abs()));

        let hbar = model.hbar();
        let lhs = CocycleAccumulator::new(cxy, hbar).phase();
        let rhs = CocycleAccumulator::new(cx, hbar).combine(&CocycleAccumulator::new(cy, hbar)).phase();
        worst_phase = worst_phase.max((lhs - rhs).norm() / scale);
    }
    ctx.write("residuals.csv", csv.as_bytes())?;

    // a shift moving every particle alike, on a translation-invariant model
    let ext = if let Some(pot) = &model.potential {
        if pot.translation_invariant() {
            let pts: Vec<(Vec<f64>, Vec<f64>)> = (0..100).map(|_| (rng.vec(dim, -2.0, 2.0), rng.vec(layout.spatial_dim, -1.0, 1.0))).collect();
            translation_invariance_defect(&model, &pts)
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(vec![("cocycle-identity", worst), ("cocycle-inverse", worst_inv), ("cocycle-phase-homomorphism", worst_phase), ("external-invariance", ext)])
}
