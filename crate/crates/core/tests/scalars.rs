use cqm_core::bundle::{Config, GaugeField, ModelParams, Shift};
use cqm_core::classical::{action_gauge_transformed, gauge_split_rhs, solve_critical_path, SolverOptions};
use cqm_core::cocycle::{cocycle_property_residual, LagrangianModel};
use cqm_core::path::DiscretePath;
use cqm_core::quantum::{evolve, Axis, GridSpec, HamiltonianSpec, WaveGrid};
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn gauge_split_is_exact_over_rationals() {
    let params = ModelParams::with_unit_hbar(2, 1, vec![q(1, 1), q(3, 2)]).unwrap();
    let model = LagrangianModel::free(params);
    let path = DiscretePath::from_fn((0..=6).map(|k| q(k, 6)).collect(), |t| vec![t.clone() * t.clone(), q(1, 3) - t.clone()]).unwrap();
    let g = GaugeField::new(vec![
        (q(0, 1), Shift::new(vec![q(1, 5), q(-1, 7)])),
        (q(1, 2), Shift::new(vec![q(2, 3), q(1, 4)])),
        (q(1, 1), Shift::new(vec![q(-1, 2), q(0, 1)])),
    ])
    .unwrap();
    assert_eq!(action_gauge_transformed(&model, &path, &g).unwrap(), gauge_split_rhs(&model, &path, &g).unwrap());
}

#[test]
fn cocycle_identity_is_exact_over_rationals() {
    let params = ModelParams::with_unit_hbar(1, 2, vec![q(5, 3)]).unwrap();
    let model = LagrangianModel::free(params);
    let p = Config::new(q(1, 2), vec![q(1, 3), q(-2, 9)]).unwrap();
    let v = Shift::new(vec![q(7, 5), q(1, 8)]);
    let a = Shift::new(vec![q(2, 11), q(-3, 4)]);
    let b = Shift::new(vec![q(-5, 6), q(1, 13)]);
    let r = cocycle_property_residual(&model, &p, &v, &a, &b).unwrap();
    assert_eq!(r, q(0, 1));
}

#[test]
fn single_precision_solver_and_propagator() {
    let params = ModelParams::with_unit_hbar(1, 1, vec![1.0f32]).unwrap();
    let model = LagrangianModel::free(params);
    let opts = SolverOptions { tol: 1e-4, ..SolverOptions::default() };
    let sol = solve_critical_path(&model, &Config::new(0.0f32, vec![0.0]).unwrap(), &Config::new(1.0, vec![2.0]).unwrap(), 20, &opts).unwrap();
    for (k, x) in sol.path.x.iter().enumerate() {
        assert!((x[0] - 2.0 * sol.path.t[k]).abs() < 1e-4);
    }

    let spec = GridSpec::new(vec![Axis::symmetric(10.0f32, 128).unwrap()]).unwrap();
    let psi = WaveGrid::gaussian(spec, &[0.0], &[1.0], &[1.0]).unwrap();
    let out = evolve(&psi, &HamiltonianSpec::free(vec![1.0f32], 1.0), 1e-2, 100).unwrap();
    assert!((out.norm() - 1.0).abs() < 1e-4);
}
