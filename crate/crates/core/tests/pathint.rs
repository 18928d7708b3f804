use cqm_core::bundle::{Config, ModelParams};
use cqm_core::classical::{hpf_table, SolverOptions};
use cqm_core::cocycle::LagrangianModel;
use cqm_core::path::Frame;
use cqm_core::pathint::*;
use cqm_core::quantum::{dress_wavefunction, evolve, Axis, GridSpec, HamiltonianSpec, WaveGrid};
use num_complex::Complex;

fn unit() -> ModelParams<f64> {
    ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap()
}

fn scheme(n: usize, m: usize, t: f64) -> SliceScheme<f64> {
    SliceScheme::new(m, Axis::symmetric(15.0, n).unwrap(), 0.0, t).unwrap()
}

#[test]
fn sliced_kernel_matches_the_free_propagator() {
    let k = sliced_propagator(&unit(), &scheme(512, 8, 1.0)).unwrap();
    let err = k.analytic_error(1.0, 1.0);
    let uni = k.modulus_uniformity();
    let split = k.split.unwrap();
    let expect = analytic_kernel(1.0, 1.0, 1.0, 0.0);
    println!("err {err:e} uniformity {uni:e} deviation {:e}", split.deviation);
    assert!(err < 1e-2);
    assert!(uni < 1e-3);
    assert!(split.deviation < 1e-3);
    assert!((split.normalization - expect).norm() / expect.norm() < 1e-3);
}

#[test]
fn error_decreases_under_refinement() {
    let errs: Vec<f64> = [(128, 2), (256, 4), (512, 8)]
        .iter()
        .map(|&(n, m)| sliced_propagator(&unit(), &scheme(n, m, 1.0)).unwrap().analytic_error(1.0, 1.0))
        .collect();
    println!("{errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2]);
}

#[test]
fn composition_is_a_semigroup() {
    let p = unit();
    let half = sliced_propagator(&p, &scheme(512, 4, 0.5)).unwrap();
    let mut second = sliced_propagator(&p, &SliceScheme::new(4, half.axis, 0.5, 1.0).unwrap()).unwrap();
    second.split = None;
    let full = sliced_propagator(&p, &scheme(512, 8, 1.0)).unwrap();
    let both = compose(&half, &second).unwrap();
    let err = both.central_relative_error(|x, x0| {
        let n = full.axis.n;
        let idx = |v: f64| ((v - full.axis.lo) / full.axis.dx()).round() as usize % n;
        full.at(idx(x), idx(x0))
    });
    println!("semigroup {err:e}");
    assert!(err < 1e-3);
    assert!(compose(&second, &half).is_err());
}

#[test]
fn propagation_agrees_with_split_step() {
    let k = sliced_propagator(&unit(), &scheme(512, 8, 1.0)).unwrap();
    let spec = GridSpec::new(vec![k.axis]).unwrap();
    let psi0 = WaveGrid::gaussian(spec, &[-1.0], &[1.0], &[1.0]).unwrap();
    let a = propagate_wavefunction(&k, &psi0).unwrap();
    let b = evolve(&psi0, &HamiltonianSpec::free(vec![1.0], 1.0), 1e-2, 100).unwrap();
    let rel = a.l2_distance(&b).unwrap() / b.norm();
    println!("propagate vs evolve {rel:e}");
    assert!(rel < 1e-2);
    assert!((a.t - 1.0).abs() < 1e-15);
}

#[test]
fn short_times_approach_the_delta() {
    let k = sliced_propagator(&unit(), &scheme(256, 1, 1e-3)).unwrap();
    let spec = GridSpec::new(vec![k.axis]).unwrap();
    let psi0 = WaveGrid::gaussian(spec, &[0.0], &[2.0], &[0.3]).unwrap();
    let out = propagate_wavefunction(&k, &psi0).unwrap();
    assert!(out.l2_distance(&psi0).unwrap() < 1e-3);
}

#[test]
fn classical_split_reads_the_hpf_table() {
    let p = unit();
    let k = sliced_propagator(&p, &scheme(512, 8, 1.0)).unwrap();
    let model = LagrangianModel::free(p);
    let dx = k.axis.dx();
    let xs: Vec<Vec<f64>> = (-256..=256).map(|j| vec![j as f64 * dx]).collect();
    let hpf = hpf_table(&model, &Config::new(0.0, vec![0.0]).unwrap(), &[1.0], &xs, 4, &SolverOptions::default()).unwrap();
    let split = classical_split(&k, &hpf, 1.0).unwrap();
    let c = central_half(&k.axis);
    let mut worst: f64 = 0.0;
    for (i, &a) in c.iter().enumerate() {
        for (j, &b) in c.iter().enumerate() {
            let d = k.axis.point(a) - k.axis.point(b);
            worst = worst.max((split.s_c[i * c.len() + j] - 0.5 * d * d).abs());
        }
    }
    assert!(worst < 1e-9);
    assert!(split.deviation < 1e-3);
    assert!((split.normalization - k.split.unwrap().normalization).norm() < 1e-9);
    let short = hpf_table(&model, &Config::new(0.0, vec![0.0]).unwrap(), &[1.0], &xs[100..150], 4, &SolverOptions::default()).unwrap();
    assert!(classical_split(&k, &short, 1.0).is_err());
}

#[test]
fn relational_kernel_uses_the_free_mass_and_swaps_anchors() {
    let p = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0]).unwrap();
    // Mass 2 needs twice the resolution of the unit-mass reference run for
    // the central-half-box separations to stay inside the band.
    let s = scheme(1024, 8, 1.0);
    let k1 = relational_propagator(&p, &s, 0).unwrap();
    let k2 = relational_propagator(&p, &s, 1).unwrap();
    assert_eq!(k1.frame, Frame::Relational { anchor: 0 });
    let bare = sliced_propagator(&ModelParams::with_unit_hbar(1, 1, vec![2.0]).unwrap(), &s).unwrap();
    let n1 = k1.split.unwrap().normalization;
    assert!((n1 - bare.split.unwrap().normalization).norm() < 1e-12);
    assert!(k1.analytic_error(2.0, 1.0) < 1e-2);

    let flipped = flip_kernel(&k2);
    let mut phased = k1.clone();
    let n = k1.axis.n;
    for a in 0..n {
        for b in 0..n {
            let d = k1.axis.point(a) - k1.axis.point(b);
            phased.k[a * n + b] *= Complex::from_polar(1.0, 0.5 * (1.0 - 2.0) * d * d);
        }
    }
    let f = kernel_fidelity(&flipped, &phased);
    println!("anchor swap fidelity {f}");
    assert!(f > 1.0 - 1e-3);
    assert!(kernel_fidelity(&flipped, &k1) < 0.9);
}

#[test]
fn relational_propagation_matches_dressed_bare_propagation() {
    let p = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0]).unwrap();
    let s = scheme(256, 4, 1.0);
    let ax = s.axis;
    let k_a = sliced_propagator(&ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap(), &s).unwrap();
    let k_b = sliced_propagator(&ModelParams::with_unit_hbar(1, 1, vec![2.0]).unwrap(), &s).unwrap();
    let spec = GridSpec::new(vec![ax, ax]).unwrap();
    let psi0 = WaveGrid::gaussian(spec, &[0.0, 1.0], &[1.5, 1.0], &[0.0, -0.5]).unwrap();
    let bare = propagate_separable(&[&k_a, &k_b], &psi0).unwrap();
    let dressed_after = dress_wavefunction(&bare, &p.layout(), 0, None).unwrap();

    let rel = relational_propagator(&p, &s, 0).unwrap();
    let dressed0 = dress_wavefunction(&psi0, &p.layout(), 0, None).unwrap();
    let after = propagate_wavefunction(&rel, &dressed0).unwrap();
    let f = after.inner(&dressed_after).unwrap().norm() / (after.norm() * dressed_after.norm());
    println!("dressed/bare fidelity {f}");
    assert!(f > 1.0 - 1e-3);
}
