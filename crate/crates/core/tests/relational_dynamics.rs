use cqm_core::bundle::ModelParams;
use cqm_core::quantum::{aligned_relative_error, dress_wavefunction, evolve, Axis, GridSpec, HamiltonianSpec, WaveGrid};
use num_complex::Complex;

fn product_state(n: usize, half: f64) -> WaveGrid<f64> {
    let ax = Axis::symmetric(half, n).unwrap();
    let spec = GridSpec::new(vec![ax, ax]).unwrap();
    let mut psi = WaveGrid::from_fn(spec, 0.0, |x| {
        let a = (-(x[0] - 0.2).powi(2) / 2.0).exp();
        let b = Complex::from_polar((-(x[1] - 1.0).powi(2) / 1.5).exp(), -0.7 * x[1]);
        b * a
    })
    .unwrap();
    psi.normalize();
    psi
}

#[test]
fn dressing_commutes_with_free_evolution_for_product_states() {
    let params = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0]).unwrap();
    let layout = params.layout();
    let psi0 = product_state(256, 16.0);
    let bare = evolve(&psi0, &HamiltonianSpec::bare(&params), 1e-2, 100).unwrap();
    let late = dress_wavefunction(&bare, &layout, 0, None).unwrap();
    let early = dress_wavefunction(&psi0, &layout, 0, None).unwrap();
    let rel = evolve(&early, &HamiltonianSpec::relational(&params, 0).unwrap(), 1e-2, 100).unwrap();
    let err = aligned_relative_error(&rel, &late).unwrap();
    assert!(err < 1e-3, "{err}");
}

#[test]
fn correlated_states_do_not_commute() {
    let params = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0]).unwrap();
    let layout = params.layout();
    let ax = Axis::symmetric(16.0, 128).unwrap();
    let spec = GridSpec::new(vec![ax, ax]).unwrap();
    let psi0 = WaveGrid::from_fn(spec, 0.0, |x: &[f64]| Complex::new((-(x[1] - x[0]).powi(2) - 0.1 * x[0] * x[0]).exp(), 0.0)).unwrap();
    let bare = evolve(&psi0, &HamiltonianSpec::bare(&params), 1e-2, 100).unwrap();
    let late = dress_wavefunction(&bare, &layout, 0, None).unwrap();
    let early = dress_wavefunction(&psi0, &layout, 0, None).unwrap();
    let rel = evolve(&early, &HamiltonianSpec::relational(&params, 0).unwrap(), 1e-2, 100).unwrap();
    assert!(aligned_relative_error(&rel, &late).unwrap() > 1e-2);
}
