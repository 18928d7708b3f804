use num_complex::Complex;
use num_traits::Float;

use super::{evolve, fft, HamiltonianSpec, WaveGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `psi(x - d)` by a Fourier phase ramp (periodic translation).
pub fn shift_along_axes<T: Real>(psi: &WaveGrid<T>, d: &[T]) -> Result<WaveGrid<T>> {
    let spec = &psi.spec;
    if d.len() != spec.ndim() {
        return Err(Error::DimensionMismatch { expected: spec.ndim(), got: d.len() });
    }
    let shape = spec.shape();
    let ks: Vec<Vec<T>> = spec.axes.iter().map(|a| fft::wavenumbers(a.n, a.length())).collect();
    let mut a = psi.amps.clone();
    fft::fft_nd(&mut a, &shape, false);
    let inv_n = T::one() / T::from_usize_lossy(spec.len());
    for (flat, x) in a.iter_mut().enumerate() {
        let mut f = Complex::new(inv_n, T::zero());
        for (ax, i) in spec.unravel(flat).into_iter().enumerate() {
            let theta = -ks[ax][i] * d[ax];
            // the Nyquist mode has no sign; keep the real (symmetric) part
            f = f * if shape[ax].is_multiple_of(2) && i == shape[ax] / 2 {
                Complex::new(theta.cos(), T::zero())
            } else {
                Complex::from_polar(T::one(), theta)
            };
        }
        *x = *x * f;
    }
    fft::fft_nd(&mut a, &shape, true);
    Ok(psi.with_amps(a))
}

/// Relative L2 gap between "evolve, translate by v T and apply the boost phase"
/// and "boost the initial state, then evolve", for a free Hamiltonian.
pub fn boost_covariance_check<T: Real>(psi0: &WaveGrid<T>, v: &[T], t_final: T, h: &HamiltonianSpec<T>, steps: usize) -> Result<f64> {
    if h.potential.is_some() {
        return Err(Error::Unsupported("boost covariance is checked for free dynamics".into()));
    }
    let spec = &psi0.spec;
    if v.len() != spec.ndim() {
        return Err(Error::DimensionMismatch { expected: spec.ndim(), got: v.len() });
    }
    let disp: Vec<T> = v.iter().map(|vv| *vv * t_final).collect();
    for (d, a) in disp.iter().zip(&spec.axes) {
        let half = a.length() * T::half();
        if Float::abs(*d) > half {
            return Err(Error::BoostTooLarge { displacement: d.to_f64().unwrap_or(f64::NAN), half_box: half.to_f64().unwrap_or(f64::NAN) });
        }
    }
    let dt = t_final / T::from_usize_lossy(steps.max(1));
    let steps = steps.max(1);
    let a = evolve(psi0, h, dt, steps)?;
    let moved = shift_along_axes(&a, &disp)?;
    let delta = |x: &[T], t: T| -> T {
        (0..x.len()).fold(T::zero(), |acc, ax| acc + h.masses[ax] * (x[ax] * v[ax] + T::half() * v[ax] * v[ax] * t))
    };
    let lhs: Vec<Complex<T>> = moved
        .amps
        .iter()
        .enumerate()
        .map(|(k, amp)| {
            let y = spec.coords(k);
            let x: Vec<T> = y.iter().zip(&disp).map(|(a, b)| *a - *b).collect();
            *amp * Complex::from_polar(T::one(), delta(&x, t_final) / h.hbar)
        })
        .collect();
    let boosted0 = psi0.with_amps(
        psi0.amps.iter().enumerate().map(|(k, amp)| *amp * Complex::from_polar(T::one(), delta(&spec.coords(k), T::zero()) / h.hbar)).collect(),
    );
    let b = evolve(&boosted0, h, dt, steps)?;
    let lhs = b.with_amps(lhs);
    let err = lhs.l2_distance(&b)? / b.norm();
    Ok(err.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::GridSpec;

    #[test]
    fn zero_boost_is_exact() {
        let spec = GridSpec::uniform(1, 20.0, 256).unwrap();
        let psi = WaveGrid::gaussian(spec, &[0.0], &[1.0], &[0.0]).unwrap();
        let h = HamiltonianSpec::free(vec![1.0], 1.0);
        assert!(boost_covariance_check(&psi, &[0.0], 1.0, &h, 1).unwrap() < 1e-12);
        assert!(matches!(boost_covariance_check(&psi, &[30.0], 1.0, &h, 1), Err(Error::BoostTooLarge { .. })));
    }

    #[test]
    fn unit_boost_and_refinement() {
        let h = HamiltonianSpec::free(vec![1.0], 1.0);
        let err = |n: usize| {
            let spec = GridSpec::uniform(1, 20.0, n).unwrap();
            let psi = WaveGrid::gaussian(spec, &[0.0], &[1.0], &[0.0]).unwrap();
            boost_covariance_check(&psi, &[1.0], 1.0, &h, 1).unwrap()
        };
        let e = [err(32), err(64), err(1024)];
        assert!(e[2] < 1e-4);
        assert!(e[1] < e[0]);
    }

    #[test]
    fn integer_shift_is_a_roll() {
        let spec = GridSpec::uniform(1, 4.0, 16).unwrap();
        let psi = WaveGrid::gaussian(spec.clone(), &[0.0], &[0.6], &[0.0]).unwrap();
        let moved = shift_along_axes(&psi, &[spec.axes[0].dx() * 3.0]).unwrap();
        for k in 0..16 {
            assert!((moved.amps[(k + 3) % 16] - psi.amps[k]).norm() < 1e-12);
        }
    }
}
