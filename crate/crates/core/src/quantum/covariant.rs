use num_complex::Complex;
use num_traits::Float;

use super::{check_same_grid, WaveGrid};
use crate::classical::FlatCocyclicConnection;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gradient `(dS/dt, dS/dx)` of a phase function `S(t, x)`.
pub trait PhaseGradient<T> {
    fn ds_dt(&self, t: T, x: &[T]) -> Result<T>;
    fn ds_dx(&self, t: T, x: &[T]) -> Result<Vec<T>>;
}

/// `S = <p, x> - sum p_a^2 / (2 m_a) t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWavePhase<T> {
    pub p: Vec<T>,
    pub masses: Vec<T>,
}

impl<T: Real> PhaseGradient<T> for PlaneWavePhase<T> {
    fn ds_dt(&self, _t: T, _x: &[T]) -> Result<T> {
        Ok(-self.p.iter().zip(&self.masses).fold(T::zero(), |acc, (p, m)| acc + *p * *p / (T::lit(2.0) * *m)))
    }

    fn ds_dx(&self, _t: T, _x: &[T]) -> Result<Vec<T>> {
        Ok(self.p.clone())
    }
}

fn locate<T: Real>(grid: &[T], v: T) -> Result<usize> {
    let span = Float::abs(grid[grid.len() - 1] - grid[0]);
    let tol = T::lit(1e-9) * (T::one() + span);
    let k = grid.partition_point(|g| *g < v - tol);
    if k < grid.len() && Float::abs(grid[k] - v) <= tol {
        Ok(k)
    } else {
        Err(Error::GridMismatch(format!("{} is not a table node", v.to_f64().unwrap_or(f64::NAN))))
    }
}

/// Reads `dS = i hbar w` back off the tabulated connection at its own nodes.
impl<T: Real> PhaseGradient<T> for FlatCocyclicConnection<T> {
    fn ds_dt(&self, t: T, x: &[T]) -> Result<T> {
        let (i, j) = (locate(&self.t, t)?, locate(&self.x, x[0])?);
        Ok(-self.hbar * self.a_t[i][j].im)
    }

    fn ds_dx(&self, t: T, x: &[T]) -> Result<Vec<T>> {
        if x.len() != 1 {
            return Err(Error::GridMismatch("tabulated connection has one spatial axis".into()));
        }
        let (i, j) = (locate(&self.t, t)?, locate(&self.x, x[0])?);
        Ok(vec![-self.hbar * self.a_x[i][j].im])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovariantResidual {
    pub dx: f64,
    pub dt: f64,
}

fn check_series<T: Real>(series: &[WaveGrid<T>]) -> Result<T> {
    if series.len() < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: series.len() });
    }
    for w in series.windows(2) {
        check_same_grid(&w[0].spec, &w[1].spec)?;
    }
    let h = series[1].t - series[0].t;
    let tol = T::lit(1e-9) * Float::abs(h);
    if !(h > T::zero()) || series.windows(2).any(|w| Float::abs(w[1].t - w[0].t - h) > tol) {
        return Err(Error::DegenerateGrid("slices must be equally spaced in time".into()));
    }
    Ok(h)
}

/// Flat indices whose every axis index leaves room for the five-point stencil.
fn interior<T: Real>(psi: &WaveGrid<T>) -> Vec<usize> {
    (0..psi.spec.len())
        .filter(|&k| psi.spec.unravel(k).iter().zip(&psi.spec.axes).all(|(i, a)| *i >= 2 && i + 2 < a.n))
        .collect()
}

fn d_axis<T: Real>(psi: &WaveGrid<T>, flat: usize, axis: usize) -> Complex<T> {
    let stride: usize = psi.spec.axes[axis + 1..].iter().map(|a| a.n).product();
    let h = psi.spec.axes[axis].dx();
    let f = |o: isize| psi.amps[(flat as isize + o * stride as isize) as usize];
    (f(-2) - f(-1) * T::lit(8.0) + f(1) * T::lit(8.0) - f(2)) / (T::lit(12.0) * h)
}

fn d_time<T: Real>(series: &[WaveGrid<T>], s: usize, flat: usize, h: T) -> Complex<T> {
    let a = |k: usize| series[k].amps[flat];
    if series.len() >= 5 && s >= 2 && s + 2 < series.len() {
        (a(s - 2) - a(s - 1) * T::lit(8.0) + a(s + 1) * T::lit(8.0) - a(s + 2)) / (T::lit(12.0) * h)
    } else {
        (a(s + 1) - a(s - 1)) / (T::lit(2.0) * h)
    }
}

fn time_slices(n: usize) -> std::ops::Range<usize> {
    if n >= 5 {
        2..n - 2
    } else {
        1..n - 1
    }
}

/// Covariant derivative `(D psi)_mu = d_mu psi - (i/hbar) d_mu S psi` at one point.
fn covariant_at<T: Real>(
    series: &[WaveGrid<T>],
    s: usize,
    flat: usize,
    h: T,
    grad: &dyn PhaseGradient<T>,
    hbar: T,
) -> Result<(Complex<T>, Vec<Complex<T>>)> {
    let psi = &series[s];
    let x = psi.spec.coords(flat);
    let a = psi.amps[flat];
    let i = Complex::new(T::zero(), T::one());
    let st = grad.ds_dt(psi.t, &x)?;
    let sx = grad.ds_dx(psi.t, &x)?;
    let dt = d_time(series, s, flat, h) - i * a * (st / hbar);
    let dx = (0..psi.spec.ndim()).map(|ax| d_axis(psi, flat, ax) - i * a * (sx[ax] / hbar)).collect();
    Ok((dt, dx))
}

/// Relative norms of the `dx` and `dt` parts of the covariant derivative over
/// the spatial interior and the time slices where the stencil fits.
pub fn covariant_derivative_residual<T: Real>(series: &[WaveGrid<T>], grad: &dyn PhaseGradient<T>, hbar: T) -> Result<CovariantResidual> {
    let h = check_series(series)?;
    let pts = interior(&series[0]);
    let (mut rdx, mut rdt) = (0.0f64, 0.0f64);
    for s in time_slices(series.len()) {
        let (mut ex, mut et, mut nn) = (T::zero(), T::zero(), T::zero());
        for &k in &pts {
            let (dt, dx) = covariant_at(series, s, k, h, grad, hbar)?;
            et = et + dt.norm_sqr();
            ex = ex + dx.iter().fold(T::zero(), |acc, d| acc + d.norm_sqr());
            nn = nn + series[s].amps[k].norm_sqr();
        }
        if nn == T::zero() {
            continue;
        }
        rdx = rdx.max((ex / nn).sqrt().to_f64().unwrap_or(f64::NAN));
        rdt = rdt.max((et / nn).sqrt().to_f64().unwrap_or(f64::NAN));
    }
    Ok(CovariantResidual { dx: rdx, dt: rdt })
}

/// `<psi, iota_X D psi>` at the central slice, fibre-integrated over the spatial
/// interior. `direction = (X^t, X^x...)` must have a nonzero time component.
pub fn meta_action<T: Real>(series: &[WaveGrid<T>], grad: &dyn PhaseGradient<T>, direction: &[T], hbar: T) -> Result<Complex<T>> {
    let h = check_series(series)?;
    if direction.first().map(|t| *t == T::zero()).unwrap_or(true) {
        return Err(Error::VerticalDirection);
    }
    if direction.len() != series[0].spec.ndim() + 1 {
        return Err(Error::DimensionMismatch { expected: series[0].spec.ndim() + 1, got: direction.len() });
    }
    let s = series.len() / 2;
    let dv = series[s].spec.cell_volume();
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in interior(&series[s]) {
        let (dt, dx) = covariant_at(series, s, k, h, grad, hbar)?;
        let contracted = dx.iter().zip(&direction[1..]).fold(dt * direction[0], |a, (d, w)| a + d * *w);
        acc = acc + series[s].amps[k].conj() * contracted;
    }
    Ok(acc * dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::Frame;
    use crate::quantum::{evolve, GridSpec, HamiltonianSpec};

    fn plane_series(k: f64, slices: usize) -> Vec<WaveGrid<f64>> {
        let spec = GridSpec::uniform(1, 20.0, 512).unwrap();
        // k commensurate with the box so the wave is periodic
        let mut psi = WaveGrid::from_fn(spec, 0.0, |x| Complex::from_polar(1.0, k * x[0])).unwrap();
        psi.normalize();
        let h = HamiltonianSpec::free(vec![1.0], 1.0);
        (0..slices).map(|s| evolve(&psi, &h, 0.01, s + 1).unwrap()).collect()
    }

    #[test]
    fn plane_wave_is_covariantly_constant() {
        let k = 2.0 * std::f64::consts::PI * 2.0 / 40.0;
        let series = plane_series(k, 5);
        let phase = PlaneWavePhase { p: vec![k], masses: vec![1.0] };
        let r = covariant_derivative_residual(&series, &phase, 1.0).unwrap();
        assert!(r.dx < 1e-6 && r.dt < 1e-6, "{r:?}");
        let ma = meta_action(&series, &phase, &[1.0, 0.3], 1.0).unwrap();
        assert!(ma.norm() < 1e-5);
        assert!(matches!(meta_action(&series, &phase, &[0.0, 1.0], 1.0), Err(Error::VerticalDirection)));
    }

    #[test]
    fn zero_phase_and_zero_state() {
        let spec = GridSpec::uniform(1, 1.0, 16).unwrap();
        let c = WaveGrid::from_fn(spec.clone(), 0.0, |_| Complex::new(1.0, 0.0)).unwrap();
        let series: Vec<_> = (0..3).map(|s| WaveGrid { t: s as f64 * 0.1, ..c.clone() }).collect();
        let flat = PlaneWavePhase { p: vec![0.0], masses: vec![1.0] };
        let r = covariant_derivative_residual(&series, &flat, 1.0).unwrap();
        assert_eq!((r.dx, r.dt), (0.0, 0.0));
        let zero: Vec<_> = series.iter().map(|w| WaveGrid::new(spec.clone(), w.t, vec![Complex::new(0.0, 0.0); 16], Frame::Bare).unwrap()).collect();
        assert_eq!(meta_action(&zero, &flat, &[1.0, 0.0], 1.0).unwrap(), Complex::new(0.0, 0.0));
        assert!(covariant_derivative_residual(&series[..2], &flat, 1.0).is_err());
    }
}
