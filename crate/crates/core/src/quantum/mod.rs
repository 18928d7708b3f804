//! Wave functions on periodic rectangular grids, split-step evolution, the
//! spectral momentum operator and the covariant-derivative checks, plus
//! dressed (relational) wave functions and frame changes.

mod boost;
mod covariant;
pub(crate) mod fft;
mod relational;

pub use boost::{boost_covariance_check, shift_along_axes};
pub use covariant::{covariant_derivative_residual, meta_action, CovariantResidual, PhaseGradient, PlaneWavePhase};
pub use relational::{aligned_relative_error, dress_wavefunction, frame_change, frame_change_local, slice_norm};

use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::Frame;
use crate::scalar::Real;

/// One periodic axis: `n` points `lo + k (hi - lo) / n`, `hi` excluded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis<T> {
    pub lo: T,
    pub hi: T,
    pub n: usize,
}

impl<T: Real> Axis<T> {
    pub fn new(lo: T, hi: T, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::Grid(format!("axis needs at least 8 points, got {n}")));
        }
        if !(hi > lo) {
            return Err(Error::Grid("axis bounds must satisfy lo < hi".into()));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn symmetric(half: T, n: usize) -> Result<Self> {
        Self::new(-half, half, n)
    }

    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    pub fn dx(&self) -> T {
        self.length() / T::from_usize_lossy(self.n)
    }

    pub fn point(&self, k: usize) -> T {
        self.lo + self.dx() * T::from_usize_lossy(k)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|k| self.point(k)).collect()
    }
}

/// A rectangular periodic grid, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub axes: Vec<Axis<T>>,
}

impl<T: Real> GridSpec<T> {
    pub fn new(axes: Vec<Axis<T>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Grid("grid needs at least one axis".into()));
        }
        for a in &axes {
            Axis::new(a.lo, a.hi, a.n)?;
        }
        Ok(Self { axes })
    }

    pub fn uniform(ndim: usize, half: T, n: usize) -> Result<Self> {
        Self::new(vec![Axis::symmetric(half, n)?; ndim])
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.axes.iter().fold(T::one(), |acc, a| acc * a.dx())
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.ndim()];
        for a in (0..self.ndim()).rev() {
            idx[a] = flat % self.axes[a].n;
            flat /= self.axes[a].n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (i, a)| acc * a.n + i)
    }

    pub fn coords(&self, flat: usize) -> Vec<T> {
        self.unravel(flat).iter().zip(&self.axes).map(|(k, a)| a.point(*k)).collect()
    }

    pub fn sample<F: Fn(&[T]) -> Complex<T>>(&self, f: F) -> Vec<Complex<T>> {
        (0..self.len()).map(|k| f(&self.coords(k))).collect()
    }

    fn check_propagation(&self) -> Result<()> {
        if self.ndim() > 3 {
            return Err(Error::Grid(format!("propagation supports at most 3 axes, got {}", self.ndim())));
        }
        Ok(())
    }
}

/// Complex amplitudes on a grid at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveGrid<T> {
    pub spec: GridSpec<T>,
    pub t: T,
    pub amps: Vec<Complex<T>>,
    pub frame: Frame,
}

impl<T: Real> WaveGrid<T> {
    pub fn new(spec: GridSpec<T>, t: T, amps: Vec<Complex<T>>, frame: Frame) -> Result<Self> {
        if amps.len() != spec.len() {
            return Err(Error::GridMismatch(format!("{} amplitudes for {} grid points", amps.len(), spec.len())));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Grid("amplitudes must be finite".into()));
        }
        Ok(Self { spec, t, amps, frame })
    }

    pub fn from_fn(spec: GridSpec<T>, t: T, f: impl Fn(&[T]) -> Complex<T>) -> Result<Self> {
        let amps = spec.sample(f);
        Self::new(spec, t, amps, Frame::Bare)
    }

    /// Normalised Gaussian `prod_a exp(-(x_a - c_a)^2 / (4 s_a^2) + i k_a x_a)`.
    pub fn gaussian(spec: GridSpec<T>, center: &[T], sigma: &[T], k: &[T]) -> Result<Self> {
        let four = T::lit(4.0);
        let mut g = Self::from_fn(spec, T::zero(), |x| {
            let mut re = T::zero();
            let mut ph = T::zero();
            for a in 0..x.len() {
                let d = x[a] - center[a];
                re = re - d * d / (four * sigma[a] * sigma[a]);
                ph = ph + k[a] * x[a];
            }
            Complex::from_polar(re.exp(), ph)
        })?;
        g.normalize();
        Ok(g)
    }

    pub fn norm_sq(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()) * self.spec.cell_volume()
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            for a in &mut self.amps {
                *a = *a / n;
            }
        }
    }

    /// `<self, other> = sum conj(self) other dV`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        check_same_grid(&self.spec, &other.spec)?;
        let s = self.amps.iter().zip(&other.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        Ok(s * self.spec.cell_volume())
    }

    pub fn with_amps(&self, amps: Vec<Complex<T>>) -> Self {
        Self { amps, ..self.clone() }
    }

    /// `<x_axis>` and variance.
    pub fn moments(&self, axis: usize) -> (T, T) {
        let n2 = self.norm_sq();
        let dv = self.spec.cell_volume();
        let (mut m1, mut m2) = (T::zero(), T::zero());
        for (k, a) in self.amps.iter().enumerate() {
            let x = self.spec.coords(k)[axis];
            let p = a.norm_sqr() * dv;
            m1 = m1 + p * x;
            m2 = m2 + p * x * x;
        }
        let mean = m1 / n2;
        (mean, m2 / n2 - mean * mean)
    }

    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        check_same_grid(&self.spec, &other.spec)?;
        let s = self.amps.iter().zip(&other.amps).fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr());
        Ok((s * self.spec.cell_volume()).sqrt())
    }

    /// Marginal `|psi|^2` along one axis, integrated over the others.
    pub fn marginal(&self, axis: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.spec.axes[axis].n];
        let dv = self.spec.cell_volume() / self.spec.axes[axis].dx();
        for (k, a) in self.amps.iter().enumerate() {
            let i = self.spec.unravel(k)[axis];
            out[i] = out[i] + a.norm_sqr() * dv;
        }
        out
    }
}

pub(crate) fn check_same_grid<T: Real>(a: &GridSpec<T>, b: &GridSpec<T>) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch("grids differ".into()));
    }
    Ok(())
}

/// Kinetic masses per axis and an optional sampled potential.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec<T> {
    pub masses: Vec<T>,
    pub hbar: T,
    pub potential: Option<Vec<T>>,
    pub frame: Frame,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn free(masses: Vec<T>, hbar: T) -> Self {
        Self { masses, hbar, potential: None, frame: Frame::Bare }
    }

    /// Bare Hamiltonian with one axis per coordinate.
    pub fn bare(params: &crate::bundle::ModelParams<T>) -> Self {
        Self::free((0..params.dim()).map(|c| params.coord_mass(c)).collect(), params.hbar)
    }

    /// Dressed free Hamiltonian `sum_{k != i} |p_k|^2 / (2 m_k)` on the reduced axes.
    pub fn relational(params: &crate::bundle::ModelParams<T>, anchor: usize) -> Result<Self> {
        params.layout().check_particle(anchor)?;
        let masses = (0..params.dim())
            .filter(|c| c / params.spatial_dim != anchor)
            .map(|c| params.coord_mass(c))
            .collect();
        Ok(Self { masses, hbar: params.hbar, potential: None, frame: Frame::Relational { anchor } })
    }

    pub fn with_potential(mut self, spec: &GridSpec<T>, v: impl Fn(&[T]) -> T) -> Self {
        self.potential = Some((0..spec.len()).map(|k| v(&spec.coords(k))).collect());
        self
    }

    fn check(&self, spec: &GridSpec<T>) -> Result<()> {
        if self.masses.len() != spec.ndim() {
            return Err(Error::GridMismatch(format!("{} masses for {} axes", self.masses.len(), spec.ndim())));
        }
        if let Some(v) = &self.potential {
            if v.len() != spec.len() {
                return Err(Error::GridMismatch("potential sampled on a different grid".into()));
            }
        }
        Ok(())
    }

    /// Largest kinetic plus potential energy representable on the grid.
    pub fn energy_bound(&self, spec: &GridSpec<T>) -> T {
        let kin = spec.axes.iter().zip(&self.masses).fold(T::zero(), |acc, (a, m)| {
            let k = T::PI() / a.dx();
            acc + self.hbar * self.hbar * k * k / (T::lit(2.0) * *m)
        });
        let pot = self.potential.as_ref().map(|v| v.iter().fold(T::zero(), |a, b| a.max(Float::abs(*b)))).unwrap_or_else(T::zero);
        kin + pot
    }
}

/// Strang split-step propagation over `steps` steps of size `dt`.
///
/// Without a potential the kinetic propagator is exact for any `dt`, so the
/// spectral step-size bound is only enforced when a potential is present.
pub fn evolve<T: Real>(psi: &WaveGrid<T>, h: &HamiltonianSpec<T>, dt: T, steps: usize) -> Result<WaveGrid<T>> {
    if !(dt > T::zero()) {
        return Err(Error::NonPositiveStep);
    }
    psi.spec.check_propagation()?;
    h.check(&psi.spec)?;
    if h.potential.is_some() {
        let r = dt * h.energy_bound(&psi.spec) / h.hbar;
        if !(r < T::PI()) {
            return Err(Error::Cfl(r.to_f64().unwrap_or(f64::INFINITY)));
        }
    }
    let spec = &psi.spec;
    let shape = spec.shape();
    let kin = kinetic_phase(spec, h, dt);
    let half = |v: &Vec<T>, s: T| -> Vec<Complex<T>> { v.iter().map(|vv| Complex::from_polar(T::one(), -*vv * s / h.hbar)).collect() };
    let vhalf = h.potential.as_ref().map(|v| half(v, dt * T::half()));
    let vfull = h.potential.as_ref().map(|v| half(v, dt));
    let inv_n = T::one() / T::from_usize_lossy(spec.len());
    let mut a = psi.amps.clone();
    for s in 0..steps {
        if let Some(vh) = &vhalf {
            let f = if s == 0 { vh } else { vfull.as_ref().expect("potential present") };
            a.iter_mut().zip(f).for_each(|(x, p)| *x = *x * p);
        }
        fft::fft_nd(&mut a, &shape, false);
        a.iter_mut().zip(&kin).for_each(|(x, p)| *x = *x * p * inv_n);
        fft::fft_nd(&mut a, &shape, true);
    }
    if let (Some(vh), true) = (&vhalf, steps > 0) {
        a.iter_mut().zip(vh).for_each(|(x, p)| *x = *x * p);
    }
    let elapsed = dt * T::from_usize_lossy(steps);
    Ok(WaveGrid { spec: spec.clone(), t: psi.t + elapsed, amps: a, frame: psi.frame })
}

fn kinetic_phase<T: Real>(spec: &GridSpec<T>, h: &HamiltonianSpec<T>, dt: T) -> Vec<Complex<T>> {
    let ks: Vec<Vec<T>> = spec.axes.iter().map(|a| fft::wavenumbers(a.n, a.length())).collect();
    (0..spec.len())
        .map(|flat| {
            let idx = spec.unravel(flat);
            let e = idx.iter().enumerate().fold(T::zero(), |acc, (a, i)| {
                let k = ks[a][*i];
                acc + h.hbar * h.hbar * k * k / (T::lit(2.0) * h.masses[a])
            });
            Complex::from_polar(T::one(), -e * dt / h.hbar)
        })
        .collect()
}

/// `-i hbar d/dx_axis` by spectral differentiation; the Nyquist mode is dropped.
pub fn momentum_apply<T: Real>(psi: &WaveGrid<T>, axis: usize, hbar: T) -> Result<WaveGrid<T>> {
    if axis >= psi.spec.ndim() {
        return Err(Error::Grid(format!("axis {axis} out of range")));
    }
    let spec = &psi.spec;
    let shape = spec.shape();
    let n = spec.axes[axis].n;
    let ks = fft::wavenumbers::<T>(n, spec.axes[axis].length());
    let mut a = psi.amps.clone();
    fft::fft_nd(&mut a, &shape, false);
    let inv_n = T::one() / T::from_usize_lossy(spec.len());
    for (flat, x) in a.iter_mut().enumerate() {
        let i = spec.unravel(flat)[axis];
        let k = if n.is_multiple_of(2) && i == n / 2 { T::zero() } else { ks[i] };
        *x = *x * (hbar * k * inv_n);
    }
    fft::fft_nd(&mut a, &shape, true);
    Ok(psi.with_amps(a))
}

/// `<psi | [x, p] | psi> / <psi | psi>` along one axis.
pub fn commutator_expectation<T: Real>(psi: &WaveGrid<T>, axis: usize, hbar: T) -> Result<Complex<T>> {
    let xpsi = psi.with_amps(psi.amps.iter().enumerate().map(|(k, a)| *a * psi.spec.coords(k)[axis]).collect());
    let p_psi = momentum_apply(psi, axis, hbar)?;
    let px_psi = momentum_apply(&xpsi, axis, hbar)?;
    let x_p_psi = p_psi.with_amps(p_psi.amps.iter().enumerate().map(|(k, a)| *a * psi.spec.coords(k)[axis]).collect());
    let lhs = psi.inner(&x_p_psi)? - psi.inner(&px_psi)?;
    Ok(lhs / psi.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, half: f64) -> GridSpec<f64> {
        GridSpec::uniform(1, half, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Axis::new(0.0, 1.0, 4).is_err());
        assert!(Axis::new(1.0, 1.0, 16).is_err());
        let g = GridSpec::uniform(2, 1.0, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.ravel(&g.unravel(37)), 37);
        let four = GridSpec::uniform(4, 1.0, 8).unwrap();
        let psi = WaveGrid::from_fn(four, 0.0, |_| Complex::new(1.0, 0.0)).unwrap();
        let h = HamiltonianSpec::free(vec![1.0; 4], 1.0);
        assert!(matches!(evolve(&psi, &h, 0.1, 1), Err(Error::Grid(_))));
    }

    #[test]
    fn free_packet_spreading() {
        let spec = line(512, 20.0);
        let s0 = 1.0;
        let psi = WaveGrid::gaussian(spec, &[0.0], &[s0], &[0.0]).unwrap();
        let h = HamiltonianSpec::free(vec![1.0], 1.0);
        let out = evolve(&psi, &h, 0.01, 200).unwrap();
        let (_, var) = out.moments(0);
        let t = 2.0;
        let exact = s0 * s0 + (t / (2.0 * s0)).powi(2);
        assert!((var - exact).abs() < 1e-4, "{var} vs {exact}");
    }

    #[test]
    fn flat_state_is_stationary_and_norm_is_kept() {
        let spec = line(64, 5.0);
        let flat = WaveGrid::from_fn(spec.clone(), 0.0, |_| Complex::new(0.3, 0.1)).unwrap();
        let h = HamiltonianSpec::free(vec![1.0], 1.0);
        let out = evolve(&flat, &h, 0.5, 10).unwrap();
        assert!(out.amps.iter().all(|a| (a - Complex::new(0.3, 0.1)).norm() < 1e-15));

        let psi = WaveGrid::gaussian(spec.clone(), &[0.5], &[0.7], &[1.0]).unwrap();
        let hv = HamiltonianSpec::free(vec![1.0], 1.0).with_potential(&spec, |x| 0.5 * x[0] * x[0]);
        let out = evolve(&psi, &hv, 1e-3, 1000).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
        assert!(matches!(evolve(&psi, &hv, 10.0, 1), Err(Error::Cfl(_))));
        assert!(matches!(evolve(&psi, &hv, 0.0, 1), Err(Error::NonPositiveStep)));
    }

    #[test]
    fn momentum_examples() {
        let spec = line(64, std::f64::consts::PI);
        let k = 3.0;
        let wave = WaveGrid::from_fn(spec.clone(), 0.0, |x| Complex::from_polar(1.0, k * x[0])).unwrap();
        let p = momentum_apply(&wave, 0, 1.0).unwrap();
        for (a, b) in p.amps.iter().zip(&wave.amps) {
            assert!((a - b * k).norm() < 1e-12);
        }
        let c = WaveGrid::from_fn(spec.clone(), 0.0, |_| Complex::new(2.0, 0.0)).unwrap();
        assert!(momentum_apply(&c, 0, 1.0).unwrap().amps.iter().all(|a| a.norm() < 1e-13));

        let g = WaveGrid::gaussian(line(512, 20.0), &[0.3], &[1.0], &[0.5]).unwrap();
        let comm = commutator_expectation(&g, 0, 1.0).unwrap();
        assert!((comm - Complex::new(0.0, 1.0)).norm() < 1e-8);
    }

    #[test]
    fn momentum_is_hermitian() {
        let spec = line(128, 10.0);
        let a = WaveGrid::gaussian(spec.clone(), &[1.0], &[1.2], &[0.4]).unwrap();
        let b = WaveGrid::gaussian(spec, &[-0.5], &[0.8], &[-1.0]).unwrap();
        let lhs = a.inner(&momentum_apply(&b, 0, 1.0).unwrap()).unwrap();
        let rhs = momentum_apply(&a, 0, 1.0).unwrap().inner(&b).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}
