//! Time-sliced propagators for free dynamics on one periodic axis.
//!
//! The one-step kernel is the free propagator restricted to a smooth band
//! `|k| < 0.4..0.8 pi/dx` (the filter is split evenly over the slices) and is
//! sampled from a finely padded lattice, so it carries no wrap-around images.
//! Every intermediate slice is multiplied by a smooth window that vanishes at
//! the box edge. Comparisons are made on the central half of the box.

use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::bundle::ModelParams;
use crate::classical::HpfTable;
use crate::error::{Error, Result};
use crate::path::Frame;
use crate::quantum::fft::wavenumbers as fft_wavenumbers;
use crate::quantum::{Axis, GridSpec, WaveGrid};
use crate::scalar::Real;

/// Band filter and slice window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regulator {
    /// Filter is 1 below `band_lo * pi/dx` ...
    pub band_lo: f64,
    /// ... and 0 above `band_hi * pi/dx`.
    pub band_hi: f64,
    /// Window is 1 for `|z| < window * half_width`.
    pub window: f64,
    /// Padding factor of the lattice the one-step kernel is sampled from.
    pub pad: usize,
}

impl Default for Regulator {
    fn default() -> Self {
        Self { band_lo: 0.4, band_hi: 0.8, window: 0.7, pad: 16 }
    }
}

/// `M` uniform slices between `t0` and `t1` on a symmetric periodic axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceScheme<T> {
    pub slices: usize,
    pub axis: Axis<T>,
    pub t0: T,
    pub t1: T,
    pub regulator: Regulator,
    /// Largest kernel size (entries) allowed.
    pub budget: usize,
}

impl<T: Real> SliceScheme<T> {
    pub fn new(slices: usize, axis: Axis<T>, t0: T, t1: T) -> Result<Self> {
        if slices == 0 {
            return Err(Error::TooFewNodes { needed: 1, got: 0 });
        }
        if t1 <= t0 {
            return Err(Error::TimeOrder { t0: t0.approx_f64(), t1: t1.approx_f64() });
        }
        Ok(Self { slices, axis, t0, t1, regulator: Regulator::default(), budget: 1 << 24 })
    }

    pub fn step(&self) -> T {
        (self.t1 - self.t0) / T::from_usize_lossy(self.slices)
    }

    fn check_budget(&self) -> Result<()> {
        let needed = self.axis.n * self.axis.n;
        if needed > self.budget {
            return Err(Error::Budget { needed, budget: self.budget });
        }
        Ok(())
    }
}

/// Mean normalisation and its largest relative deviation over the central half box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRecord<T> {
    pub normalization: Complex<T>,
    pub deviation: f64,
}

/// `K(x, x0)` stored row-major `[x][x0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorKernel<T> {
    pub axis: Axis<T>,
    pub t0: T,
    pub t1: T,
    pub k: Vec<Complex<T>>,
    pub frame: Frame,
    pub split: Option<SplitRecord<T>>,
    pub regulator: Regulator,
}

/// Smooth step: 1 for `u <= 0`, 0 for `u >= 1`, C-infinity in between.
pub fn smooth_step<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::one();
    }
    if u >= T::one() {
        return T::zero();
    }
    let a = (-T::one() / (T::one() - u)).exp();
    let b = (-T::one() / u).exp();
    a / (a + b)
}

fn window<T: Real>(axis: &Axis<T>, reg: &Regulator) -> Vec<T> {
    let half = axis.length() * T::half();
    let a = T::lit(reg.window);
    axis.points().into_iter().map(|z| smooth_step((Float::abs(z) - a * half) / ((T::one() - a) * half))).collect()
}

/// One regulated step of length `eps`, sampled at separations `j dx` (`j` mod the padded size).
fn one_step_profile<T: Real>(axis: &Axis<T>, mass: T, hbar: T, eps: T, slices: usize, reg: &Regulator) -> Vec<Complex<T>> {
    let dx = axis.dx();
    let np = reg.pad * axis.n;
    let len = dx * T::from_usize_lossy(np);
    let ks = fft_wavenumbers::<T>(np, len);
    let band = T::PI() / dx;
    let (lo, hi) = (T::lit(reg.band_lo), T::lit(reg.band_hi));
    let power = T::one() / T::from_usize_lossy(slices);
    let mut spec: Vec<Complex<T>> = ks
        .iter()
        .map(|k| {
            let g = smooth_step((Float::abs(*k) / band - lo) / (hi - lo));
            let f = if g > T::zero() { g.powf(power) } else { T::zero() };
            Complex::from_polar(f, -hbar * *k * *k * eps / (T::lit(2.0) * mass))
        })
        .collect();
    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_inverse(np).process(&mut spec);
    let scale = T::one() / (T::from_usize_lossy(np) * dx);
    spec.into_iter().map(|c| c * scale).collect()
}

fn toeplitz<T: Real>(profile: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
    let np = profile.len();
    let mut k = vec![Complex::new(T::zero(), T::zero()); n * n];
    k.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for (b, v) in row.iter_mut().enumerate() {
            *v = profile[(a + np - b) % np];
        }
    });
    k
}

/// `later . W . earlier` with the slice window on the intermediate variable.
fn chain<T: Real>(later: &[Complex<T>], earlier: &[Complex<T>], w: &[T], dx: T) -> Vec<Complex<T>> {
    let n = w.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for b in 0..n {
            let s = later[a * n + b] * (w[b] * dx);
            if s == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let e = &earlier[b * n..(b + 1) * n];
            for (r, v) in row.iter_mut().zip(e) {
                *r = *r + s * v;
            }
        }
    });
    out
}

/// `earlier . W . T` where `T[b][c] = profile[(b - c) mod Np]`, one FFT
/// convolution per row.
fn chain_toeplitz<T: Real>(earlier: &[Complex<T>], profile: &[Complex<T>], w: &[T], dx: T) -> Vec<Complex<T>> {
    let n = w.len();
    let np = profile.len();
    let p = 2 * n;
    let zero = Complex::new(T::zero(), T::zero());
    // q[j] = profile[-j] for |j| < n, stored circularly.
    let mut q = vec![zero; p];
    for j in 0..n {
        q[j] = profile[(np - j) % np];
        if j > 0 {
            q[p - j] = profile[j];
        }
    }
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    fwd.process(&mut q);
    let scale = dx / T::from_usize_lossy(p);
    let mut out = vec![zero; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        let mut buf = vec![zero; p];
        for b in 0..n {
            buf[b] = earlier[a * n + b] * w[b];
        }
        fwd.process(&mut buf);
        for (v, h) in buf.iter_mut().zip(&q) {
            *v = *v * h;
        }
        inv.process(&mut buf);
        for (r, v) in row.iter_mut().zip(&buf) {
            *r = v * scale;
        }
    });
    out
}

/// Free propagator `sqrt(m / (2 pi i hbar T)) exp(i m d^2 / (2 hbar T))`.
pub fn analytic_kernel<T: Real>(mass: T, hbar: T, t: T, d: T) -> Complex<T> {
    let pre = Complex::new(T::zero(), -mass / (T::lit(2.0) * T::PI() * hbar * t)).sqrt();
    pre * Complex::from_polar(T::one(), mass * d * d / (T::lit(2.0) * hbar * t))
}

fn sliced_with_mass<T: Real>(mass: T, hbar: T, scheme: &SliceScheme<T>, frame: Frame) -> Result<PropagatorKernel<T>> {
    scheme.check_budget()?;
    let ax = scheme.axis;
    if ax.lo != -ax.hi {
        return Err(Error::Grid("path-integral axis must be symmetric".into()));
    }
    let n = ax.n;
    let reg = scheme.regulator;
    let profile = one_step_profile(&ax, mass, hbar, scheme.step(), scheme.slices, &reg);
    let k1 = toeplitz(&profile, n);
    let w = window(&ax, &reg);
    let mut k = k1;
    for _ in 1..scheme.slices {
        k = chain_toeplitz(&k, &profile, &w, ax.dx());
    }
    let mut kernel = PropagatorKernel { axis: ax, t0: scheme.t0, t1: scheme.t1, k, frame, split: None, regulator: reg };
    let t = scheme.t1 - scheme.t0;
    let s = free_split(&kernel, |d| mass * d * d / (T::lit(2.0) * t), hbar);
    kernel.split = Some(SplitRecord { normalization: s.normalization, deviation: s.deviation });
    Ok(kernel)
}

/// Sliced free propagator for a single coordinate.
pub fn sliced_propagator<T: Real>(params: &ModelParams<T>, scheme: &SliceScheme<T>) -> Result<PropagatorKernel<T>> {
    if params.dim() != 1 {
        return Err(Error::Unsupported("path integrals are implemented for one coordinate".into()));
    }
    sliced_with_mass(params.masses[0], params.hbar, scheme, Frame::Bare)
}

/// Sliced propagator of the dressed problem on the reduced axis (`N = 2`, `d = 1`).
pub fn relational_propagator<T: Real>(params: &ModelParams<T>, scheme: &SliceScheme<T>, anchor: usize) -> Result<PropagatorKernel<T>> {
    params.layout().check_particle(anchor)?;
    if params.n_particles != 2 || params.spatial_dim != 1 {
        return Err(Error::Unsupported("relational path integrals need N = 2, d = 1".into()));
    }
    sliced_with_mass(params.masses[1 - anchor], params.hbar, scheme, Frame::Relational { anchor })
}

/// Indices of the central half box.
pub fn central_half<T: Real>(axis: &Axis<T>) -> Vec<usize> {
    let quarter = axis.length() / T::lit(4.0);
    (0..axis.n).filter(|k| Float::abs(axis.point(*k)) <= quarter).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalSplit<T> {
    /// `S_c` on the central half box, row-major `[x][x0]`.
    pub s_c: Vec<T>,
    pub normalization_samples: Vec<Complex<T>>,
    pub normalization: Complex<T>,
    pub deviation: f64,
}

fn free_split<T: Real>(kernel: &PropagatorKernel<T>, mut s_c: impl FnMut(T) -> T, hbar: T) -> ClassicalSplit<T> {
    let c = central_half(&kernel.axis);
    let n = kernel.axis.n;
    let mut s = Vec::with_capacity(c.len() * c.len());
    let mut norm = Vec::with_capacity(c.len() * c.len());
    for &a in &c {
        for &b in &c {
            let d = kernel.axis.point(a) - kernel.axis.point(b);
            let sc = s_c(d);
            s.push(sc);
            norm.push(kernel.k[a * n + b] * Complex::from_polar(T::one(), -sc / hbar));
        }
    }
    let mean = norm.iter().fold(Complex::new(T::zero(), T::zero()), |acc, v| acc + v) / T::from_usize_lossy(norm.len());
    let deviation = norm.iter().map(|v| ((v - mean).norm() / mean.norm()).to_f64().unwrap_or(f64::NAN)).fold(0.0, f64::max);
    ClassicalSplit { s_c: s, normalization_samples: norm, normalization: mean, deviation }
}

/// Divides the kernel by `exp(i S_c / hbar)` with `S_c(x, x0)` read from an HPF
/// table from the origin at `t1`, whose nodes must cover every separation
/// `x - x0` of the central half box.
pub fn classical_split<T: Real>(kernel: &PropagatorKernel<T>, hpf: &HpfTable<T>, hbar: T) -> Result<ClassicalSplit<T>> {
    if hpf.t.len() != 1 || Float::abs(hpf.t[0] - hpf.t0 - (kernel.t1 - kernel.t0)) > T::lit(1e-12) * (T::one() + Float::abs(hpf.t[0])) {
        return Err(Error::GridMismatch("HPF table must hold the single time t1 - t0".into()));
    }
    let dx = kernel.axis.dx();
    let lookup = |d: T| -> Option<T> {
        hpf.x.iter().position(|x| Float::abs(x[0] - hpf.x0[0] - d) <= T::lit(1e-9) * dx).map(|j| hpf.s[0][j])
    };
    let mut missing = false;
    let s = free_split(kernel, |d| lookup(d).unwrap_or_else(|| {
        missing = true;
        T::zero()
    }), hbar);
    if missing {
        return Err(Error::GridMismatch("HPF table does not cover the separations".into()));
    }
    Ok(s)
}

impl<T: Real> PropagatorKernel<T> {
    /// Discrete delta `delta_ab / dx`.
    pub fn identity(axis: Axis<T>, t0: T, frame: Frame) -> Self {
        let n = axis.n;
        let mut k = vec![Complex::new(T::zero(), T::zero()); n * n];
        let inv = T::one() / axis.dx();
        for a in 0..n {
            k[a * n + a] = Complex::new(inv, T::zero());
        }
        Self { axis, t0, t1: t0, k, frame, split: None, regulator: Regulator::default() }
    }

    pub fn n(&self) -> usize {
        self.axis.n
    }

    pub fn at(&self, a: usize, b: usize) -> Complex<T> {
        self.k[a * self.axis.n + b]
    }

    /// Relative L2 distance to `other` over the central half box.
    pub fn central_relative_error(&self, reference: impl Fn(T, T) -> Complex<T>) -> f64 {
        let c = central_half(&self.axis);
        let (mut num, mut den) = (T::zero(), T::zero());
        for &a in &c {
            for &b in &c {
                let r = reference(self.axis.point(a), self.axis.point(b));
                num = num + (self.at(a, b) - r).norm_sqr();
                den = den + r.norm_sqr();
            }
        }
        (num / den).sqrt().to_f64().unwrap_or(f64::NAN)
    }

    /// Stddev over mean of `|K|` on the central half box.
    pub fn modulus_uniformity(&self) -> f64 {
        let c = central_half(&self.axis);
        let mods: Vec<f64> = c.iter().flat_map(|&a| c.iter().map(move |&b| (a, b))).map(|(a, b)| self.at(a, b).norm().approx_f64()).collect();
        let mean = mods.iter().sum::<f64>() / mods.len() as f64;
        let var = mods.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / mods.len() as f64;
        var.sqrt() / mean
    }

    /// Relative error of the analytic free kernel on the central half box.
    pub fn analytic_error(&self, mass: T, hbar: T) -> f64 {
        let t = self.t1 - self.t0;
        self.central_relative_error(|x, x0| analytic_kernel(mass, hbar, t, x - x0))
    }
}

/// `later` after `earlier`, with the slice window on the intermediate slice.
pub fn compose<T: Real>(earlier: &PropagatorKernel<T>, later: &PropagatorKernel<T>) -> Result<PropagatorKernel<T>> {
    if earlier.axis != later.axis || earlier.frame != later.frame {
        return Err(Error::GridMismatch("kernels live on different grids".into()));
    }
    if Float::abs(earlier.t1 - later.t0) > T::lit(1e-12) * (T::one() + Float::abs(later.t0)) {
        return Err(Error::GridMismatch("kernel times do not chain".into()));
    }
    let w = window(&earlier.axis, &earlier.regulator);
    Ok(PropagatorKernel {
        axis: earlier.axis,
        t0: earlier.t0,
        t1: later.t1,
        k: chain(&later.k, &earlier.k, &w, earlier.axis.dx()),
        frame: earlier.frame,
        split: None,
        regulator: earlier.regulator,
    })
}

/// `psi(x) = sum_x0 K(x, x0) psi0(x0) dx`.
pub fn propagate_wavefunction<T: Real>(kernel: &PropagatorKernel<T>, psi0: &WaveGrid<T>) -> Result<WaveGrid<T>> {
    if psi0.spec.axes.len() != 1 || psi0.spec.axes[0] != kernel.axis {
        return Err(Error::GridMismatch("state and kernel grids differ".into()));
    }
    if psi0.frame != kernel.frame {
        return Err(Error::GridMismatch("state and kernel frames differ".into()));
    }
    let n = kernel.n();
    let dx = kernel.axis.dx();
    let amps: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|a| {
            kernel.k[a * n..(a + 1) * n].iter().zip(&psi0.amps).fold(Complex::new(T::zero(), T::zero()), |acc, (k, p)| acc + k * p) * dx
        })
        .collect();
    WaveGrid::new(psi0.spec.clone(), psi0.t + (kernel.t1 - kernel.t0), amps, psi0.frame)
}

/// Applies one kernel along each axis of a product grid (bare free dynamics
/// of several coordinates factorises into one-coordinate kernels).
pub fn propagate_separable<T: Real>(kernels: &[&PropagatorKernel<T>], psi0: &WaveGrid<T>) -> Result<WaveGrid<T>> {
    let spec = &psi0.spec;
    if kernels.len() != spec.ndim() {
        return Err(Error::GridMismatch("one kernel per axis required".into()));
    }
    let shape = spec.shape();
    let mut amps = psi0.amps.clone();
    for (axis, k) in kernels.iter().enumerate() {
        if spec.axes[axis] != k.axis {
            return Err(Error::GridMismatch("kernel axis differs from the grid axis".into()));
        }
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let dx = k.axis.dx();
        let lines = amps.len() / n;
        let mut out = amps.clone();
        let results: Vec<(usize, Vec<Complex<T>>)> = (0..lines)
            .into_par_iter()
            .map(|l| {
                let base = (l / stride) * n * stride + l % stride;
                let line: Vec<Complex<T>> = (0..n).map(|j| amps[base + j * stride]).collect();
                let res = (0..n)
                    .map(|a| k.k[a * n..(a + 1) * n].iter().zip(&line).fold(Complex::new(T::zero(), T::zero()), |acc, (kk, p)| acc + kk * p) * dx)
                    .collect();
                (base, res)
            })
            .collect();
        for (base, res) in results {
            for (j, v) in res.into_iter().enumerate() {
                out[base + j * stride] = v;
            }
        }
        amps = out;
    }
    let t = kernels[0].t1 - kernels[0].t0;
    WaveGrid::new(spec.clone(), psi0.t + t, amps, psi0.frame)
}

/// Kernel re-expressed in the other anchor's chart: `K'(y, y0) = K(-y, -y0)`.
pub fn flip_kernel<T: Real>(kernel: &PropagatorKernel<T>) -> PropagatorKernel<T> {
    let n = kernel.n();
    let refl = |a: usize| (n - a) % n;
    let mut k = vec![Complex::new(T::zero(), T::zero()); n * n];
    for a in 0..n {
        for b in 0..n {
            k[a * n + b] = kernel.at(refl(a), refl(b));
        }
    }
    PropagatorKernel { k, ..kernel.clone() }
}

/// Phase-aligned fidelity `|<a, b>| / (|a| |b|)` of two kernels on the central half box.
pub fn kernel_fidelity<T: Real>(a: &PropagatorKernel<T>, b: &PropagatorKernel<T>) -> f64 {
    let c = central_half(&a.axis);
    let (mut ab, mut aa, mut bb) = (Complex::new(T::zero(), T::zero()), T::zero(), T::zero());
    for &i in &c {
        for &j in &c {
            let (x, y) = (a.at(i, j), b.at(i, j));
            ab = ab + x.conj() * y;
            aa = aa + x.norm_sqr();
            bb = bb + y.norm_sqr();
        }
    }
    (ab.norm() / (aa * bb).sqrt()).to_f64().unwrap_or(f64::NAN)
}

/// `GridSpec` for a kernel axis.
pub fn kernel_grid<T: Real>(kernel: &PropagatorKernel<T>) -> GridSpec<T> {
    GridSpec { axes: vec![kernel.axis] }
}
