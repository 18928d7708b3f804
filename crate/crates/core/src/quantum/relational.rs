use num_complex::Complex;
use num_traits::Float;

use super::{fft, Axis, GridSpec, WaveGrid};
use crate::bundle::Layout;
use crate::cocycle::CocycleAccumulator;
use crate::error::{Error, Result};
use crate::path::Frame;
use crate::scalar::Real;

/// Index of the node at coordinate 0, if there is one.
fn zero_node<T: Real>(a: &Axis<T>) -> Option<usize> {
    let r = -a.lo / a.dx();
    let k = r.round();
    if Float::abs(r - k) < T::lit(1e-9) && k >= T::zero() && k < T::from_usize_lossy(a.n) {
        k.to_usize()
    } else {
        None
    }
}

/// Removes `axis` by evaluating every line at coordinate 0, exactly on a node
/// or by trigonometric interpolation.
fn collapse_at_zero<T: Real>(spec: &GridSpec<T>, amps: &[Complex<T>], axis: usize) -> Result<(GridSpec<T>, Vec<Complex<T>>)> {
    let a = spec.axes[axis];
    if !(a.lo <= T::zero() && T::zero() < a.hi) {
        return Err(Error::OutOfBounds("anchor coordinate 0 lies outside the grid".into()));
    }
    let shape = spec.shape();
    let n = a.n;
    let stride: usize = shape[axis + 1..].iter().product();
    let outer = spec.len() / (n * stride);
    let weights: Option<Vec<Complex<T>>> = match zero_node(&a) {
        Some(_) => None,
        None => {
            // psi(0) = (1/n) sum_j hat_j exp(i k_j (0 - lo)), Nyquist term taken real
            let ks = fft::wavenumbers::<T>(n, a.length());
            Some(
                (0..n)
                    .map(|j| {
                        let th = -ks[j] * a.lo;
                        let w = if n.is_multiple_of(2) && j == n / 2 { Complex::new(th.cos(), T::zero()) } else { Complex::from_polar(T::one(), th) };
                        w / T::from_usize_lossy(n)
                    })
                    .collect(),
            )
        }
    };
    let mut planner = rustfft::FftPlanner::<T>::new();
    let plan = planner.plan_fft_forward(n);
    let mut out = Vec::with_capacity(outer * stride);
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            let v = match (&weights, zero_node(&a)) {
                (None, Some(k0)) => amps[base + k0 * stride],
                (Some(w), _) => {
                    let mut line: Vec<Complex<T>> = (0..n).map(|k| amps[base + k * stride]).collect();
                    plan.process(&mut line);
                    line.iter().zip(w).fold(Complex::new(T::zero(), T::zero()), |acc, (c, ww)| acc + c * ww)
                }
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
    }
    let mut axes = spec.axes.clone();
    axes.remove(axis);
    Ok((GridSpec { axes }, out))
}

/// Relational state seen from particle `anchor`: the bare state on the slice
/// `x_anchor = 0`, times the inverse cocycle phase when one is supplied.
/// The bare grid has one axis per coordinate.
pub fn dress_wavefunction<T: Real>(psi: &WaveGrid<T>, layout: &Layout, anchor: usize, phase: Option<&CocycleAccumulator<T>>) -> Result<WaveGrid<T>> {
    layout.check_particle(anchor)?;
    if psi.spec.ndim() != layout.dim() {
        return Err(Error::GridMismatch(format!("{} axes for {} coordinates", psi.spec.ndim(), layout.dim())));
    }
    if psi.frame != Frame::Bare {
        return Err(Error::GridMismatch("dressing expects a bare state".into()));
    }
    if layout.n_particles < 2 {
        return Err(Error::Unsupported("a single particle has no relational coordinates".into()));
    }
    let mut spec = psi.spec.clone();
    let mut amps = psi.amps.clone();
    for axis in layout.block(anchor).rev() {
        let (s, a) = collapse_at_zero(&spec, &amps, axis)?;
        spec = s;
        amps = a;
    }
    if let Some(c) = phase {
        let inv = c.phase().conj();
        amps.iter_mut().for_each(|a| *a = *a * inv);
    }
    WaveGrid::new(spec, psi.t, amps, Frame::Relational { anchor })
}

/// `sum |psi|^2` over the bare slice `x_anchor = 0`, with the reduced cell volume.
pub fn slice_norm<T: Real>(psi: &WaveGrid<T>, layout: &Layout, anchor: usize) -> Result<T> {
    let block = layout.block(anchor);
    let mut nodes = Vec::new();
    for ax in block.clone() {
        nodes.push(zero_node(&psi.spec.axes[ax]).ok_or_else(|| Error::OutOfBounds("slice at 0 is not on the grid".into()))?);
    }
    let dv = psi
        .spec
        .axes
        .iter()
        .enumerate()
        .filter(|(ax, _)| !block.contains(ax))
        .fold(T::one(), |acc, (_, a)| acc * a.dx());
    let mut s = T::zero();
    for (k, a) in psi.amps.iter().enumerate() {
        let idx = psi.spec.unravel(k);
        if block.clone().zip(&nodes).all(|(ax, n0)| idx[ax] == *n0) {
            s = s + a.norm_sqr();
        }
    }
    Ok((s * dv).sqrt())
}

/// Change of anchor `i -> j` with a configuration-dependent frame cocycle.
///
/// The relational axes must be identical and symmetric with an even point
/// count, so the relabelling `y_k = xbar_k - xbar_j` is an exact index
/// permutation with periodic wrap. `cocycle` receives the source relational
/// coordinates (full length, anchor block zero) and returns `c`; the output is
/// multiplied by `exp(+i c / hbar)`.
pub fn frame_change_local<T: Real>(
    psi: &WaveGrid<T>,
    layout: &Layout,
    j: usize,
    hbar: T,
    cocycle: impl Fn(&[T]) -> T,
) -> Result<WaveGrid<T>> {
    let i = match psi.frame {
        Frame::Relational { anchor } => anchor,
        Frame::Bare => return Err(Error::GridMismatch("frame change expects a relational state".into())),
    };
    layout.check_particle(j)?;
    if i == j {
        return Err(Error::SameAnchor);
    }
    let d = layout.spatial_dim;
    let n_part = layout.n_particles;
    if psi.spec.ndim() != (n_part - 1) * d {
        return Err(Error::GridMismatch("relational grid has the wrong number of axes".into()));
    }
    let ax0 = psi.spec.axes[0];
    let n = ax0.n;
    if !n.is_multiple_of(2) || ax0.lo != -ax0.hi || psi.spec.axes.iter().any(|a| *a != ax0) {
        return Err(Error::OutOfBounds("frame change needs identical symmetric axes with an even point count".into()));
    }
    let mid = n / 2;
    // relational axis position of particle k (component c) in a frame anchored at `a`
    let slot = |anchor: usize, k: usize, c: usize| -> usize { (if k < anchor { k } else { k - 1 }) * d + c };
    let spec = psi.spec.clone();
    let mut out = vec![Complex::new(T::zero(), T::zero()); spec.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let yi = spec.unravel(flat);
        // index of y_k, with y_j = 0 at the centre node
        let y = |k: usize, c: usize| -> usize { if k == j { mid } else { yi[slot(j, k, c)] } };
        let mut src = vec![0usize; spec.ndim()];
        let mut coords = vec![T::zero(); layout.dim()];
        for k in (0..n_part).filter(|k| *k != i) {
            for c in 0..d {
                // xbar^i_k = y_k - y_i
                let s = (y(k, c) + n + mid - y(i, c)) % n;
                src[slot(i, k, c)] = s;
                coords[k * d + c] = ax0.point(s);
            }
        }
        let c = cocycle(&coords);
        *o = psi.amps[spec.ravel(&src)] * Complex::from_polar(T::one(), c / hbar);
    }
    WaveGrid::new(spec, psi.t, out, Frame::Relational { anchor: j })
}

/// Frame change with a single accumulated cocycle value.
pub fn frame_change<T: Real>(psi: &WaveGrid<T>, layout: &Layout, j: usize, z_phase: &CocycleAccumulator<T>) -> Result<WaveGrid<T>> {
    let c = z_phase.value;
    frame_change_local(psi, layout, j, z_phase.hbar, |_| c)
}

/// `min_lambda |a - lambda b| / |a|`.
pub fn aligned_relative_error<T: Real>(a: &WaveGrid<T>, b: &WaveGrid<T>) -> Result<f64> {
    let bb = b.inner(b)?;
    let lambda = b.inner(a)? / bb;
    let scaled = b.with_amps(b.amps.iter().map(|x| x * lambda).collect());
    Ok((a.l2_distance(&scaled)? / a.norm()).to_f64().unwrap_or(f64::NAN))
}
