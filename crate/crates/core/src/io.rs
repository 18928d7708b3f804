//! Binary snapshots of grid states and kernels, and CSV tables.
//!
//! Binary layout (little endian): `"CQMW"`, version `u32`, `ndim u32`, per axis
//! `{lo f64, hi f64, n u32}`, `t f64`, then interleaved `(re f64, im f64)` in
//! row-major order. A kernel writes the output-grid header, then a second grid
//! block (`ndim`, axes, `t0`) for the input grid, then `K[x][x0]`.

use std::io::{Read, Write};

use num_complex::Complex;

use crate::classical::HpfTable;
use crate::error::{Error, Result};
use crate::path::{DiscretePath, Frame};
use crate::pathint::PropagatorKernel;
use crate::quantum::{Axis, GridSpec, WaveGrid};
use crate::scalar::{Field, Real};

pub const MAGIC: &[u8; 4] = b"CQMW";
pub const VERSION: u32 = 1;

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn put_grid<T: Real>(w: &mut impl Write, axes: &[Axis<T>], t: T) -> Result<()> {
    put_u32(w, axes.len() as u32)?;
    for a in axes {
        put_f64(w, a.lo.approx_f64())?;
        put_f64(w, a.hi.approx_f64())?;
        put_u32(w, a.n as u32)?;
    }
    put_f64(w, t.approx_f64())
}

fn get_grid<T: Real>(r: &mut impl Read) -> Result<(Vec<Axis<T>>, T)> {
    let ndim = get_u32(r)? as usize;
    if ndim == 0 || ndim > 16 {
        return Err(Error::Format(format!("implausible dimension {ndim}")));
    }
    let mut axes = Vec::with_capacity(ndim);
    for _ in 0..ndim {
        let lo = T::lit(get_f64(r)?);
        let hi = T::lit(get_f64(r)?);
        let n = get_u32(r)? as usize;
        axes.push(Axis::new(lo, hi, n).map_err(|e| Error::Format(e.to_string()))?);
    }
    Ok((axes, T::lit(get_f64(r)?)))
}

fn put_header<T: Real>(w: &mut impl Write, axes: &[Axis<T>], t: T) -> Result<()> {
    w.write_all(MAGIC)?;
    put_u32(w, VERSION)?;
    put_grid(w, axes, t)
}

fn get_header<T: Real>(r: &mut impl Read) -> Result<(Vec<Axis<T>>, T)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = get_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    get_grid(r)
}

fn put_amps<T: Real>(w: &mut impl Write, amps: &[Complex<T>]) -> Result<()> {
    let mut buf = Vec::with_capacity(amps.len() * 16);
    for a in amps {
        buf.extend_from_slice(&a.re.approx_f64().to_le_bytes());
        buf.extend_from_slice(&a.im.approx_f64().to_le_bytes());
    }
    Ok(w.write_all(&buf)?)
}

fn get_amps<T: Real>(r: &mut impl Read, len: usize) -> Result<Vec<Complex<T>>> {
    let mut buf = vec![0u8; len * 16];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect())
}

pub fn write_wave<T: Real>(w: &mut impl Write, psi: &WaveGrid<T>) -> Result<()> {
    put_header(w, &psi.spec.axes, psi.t)?;
    put_amps(w, &psi.amps)
}

/// Reads a snapshot; the frame is not stored and is returned as `frame`.
pub fn read_wave<T: Real>(r: &mut impl Read, frame: Frame) -> Result<WaveGrid<T>> {
    let (axes, t) = get_header(r)?;
    let spec = GridSpec::new(axes)?;
    let amps = get_amps(r, spec.len())?;
    WaveGrid::new(spec, t, amps, frame)
}

pub fn write_kernel<T: Real>(w: &mut impl Write, k: &PropagatorKernel<T>) -> Result<()> {
    put_header(w, &[k.axis], k.t1)?;
    put_grid(w, &[k.axis], k.t0)?;
    put_amps(w, &k.k)
}

/// Reads a kernel; returns the output axis, input axis, `t1`, `t0` and entries.
#[allow(clippy::type_complexity)]
pub fn read_kernel<T: Real>(r: &mut impl Read) -> Result<(Vec<Axis<T>>, Vec<Axis<T>>, T, T, Vec<Complex<T>>)> {
    let (out_axes, t1) = get_header(r)?;
    let (in_axes, t0) = get_grid(r)?;
    let n_out: usize = out_axes.iter().map(|a| a.n).product();
    let n_in: usize = in_axes.iter().map(|a| a.n).product();
    let k = get_amps(r, n_out * n_in)?;
    Ok((out_axes, in_axes, t1, t0, k))
}

fn row<T: Field>(vals: impl IntoIterator<Item = T>) -> String {
    vals.into_iter().map(|v| v.approx_f64().to_string()).collect::<Vec<_>>().join(",")
}

/// `tau,t,x_1..x_n`.
pub fn path_csv<T: Field>(path: &DiscretePath<T>) -> String {
    let dim = path.dim();
    let mut s = String::from("tau,t");
    for c in 1..=dim {
        s.push_str(&format!(",x_{c}"));
    }
    s.push('\n');
    for k in 0..path.nodes() {
        let vals = [path.tau[k].clone(), path.t[k].clone()].into_iter().chain(path.x[k].iter().cloned());
        s.push_str(&row(vals));
        s.push('\n');
    }
    s
}

/// `t,x_1..x_n,S`.
pub fn hpf_csv<T: Real>(hpf: &HpfTable<T>) -> String {
    let dim = hpf.x0.len();
    let mut s = String::from("t");
    for c in 1..=dim {
        s.push_str(&format!(",x_{c}"));
    }
    s.push_str(",S\n");
    for (it, t) in hpf.t.iter().enumerate() {
        for (ix, x) in hpf.x.iter().enumerate() {
            let vals = std::iter::once(*t).chain(x.iter().copied()).chain(std::iter::once(hpf.s[it][ix]));
            s.push_str(&row(vals));
            s.push('\n');
        }
    }
    s
}

/// `x,density` for the marginal of `|psi|^2` along `axis`.
pub fn marginal_csv<T: Real>(psi: &WaveGrid<T>, axis: usize) -> String {
    let mut s = String::from("x,density\n");
    let ax = psi.spec.axes[axis];
    for (k, d) in psi.marginal(axis).into_iter().enumerate() {
        s.push_str(&row([ax.point(k), d]));
        s.push('\n');
    }
    s
}

/// `x,abs_k,arg_k` along the row `K(x, x0)` with `x0` the grid node `column`.
pub fn kernel_slice_csv<T: Real>(k: &PropagatorKernel<T>, column: usize) -> String {
    let mut s = String::from("x,abs_k,arg_k\n");
    for a in 0..k.n() {
        let v = k.at(a, column);
        s.push_str(&row([k.axis.point(a), v.norm(), v.arg()]));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::ModelParams;
    use crate::pathint::{sliced_propagator, SliceScheme};

    #[test]
    fn wave_round_trip_is_bitwise() {
        let spec = GridSpec::new(vec![Axis::symmetric(3.0, 16).unwrap(), Axis::new(-1.0, 2.0, 8).unwrap()]).unwrap();
        let psi = WaveGrid::gaussian(spec, &[0.3, 0.1], &[0.7, 0.5], &[1.0, -2.0]).unwrap();
        let mut buf = Vec::new();
        write_wave(&mut buf, &psi).unwrap();
        assert_eq!(&buf[..4], b"CQMW");
        assert_eq!(buf.len(), 4 + 4 + 4 + 2 * 20 + 8 + 16 * 128);
        let back: WaveGrid<f64> = read_wave(&mut buf.as_slice(), psi.frame).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn rejects_corrupt_input() {
        let mut junk = b"CQMX\x01\0\0\0".to_vec();
        assert!(matches!(read_wave::<f64>(&mut junk.as_slice(), Frame::Bare), Err(Error::Format(_))));
        junk[3] = b'W';
        assert!(matches!(read_wave::<f64>(&mut junk.as_slice(), Frame::Bare), Err(Error::Io(_))));
    }

    #[test]
    fn kernel_round_trip() {
        let p = ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap();
        let k = sliced_propagator(&p, &SliceScheme::new(2, Axis::symmetric(5.0, 16).unwrap(), 0.0, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_kernel(&mut buf, &k).unwrap();
        let (o, i, t1, t0, entries) = read_kernel::<f64>(&mut buf.as_slice()).unwrap();
        assert_eq!((o[0], i[0], t1, t0), (k.axis, k.axis, 1.0, 0.0));
        assert_eq!(entries, k.k);
        let csv = kernel_slice_csv(&k, 8);
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn csv_headers() {
        let path = DiscretePath::straight(&crate::bundle::Config::new(0.0, vec![0.0, 1.0]).unwrap(), &crate::bundle::Config::new(1.0, vec![1.0, 1.0]).unwrap(), 4).unwrap();
        let csv = path_csv(&path);
        assert!(csv.starts_with("tau,t,x_1,x_2\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
