use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Forward or inverse unnormalised FFT along every axis of a row-major array.
pub(crate) fn fft_nd<T: Real>(data: &mut [Complex<T>], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    for axis in 0..shape.len() {
        let n = shape[axis];
        let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        fft_axis(data, shape, axis, &plan);
    }
}

pub(crate) fn fft_axis<T: Real>(data: &mut [Complex<T>], shape: &[usize], axis: usize, plan: &Arc<dyn Fft<T>>) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    if stride == 1 {
        data.par_chunks_mut(n).for_each(|line| plan.process(line));
        return;
    }
    let block = n * stride;
    let lines = data.len() / n;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); data.len()];
    for l in 0..lines {
        let base = (l / stride) * block + l % stride;
        for k in 0..n {
            buf[l * n + k] = data[base + k * stride];
        }
    }
    buf.par_chunks_mut(n).for_each(|line| plan.process(line));
    for l in 0..lines {
        let base = (l / stride) * block + l % stride;
        for k in 0..n {
            data[base + k * stride] = buf[l * n + k];
        }
    }
}

/// Angular wavenumbers in FFT order for `n` points over length `len`.
pub(crate) fn wavenumbers<T: Real>(n: usize, len: T) -> Vec<T> {
    let base = T::lit(2.0) * T::PI() / len;
    (0..n)
        .map(|j| {
            let s = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
            base * T::lit(s)
        })
        .collect()
}
