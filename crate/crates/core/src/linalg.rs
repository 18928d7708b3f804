//! Small dense blocks and a symmetric block-tridiagonal solver.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves `a x = b` for a row-major `n x n` matrix with partial pivoting.
/// `b` holds `cols` right-hand sides, row-major `n x cols`.
pub fn solve_dense<T: Real>(a: &[T], b: &[T], n: usize, cols: usize) -> Result<Vec<T>> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                Float::abs(a[i * n + col])
                    .partial_cmp(&Float::abs(a[j * n + col]))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if Float::abs(a[piv * n + col]) <= T::min_positive_value() {
            return Err(Error::NonConvergence { iterations: 0, residual: f64::INFINITY });
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            for c in 0..cols {
                b.swap(col * cols + c, piv * cols + c);
            }
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                a[r * n + c] = a[r * n + c] - f * a[col * n + c];
            }
            for c in 0..cols {
                b[r * cols + c] = b[r * cols + c] - f * b[col * cols + c];
            }
        }
    }
    for col in (0..n).rev() {
        let p = a[col * n + col];
        for c in 0..cols {
            let mut s = b[col * cols + c];
            for k in col + 1..n {
                s = s - a[col * n + k] * b[k * cols + c];
            }
            b[col * cols + c] = s / p;
        }
    }
    Ok(b)
}

fn matmul<T: Real>(a: &[T], b: &[T], n: usize, cols: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * cols];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..cols {
                out[i * cols + j] = out[i * cols + j] + aik * b[k * cols + j];
            }
        }
    }
    out
}

fn transpose<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut t = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Solves a symmetric block-tridiagonal system. `diag[k]` and `upper[k]`
/// (coupling block `k -> k+1`) are row-major `n x n`; `rhs[k]` has length `n`.
pub fn solve_block_tridiagonal<T: Real>(diag: &[Vec<T>], upper: &[Vec<T>], rhs: &[Vec<T>], n: usize) -> Result<Vec<Vec<T>>> {
    let m = diag.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut cp: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut dp: Vec<Vec<T>> = Vec::with_capacity(m);
    for k in 0..m {
        let (denom, r) = if k == 0 {
            (diag[0].clone(), rhs[0].clone())
        } else {
            let lt = transpose(&upper[k - 1], n);
            let lc = matmul(&lt, &cp[k - 1], n, n);
            let ld = matmul(&lt, &dp[k - 1], n, 1);
            let denom: Vec<T> = diag[k].iter().zip(&lc).map(|(a, b)| *a - *b).collect();
            let r: Vec<T> = rhs[k].iter().zip(&ld).map(|(a, b)| *a - *b).collect();
            (denom, r)
        };
        if k + 1 < m {
            cp.push(solve_dense(&denom, &upper[k], n, n)?);
        } else {
            cp.push(Vec::new());
        }
        dp.push(solve_dense(&denom, &r, n, 1)?);
    }
    let mut x = vec![Vec::new(); m];
    x[m - 1] = dp[m - 1].clone();
    for k in (0..m - 1).rev() {
        let cx = matmul(&cp[k], &x[k + 1], n, 1);
        x[k] = dp[k].iter().zip(&cx).map(|(a, b)| *a - *b).collect();
    }
    Ok(x)
}
