use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;

use super::{action, solve_critical_path, SolverOptions};
use crate::bundle::Config;
use crate::cocycle::LagrangianModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hamilton principal function sampled on a `t x x` table, `s[it][ix]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HpfTable<T> {
    pub t0: T,
    pub x0: Vec<T>,
    pub t: Vec<T>,
    pub x: Vec<Vec<T>>,
    pub s: Vec<Vec<T>>,
}

/// Solves the critical path from `p0` to every table node on `m` intervals.
pub fn hpf_table<T: Real>(
    model: &LagrangianModel<T>,
    p0: &Config<T>,
    t_grid: &[T],
    x_grid: &[Vec<T>],
    m: usize,
    opts: &SolverOptions,
) -> Result<HpfTable<T>> {
    if let Some(t) = t_grid.iter().find(|t| **t <= p0.t) {
        return Err(Error::TimeOrder { t0: p0.t.approx_f64(), t1: t.approx_f64() });
    }
    let s = t_grid
        .par_iter()
        .map(|t| {
            x_grid
                .iter()
                .map(|x| {
                    let p1 = Config { t: *t, x: x.clone() };
                    let sol = solve_critical_path(model, p0, &p1, m, opts)?;
                    action(model, &sol.path)
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HpfTable { t0: p0.t, x0: p0.x.clone(), t: t_grid.to_vec(), x: x_grid.to_vec(), s })
}

impl<T: Real> HpfTable<T> {
    /// Free closed form `sum m |x - x0|^2 / (2 (t - t0))` at every node.
    pub fn free_closed_form(&self, model: &LagrangianModel<T>) -> Vec<Vec<T>> {
        self.t
            .iter()
            .map(|t| {
                self.x
                    .iter()
                    .map(|x| {
                        let q = x.iter().zip(&self.x0).enumerate().fold(T::zero(), |acc, (c, (a, b))| {
                            acc + model.params.coord_mass(c) * (*a - *b) * (*a - *b)
                        });
                        q / (T::lit(2.0) * (*t - self.t0))
                    })
                    .collect()
            })
            .collect()
    }

    fn axes(&self) -> Result<(Vec<T>, T, T)> {
        if self.x.iter().any(|x| x.len() != 1) {
            return Err(Error::Unsupported("derivatives of the table need a single coordinate".into()));
        }
        let xs: Vec<T> = self.x.iter().map(|x| x[0]).collect();
        let ht = uniform_step(&self.t)?;
        let hx = uniform_step(&xs)?;
        Ok((xs, ht, hx))
    }

    /// `(dS/dt, dS/dx)` on the full table.
    pub fn gradient(&self) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
        let (xs, ht, hx) = self.axes()?;
        if self.t.len() < 3 || xs.len() < 3 {
            return Err(Error::DegenerateGrid("table needs at least 3 x 3 nodes".into()));
        }
        Ok((diff_t(&self.s, ht), diff_x(&self.s, hx)))
    }
}

fn uniform_step<T: Real>(g: &[T]) -> Result<T> {
    if g.len() < 2 {
        return Err(Error::DegenerateGrid("axis needs at least 2 nodes".into()));
    }
    let h = (g[g.len() - 1] - g[0]) / T::from_usize_lossy(g.len() - 1);
    let tol = T::lit(1e-9) * Float::abs(h);
    if g.windows(2).any(|w| Float::abs(w[1] - w[0] - h) > tol) || h <= T::zero() {
        return Err(Error::DegenerateGrid("table axes must be uniform and increasing".into()));
    }
    Ok(h)
}

/// First derivative on a uniform grid: fourth order inside, second order next
/// to the edges, one-sided second order at the edges.
pub fn derivative<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let two = T::lit(2.0);
    let mut d = vec![T::zero(); n];
    if n < 3 {
        if n == 2 {
            d[0] = (f[1] - f[0]) / h;
            d[1] = d[0];
        }
        return d;
    }
    d[0] = (-T::lit(3.0) * f[0] + T::lit(4.0) * f[1] - f[2]) / (two * h);
    d[n - 1] = (T::lit(3.0) * f[n - 1] - T::lit(4.0) * f[n - 2] + f[n - 3]) / (two * h);
    for i in 1..n - 1 {
        d[i] = if i >= 2 && i + 2 < n {
            (f[i - 2] - T::lit(8.0) * f[i - 1] + T::lit(8.0) * f[i + 1] - f[i + 2]) / (T::lit(12.0) * h)
        } else {
            (f[i + 1] - f[i - 1]) / (two * h)
        };
    }
    d
}

fn diff_x<T: Real>(f: &[Vec<T>], h: T) -> Vec<Vec<T>> {
    f.iter().map(|row| derivative(row, h)).collect()
}

fn diff_t<T: Real>(f: &[Vec<T>], h: T) -> Vec<Vec<T>> {
    let (nt, nx) = (f.len(), f[0].len());
    let cols: Vec<Vec<T>> = (0..nx).map(|j| derivative(&(0..nt).map(|i| f[i][j]).collect::<Vec<_>>(), h)).collect();
    (0..nt).map(|i| (0..nx).map(|j| cols[j][i]).collect()).collect()
}

/// Index range where the fourth-order stencil applies.
pub(crate) fn check_range(n: usize) -> std::ops::Range<usize> {
    if n >= 5 {
        2..n - 2
    } else {
        1..n - 1
    }
}

/// `max |dS/dt + (dS/dx)^2 / (2m) + V(x)|` over the table interior.
pub fn hj_residual<T: Real>(hpf: &HpfTable<T>, model: &LagrangianModel<T>) -> Result<f64> {
    if model.dim() != 1 {
        return Err(Error::Unsupported("Hamilton-Jacobi check is implemented for one coordinate".into()));
    }
    let (st, sx) = hpf.gradient()?;
    let m = model.params.masses[0];
    let mut worst = 0.0f64;
    for i in check_range(hpf.t.len()) {
        for j in check_range(hpf.x.len()) {
            let r = st[i][j] + sx[i][j] * sx[i][j] / (T::lit(2.0) * m) + model.potential_at(&hpf.x[j]);
            worst = worst.max(Float::abs(r.approx_f64()));
        }
    }
    Ok(worst)
}

/// `-(i/hbar) dS` on the table: component fields for `dt` and `dx`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatCocyclicConnection<T> {
    pub hbar: T,
    pub t: Vec<T>,
    pub x: Vec<T>,
    pub a_t: Vec<Vec<Complex<T>>>,
    pub a_x: Vec<Vec<Complex<T>>>,
}

pub fn flat_connection<T: Real>(hpf: &HpfTable<T>, hbar: T) -> Result<FlatCocyclicConnection<T>> {
    let (xs, _, _) = hpf.axes()?;
    let (st, sx) = hpf.gradient()?;
    let scale = |f: Vec<Vec<T>>| -> Vec<Vec<Complex<T>>> {
        f.into_iter().map(|r| r.into_iter().map(|v| Complex::new(T::zero(), -v / hbar)).collect()).collect()
    };
    Ok(FlatCocyclicConnection { hbar, t: hpf.t.clone(), x: xs, a_t: scale(st), a_x: scale(sx) })
}

impl<T: Real> FlatCocyclicConnection<T> {
    /// `max |D_t A_x - D_x A_t|` over the interior.
    pub fn curl(&self) -> Result<f64> {
        let ht = uniform_step(&self.t)?;
        let hx = uniform_step(&self.x)?;
        let im = |a: &Vec<Vec<Complex<T>>>| -> Vec<Vec<T>> { a.iter().map(|r| r.iter().map(|c| c.im).collect()).collect() };
        let dtax = diff_t(&im(&self.a_x), ht);
        let dxat = diff_x(&im(&self.a_t), hx);
        let mut worst = 0.0f64;
        for i in check_range(self.t.len()) {
            for j in check_range(self.x.len()) {
                worst = worst.max(Float::abs((dtax[i][j] - dxat[i][j]).approx_f64()));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::ModelParams;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    fn free() -> LagrangianModel<f64> {
        LagrangianModel::free(ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap())
    }

    #[test]
    fn free_table_examples() {
        let m = free();
        let p0 = Config::new(0.0, vec![0.0]).unwrap();
        let tab = hpf_table(&m, &p0, &[1.0, 2.0], &[vec![0.0], vec![2.0]], 8, &SolverOptions::default()).unwrap();
        assert!((tab.s[0][1] - 2.0).abs() < 1e-12);
        assert!(tab.s.iter().all(|r| r[0] == 0.0));
        assert!(hpf_table(&m, &p0, &[0.0], &[vec![0.0]], 8, &SolverOptions::default()).is_err());
    }

    #[test]
    fn hamilton_jacobi_and_flatness() {
        let m = free();
        let p0 = Config::new(0.0, vec![0.0]).unwrap();
        let xs: Vec<Vec<f64>> = grid(-1.0, 1.0, 30).into_iter().map(|x| vec![x]).collect();
        let tab = hpf_table(&m, &p0, &grid(1.0, 2.0, 30), &xs, 8, &SolverOptions::default()).unwrap();
        assert!(hj_residual(&tab, &m).unwrap() < 1e-5);
        let conn = flat_connection(&tab, 1.0).unwrap();
        for (i, t) in tab.t.iter().enumerate() {
            for (j, x) in conn.x.iter().enumerate() {
                assert!((conn.a_x[i][j].im + x / t).abs() < 1e-9);
            }
        }
        assert!(conn.curl().unwrap() < 1e-9);
    }

    #[test]
    fn constant_table_has_zero_connection() {
        let tab = HpfTable { t0: 0.0, x0: vec![0.0], t: grid(1.0, 2.0, 4), x: grid(0.0, 1.0, 4).into_iter().map(|x| vec![x]).collect(), s: vec![vec![3.0; 4]; 4] };
        let conn = flat_connection(&tab, 1.0).unwrap();
        assert!(conn.a_t.iter().chain(&conn.a_x).flatten().all(|c| c.norm() == 0.0));
        let small = HpfTable { t: vec![1.0, 2.0], s: vec![vec![0.0; 4]; 2], ..tab };
        assert!(flat_connection(&small, 1.0).is_err());
    }

    #[test]
    fn derivative_orders() {
        let h = 0.01;
        let x = grid(0.0, 1.0, 101);
        let f: Vec<f64> = x.iter().map(|x| x.powi(4)).collect();
        let d = derivative(&f, h);
        assert!((d[50] - 4.0 * 0.125).abs() < 1e-12);
        assert!((d[0] - 0.0).abs() < 1e-3);
    }
}
