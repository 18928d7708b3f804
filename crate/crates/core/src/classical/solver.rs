use num_traits::Float;

use super::{action_gradient, el_residual};
use crate::bundle::Config;
use crate::cocycle::LagrangianModel;
use crate::error::{Error, Result};
use crate::linalg::solve_block_tridiagonal;
use crate::path::DiscretePath;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop when `max |el_residual|` drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50, max_backtracks: 30 }
    }
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub path: DiscretePath<T>,
    pub iterations: usize,
    pub residual: f64,
}

/// Critical path between two configurations on `m` uniform intervals, by
/// damped Newton from the straight line.
pub fn solve_critical_path<T: Real>(
    model: &LagrangianModel<T>,
    p0: &Config<T>,
    p1: &Config<T>,
    m: usize,
    opts: &SolverOptions,
) -> Result<Solution<T>> {
    if p1.t <= p0.t {
        return Err(Error::TimeOrder { t0: p0.t.approx(), t1: p1.t.approx() });
    }
    if m < 2 {
        return Err(Error::TooFewNodes { needed: 3, got: m + 1 });
    }
    let start = DiscretePath::straight(p0, p1, m)?;
    solve_with_mask(model, start, &vec![false; model.dim()], opts)
}

trait Approx {
    fn approx(&self) -> f64;
}

impl<T: Real> Approx for T {
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn max_residual<T: Real>(res: &[Vec<T>], frozen: &[bool]) -> f64 {
    res.iter()
        .flat_map(|r| r.iter().zip(frozen).filter(|(_, f)| !**f).map(|(v, _)| Float::abs(v.approx())))
        .fold(0.0, f64::max)
}

fn residual_norm<T: Real>(res: &[Vec<T>], frozen: &[bool]) -> f64 {
    res.iter()
        .flat_map(|r| r.iter().zip(frozen).filter(|(_, f)| !**f).map(|(v, _)| v.approx().powi(2)))
        .sum::<f64>()
        .sqrt()
}

/// Newton iteration with the endpoints and every `frozen` coordinate held at
/// their values in `start`.
pub fn solve_with_mask<T: Real>(
    model: &LagrangianModel<T>,
    start: DiscretePath<T>,
    frozen: &[bool],
    opts: &SolverOptions,
) -> Result<Solution<T>> {
    let n = start.nodes();
    if n < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: n });
    }
    let dim = start.dim();
    model.layout().check(dim)?;
    model.layout().check(frozen.len())?;
    let mut path = start;
    let mut res = el_residual(model, &path)?;
    let mut norm = residual_norm(&res, frozen);
    for iter in 0..opts.max_iter {
        let worst = max_residual(&res, frozen);
        if worst < opts.tol {
            return Ok(Solution { path, iterations: iter, residual: worst });
        }
        let step = newton_step(model, &path, frozen)?;
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let mut trial = path.clone();
            for (k, s) in step.iter().enumerate() {
                for c in 0..dim {
                    trial.x[k + 1][c] = trial.x[k + 1][c] + alpha * s[c];
                }
            }
            let tres = el_residual(model, &trial)?;
            let tnorm = residual_norm(&tres, frozen);
            if tnorm.is_finite() && tnorm < norm {
                path = trial;
                res = tres;
                norm = tnorm;
                accepted = true;
                break;
            }
            alpha = alpha * T::half();
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations: iter, residual: max_residual(&res, frozen) });
        }
    }
    let worst = max_residual(&res, frozen);
    if worst < opts.tol {
        Ok(Solution { path, iterations: opts.max_iter, residual: worst })
    } else {
        Err(Error::NonConvergence { iterations: opts.max_iter, residual: worst })
    }
}

/// Newton correction for the interior nodes.
fn newton_step<T: Real>(model: &LagrangianModel<T>, path: &DiscretePath<T>, frozen: &[bool]) -> Result<Vec<Vec<T>>> {
    let n = path.nodes();
    let dim = path.dim();
    let grad = action_gradient(model, path)?;
    let twelfth = T::one() / T::lit(12.0);
    let third = T::one() / T::lit(3.0);
    let mid_hess: Vec<Option<Vec<T>>> = (0..n - 1)
        .map(|k| {
            model.potential.as_ref().map(|p| {
                let mid: Vec<T> = path.x[k].iter().zip(&path.x[k + 1]).map(|(a, b)| T::half() * (*a + *b)).collect();
                p.hessian(&mid)
            })
        })
        .collect();
    let mut diag = Vec::with_capacity(n - 2);
    let mut upper = Vec::with_capacity(n - 3);
    let mut rhs = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let (hl, hr) = (path.dt(k - 1), path.dt(k));
        let mut a = vec![T::zero(); dim * dim];
        for c in 0..dim {
            a[c * dim + c] = model.params.coord_mass(c) * (T::one() / hl + T::one() / hr);
        }
        if let Some(p) = &model.potential {
            let hn = p.hessian(&path.x[k]);
            let ml = mid_hess[k - 1].as_ref().expect("potential present");
            let mr = mid_hess[k].as_ref().expect("potential present");
            for e in 0..dim * dim {
                a[e] = a[e] - (hl + hr) * third * hn[e] - hl * twelfth * ml[e] - hr * twelfth * mr[e];
            }
        }
        let mut r: Vec<T> = grad[k].iter().map(|g| -*g).collect();
        for c in 0..dim {
            if frozen[c] {
                for e in 0..dim {
                    a[c * dim + e] = T::zero();
                    a[e * dim + c] = T::zero();
                }
                a[c * dim + c] = T::one();
                r[c] = T::zero();
            }
        }
        diag.push(a);
        rhs.push(r);
        if k + 1 < n - 1 {
            let mut b = vec![T::zero(); dim * dim];
            for c in 0..dim {
                b[c * dim + c] = -model.params.coord_mass(c) / hr;
            }
            if let Some(mr) = &mid_hess[k] {
                for e in 0..dim * dim {
                    b[e] = b[e] - hr * twelfth * mr[e];
                }
            }
            for c in 0..dim {
                if frozen[c] {
                    for e in 0..dim {
                        b[c * dim + e] = T::zero();
                        b[e * dim + c] = T::zero();
                    }
                }
            }
            upper.push(b);
        }
    }
    solve_block_tridiagonal(&diag, &upper, &rhs, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::ModelParams;
    use crate::classical::action;
    use crate::cocycle::{Harmonic, PairHarmonic};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn free_solution_is_straight() {
        let m = LagrangianModel::free(ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap());
        let s = solve_critical_path(&m, &Config::new(0.0, vec![0.0]).unwrap(), &Config::new(1.0, vec![1.0]).unwrap(), 200, &SolverOptions::default()).unwrap();
        assert!((action(&m, &s.path).unwrap() - 0.5).abs() < 1e-12);
        for (t, x) in s.path.t.iter().zip(&s.path.x) {
            assert!((x[0] - t).abs() < 1e-12);
        }
        let still = solve_critical_path(&m, &Config::new(0.0, vec![2.0]).unwrap(), &Config::new(1.0, vec![2.0]).unwrap(), 10, &SolverOptions::default()).unwrap();
        assert_eq!(action(&m, &still.path).unwrap(), 0.0);
    }

    #[test]
    fn harmonic_solution_is_sine() {
        let params = ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap();
        let m = LagrangianModel::with_potential(params, Harmonic::isotropic(1, 1.0));
        let s = solve_critical_path(&m, &Config::new(0.0, vec![0.0]).unwrap(), &Config::new(FRAC_PI_2, vec![1.0]).unwrap(), 200, &SolverOptions::default()).unwrap();
        let err = s.path.t.iter().zip(&s.path.x).map(|(t, x)| (x[0] - t.sin()).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "nodal error {err}");
        assert!(action(&m, &s.path).unwrap().abs() < 1e-6);
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn frozen_coordinates_stay_put() {
        let params = ModelParams::with_unit_hbar(2, 1, vec![1.0, 2.0]).unwrap();
        let layout = params.layout();
        let m = LagrangianModel::with_potential(params, PairHarmonic { layout, k: 0.5 });
        let start = DiscretePath::straight(&Config::new(0.0, vec![0.0, 0.0]).unwrap(), &Config::new(1.0, vec![0.0, 1.0]).unwrap(), 30).unwrap();
        let s = solve_with_mask(&m, start, &[true, false], &SolverOptions::default()).unwrap();
        assert!(s.path.x.iter().all(|x| x[0] == 0.0));
        assert!(s.residual < 1e-10);
    }

    #[test]
    fn reports_time_order_and_stalls() {
        let m = LagrangianModel::free(ModelParams::with_unit_hbar(1, 1, vec![1.0]).unwrap());
        let p = Config::new(1.0, vec![0.0]).unwrap();
        assert!(matches!(solve_critical_path(&m, &p, &p, 10, &SolverOptions::default()), Err(Error::TimeOrder { .. })));
        let strict = SolverOptions { tol: 0.0, ..Default::default() };
        let q = Config::new(2.0, vec![1.0]).unwrap();
        assert!(matches!(solve_critical_path(&m, &p, &q, 10, &strict), Err(Error::NonConvergence { .. })));
    }
}
