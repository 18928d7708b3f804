//! Discrete action, gauge transformations of the action, Euler-Lagrange
//! residuals, Noether charges, the critical-path solver and the Hamilton
//! principal function.
//!
//! Each interval contributes `m |dx|^2 / (2 h) - h/3 (V(a) + V(mid) + V(b))`.
//! The potential weights are a 2/3 trapezoid plus 1/3 midpoint blend, which
//! removes the leading `h^2` frequency error of the discrete harmonic oscillator.

mod hpf;
mod solver;

pub use hpf::{flat_connection, hj_residual, hpf_table, FlatCocyclicConnection, HpfTable};
pub use solver::{solve_critical_path, solve_with_mask, Solution, SolverOptions};

use crate::bundle::GaugeField;
use crate::cocycle::{interval_potential, path_cocycle, sample_gauge, LagrangianModel};
use crate::error::{Error, Result};
use crate::path::DiscretePath;
use crate::scalar::Field;

fn check_path<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>) -> Result<()> {
    if path.nodes() < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: path.nodes() });
    }
    if path.t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateGrid("repeated or decreasing times".into()));
    }
    model.layout().check(path.dim())
}

/// Kinetic energy integral over one interval.
fn interval_kinetic<T: Field>(model: &LagrangianModel<T>, a: &[T], b: &[T], h: &T) -> T {
    let s = a.iter().zip(b).enumerate().fold(T::zero(), |acc, (c, (u, w))| {
        let d = w.clone() - u.clone();
        acc + model.params.coord_mass(c) * d.clone() * d
    });
    T::half() * s / h.clone()
}

/// Discrete action of a path (parametrised or not).
pub fn action<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>) -> Result<T> {
    check_path(model, path)?;
    let mut s = T::zero();
    for k in 0..path.nodes() - 1 {
        let h = path.dt(k);
        s = s + interval_kinetic(model, &path.x[k], &path.x[k + 1], &h)
            - interval_potential(model, &path.x[k], &path.x[k + 1], &h);
    }
    Ok(s)
}

/// Action of the gauge-transformed path, evaluated directly on it.
pub fn action_gauge_transformed<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, g: &GaugeField<T>) -> Result<T> {
    action(model, &gauge_transform_path(path, g))
}

/// `action(path) + c_path(X)`.
pub fn gauge_split_rhs<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, g: &GaugeField<T>) -> Result<T> {
    Ok(action(model, path)? + path_cocycle(model, path, g)?.value)
}

pub fn gauge_transform_path<T: Field>(path: &DiscretePath<T>, g: &GaugeField<T>) -> DiscretePath<T> {
    path.shifted(&sample_gauge(path, g))
}

/// `dS/dx_k` for every node, endpoints included.
pub fn action_gradient<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>) -> Result<Vec<Vec<T>>> {
    check_path(model, path)?;
    let n = path.nodes();
    let dim = path.dim();
    let mut g = vec![vec![T::zero(); dim]; n];
    let sixth = T::one() / T::from_count(6);
    let third = T::one() / T::from_count(3);
    for k in 0..n - 1 {
        let h = path.dt(k);
        let (a, b) = (&path.x[k], &path.x[k + 1]);
        for c in 0..dim {
            let f = model.params.coord_mass(c) * (b[c].clone() - a[c].clone()) / h.clone();
            g[k][c] = g[k][c].clone() - f.clone();
            g[k + 1][c] = g[k + 1][c].clone() + f;
        }
        if let Some(pot) = &model.potential {
            let mid: Vec<T> = a.iter().zip(b).map(|(u, w)| T::half() * (u.clone() + w.clone())).collect();
            let (ga, gm, gb) = (pot.gradient(a), pot.gradient(&mid), pot.gradient(b));
            for c in 0..dim {
                let hm = h.clone() * sixth.clone() * gm[c].clone();
                g[k][c] = g[k][c].clone() - h.clone() * third.clone() * ga[c].clone() - hm.clone();
                g[k + 1][c] = g[k + 1][c].clone() - h.clone() * third.clone() * gb[c].clone() - hm;
            }
        }
    }
    Ok(g)
}

/// Discrete `m x'' + grad V` at the interior nodes: `-dS/dx_k` divided by the
/// dual cell length.
pub fn el_residual<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>) -> Result<Vec<Vec<T>>> {
    if path.nodes() < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: path.nodes() });
    }
    let g = action_gradient(model, path)?;
    Ok((1..path.nodes() - 1)
        .map(|k| {
            let w = T::half() * (path.dt(k - 1) + path.dt(k));
            g[k].iter().map(|gc| -gc.clone() / w.clone()).collect()
        })
        .collect())
}

/// `<chi, m v>` on each interval (midpoint velocity).
pub fn noether_charge<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, chi: &[T]) -> Result<Vec<T>> {
    check_path(model, path)?;
    model.layout().check(chi.len())?;
    Ok((0..path.nodes() - 1)
        .map(|k| {
            path.velocity(k).iter().zip(chi).enumerate().fold(T::zero(), |acc, (c, (v, x))| {
                acc + model.params.coord_mass(c) * v.clone() * x.clone()
            })
        })
        .collect())
}
