//! The Lagrangian 1-cocycle of the configuration bundle and its path integral.
//!
//! For `L = sum m/2 |v|^2 - V(x)` a shift `X` with velocity `W` changes the
//! Lagrangian by `c = sum m (<v, W> + |W|^2 / 2) - (V(x + X) - V(x))`.
//! Path quantities use per-interval secant velocities and the same potential
//! quadrature as the action, which makes the discrete gauge split exact.

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex;

use crate::bundle::{Config, GaugeField, Layout, ModelParams, Shift};
use crate::error::{Error, Result};
use crate::path::DiscretePath;
use crate::scalar::{Field, Real};

/// A potential energy on the full coordinate vector.
pub trait Potential<T>: Debug + Send + Sync {
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    /// Dense row-major Hessian.
    fn hessian(&self, x: &[T]) -> Vec<T>;
    /// Depends only on coordinate differences.
    fn translation_invariant(&self) -> bool;
}

/// `V = sum_c k_c/2 (x_c - center_c)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Harmonic<T> {
    pub k: Vec<T>,
    pub center: Vec<T>,
}

impl<T: Field> Harmonic<T> {
    pub fn isotropic(dim: usize, k: T) -> Self {
        Self { k: vec![k; dim], center: vec![T::zero(); dim] }
    }
}

impl<T: Field> Potential<T> for Harmonic<T> {
    fn value(&self, x: &[T]) -> T {
        x.iter().zip(&self.k).zip(&self.center).fold(T::zero(), |acc, ((xi, k), c)| {
            let d = xi.clone() - c.clone();
            acc + T::half() * k.clone() * d.clone() * d
        })
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.k)
            .zip(&self.center)
            .map(|((xi, k), c)| k.clone() * (xi.clone() - c.clone()))
            .collect()
    }

    fn hessian(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        let mut h = vec![T::zero(); n * n];
        for (c, k) in self.k.iter().enumerate() {
            h[c * n + c] = k.clone();
        }
        h
    }

    fn translation_invariant(&self) -> bool {
        false
    }
}

/// Springs between every pair of particles: `V = sum_{a<b} k/2 |x_a - x_b|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairHarmonic<T> {
    pub layout: Layout,
    pub k: T,
}

impl<T: Field> Potential<T> for PairHarmonic<T> {
    fn value(&self, x: &[T]) -> T {
        let (n, d) = (self.layout.n_particles, self.layout.spatial_dim);
        let mut acc = T::zero();
        for a in 0..n {
            for b in a + 1..n {
                for ax in 0..d {
                    let r = x[a * d + ax].clone() - x[b * d + ax].clone();
                    acc = acc + T::half() * self.k.clone() * r.clone() * r;
                }
            }
        }
        acc
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let (n, d) = (self.layout.n_particles, self.layout.spatial_dim);
        let mut g = vec![T::zero(); x.len()];
        for a in 0..n {
            for b in a + 1..n {
                for ax in 0..d {
                    let f = self.k.clone() * (x[a * d + ax].clone() - x[b * d + ax].clone());
                    g[a * d + ax] = g[a * d + ax].clone() + f.clone();
                    g[b * d + ax] = g[b * d + ax].clone() - f;
                }
            }
        }
        g
    }

    fn hessian(&self, x: &[T]) -> Vec<T> {
        let (n, d) = (self.layout.n_particles, self.layout.spatial_dim);
        let dim = x.len();
        let mut h = vec![T::zero(); dim * dim];
        for a in 0..n {
            for b in 0..n {
                let w = if a == b { self.k.clone() * T::from_count(n - 1) } else { -self.k.clone() };
                for ax in 0..d {
                    h[(a * d + ax) * dim + b * d + ax] = w.clone();
                }
            }
        }
        h
    }

    fn translation_invariant(&self) -> bool {
        true
    }
}

/// Free particles, optionally with a potential.
#[derive(Clone, Debug)]
pub struct LagrangianModel<T> {
    pub params: ModelParams<T>,
    pub potential: Option<Arc<dyn Potential<T>>>,
}

impl<T: Field> LagrangianModel<T> {
    pub fn free(params: ModelParams<T>) -> Self {
        Self { params, potential: None }
    }

    pub fn with_potential(params: ModelParams<T>, potential: impl Potential<T> + 'static) -> Self {
        Self { params, potential: Some(Arc::new(potential)) }
    }

    pub fn is_free(&self) -> bool {
        self.potential.is_none()
    }

    pub fn kind(&self) -> &'static str {
        if self.is_free() {
            "free"
        } else {
            "free+potential"
        }
    }

    pub fn layout(&self) -> Layout {
        self.params.layout()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn hbar(&self) -> T {
        self.params.hbar.clone()
    }

    pub fn potential_at(&self, x: &[T]) -> T {
        self.potential.as_ref().map(|v| v.value(x)).unwrap_or_else(T::zero)
    }

    /// `sum m/2 |v|^2 - V(x)`.
    pub fn lagrangian(&self, x: &[T], v: &[T]) -> T {
        let kin = v.iter().enumerate().fold(T::zero(), |acc, (c, vc)| {
            acc + T::half() * self.params.coord_mass(c) * vc.clone() * vc.clone()
        });
        kin - self.potential_at(x)
    }

    /// Potential part of the cocycle can be skipped for this gauge data.
    fn potential_blind_to(&self, shifts: &[Vec<T>]) -> bool {
        match &self.potential {
            None => true,
            Some(v) => {
                let l = self.layout();
                v.translation_invariant()
                    && shifts.iter().all(|s| Shift::new(s.clone()).is_replicated(&l))
            }
        }
    }
}

/// Largest violation of `V(x + replicate(a)) = V(x)` over the supplied probes.
pub fn translation_invariance_defect<T: Field>(model: &LagrangianModel<T>, probes: &[(Vec<T>, Vec<T>)]) -> f64 {
    let l = model.layout();
    probes
        .iter()
        .map(|(x, a)| {
            let shifted: Vec<T> = x.iter().zip(l.replicate(a)).map(|(u, s)| u.clone() + s).collect();
            (model.potential_at(&shifted) - model.potential_at(x)).approx_f64().abs()
        })
        .fold(0.0, f64::max)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Free-model density `sum_k m_k (<v_k, W_k> + |W_k|^2 / 2)`.
pub fn cocycle_density<T: Field>(model: &LagrangianModel<T>, v: &Shift<T>, w: &Shift<T>) -> Result<T> {
    check_len(model.dim(), v.len())?;
    check_len(model.dim(), w.len())?;
    Ok(kinetic_density(&model.params, &v.v, &w.v))
}

fn kinetic_density<T: Field>(params: &ModelParams<T>, v: &[T], w: &[T]) -> T {
    v.iter().zip(w).enumerate().fold(T::zero(), |acc, (c, (vc, wc))| {
        acc + params.coord_mass(c) * (vc.clone() * wc.clone() + T::half() * wc.clone() * wc.clone())
    })
}

/// Pointwise cocycle for a shift acting on both position and velocity.
pub fn point_cocycle<T: Field>(model: &LagrangianModel<T>, p: &Config<T>, v: &Shift<T>, x: &Shift<T>, w: &Shift<T>) -> Result<T> {
    let kin = cocycle_density(model, v, w)?;
    check_len(model.dim(), p.x.len())?;
    let pot = if model.potential_blind_to(std::slice::from_ref(&x.v)) {
        T::zero()
    } else {
        let moved: Vec<T> = p.x.iter().zip(&x.v).map(|(a, b)| a.clone() + b.clone()).collect();
        model.potential_at(&moved) - model.potential_at(&p.x)
    };
    Ok(kin - pot)
}

/// `|c(p, X+Y) - c(p, X) - c(p+X, Y)|`, with the group element `X` acting on
/// the position and, as gauge velocity, on `v`.
pub fn cocycle_property_residual<T: Field>(
    model: &LagrangianModel<T>,
    p: &Config<T>,
    v: &Shift<T>,
    x: &Shift<T>,
    y: &Shift<T>,
) -> Result<T> {
    let xy = x.add(y);
    let lhs = point_cocycle(model, p, v, &xy, &xy)?;
    let c1 = point_cocycle(model, p, v, x, x)?;
    let px = Config { t: p.t.clone(), x: p.x.iter().zip(&x.v).map(|(a, b)| a.clone() + b.clone()).collect() };
    let c2 = point_cocycle(model, &px, &v.add(x), y, y)?;
    Ok((lhs - c1 - c2).magnitude())
}

/// Real cocycle value `c` along a path together with its U(1) lift.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleAccumulator<T> {
    pub value: T,
    pub hbar: T,
}

impl<T: Field> CocycleAccumulator<T> {
    pub fn new(value: T, hbar: T) -> Self {
        Self { value, hbar }
    }

    pub fn inverse(&self) -> Self {
        Self { value: -self.value.clone(), hbar: self.hbar.clone() }
    }

    pub fn combine(&self, other: &Self) -> Self {
        Self { value: self.value.clone() + other.value.clone(), hbar: self.hbar.clone() }
    }
}

impl<T: Real> CocycleAccumulator<T> {
    /// `exp(-i c / hbar)`.
    pub fn phase(&self) -> Complex<T> {
        Complex::from_polar(T::one(), -self.value / self.hbar)
    }
}

/// Potential integral over one interval: `h/3 (V(a) + V(mid) + V(b))`.
pub fn interval_potential<T: Field>(model: &LagrangianModel<T>, a: &[T], b: &[T], h: &T) -> T {
    if model.potential.is_none() {
        return T::zero();
    }
    let mid: Vec<T> = a.iter().zip(b).map(|(u, w)| T::half() * (u.clone() + w.clone())).collect();
    let s = model.potential_at(a) + model.potential_at(&mid) + model.potential_at(b);
    h.clone() * s / T::from_count(3)
}

/// `c_gamma(X)` for gauge data given nodewise on the path's own grid.
pub fn path_cocycle_along<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, shift: &[Vec<T>]) -> Result<CocycleAccumulator<T>> {
    if path.nodes() < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: path.nodes() });
    }
    check_len(path.nodes(), shift.len())?;
    check_len(model.dim(), path.dim())?;
    for s in shift {
        check_len(model.dim(), s.len())?;
    }
    let with_pot = !model.potential_blind_to(shift);
    let mut acc = T::zero();
    for k in 0..path.nodes() - 1 {
        let h = path.dt(k);
        let v = path.velocity(k);
        let w: Vec<T> = shift[k + 1]
            .iter()
            .zip(&shift[k])
            .map(|(b, a)| (b.clone() - a.clone()) / h.clone())
            .collect();
        acc = acc + h.clone() * kinetic_density(&model.params, &v, &w);
        if with_pot {
            let moved = |j: usize| -> Vec<T> {
                path.x[j].iter().zip(&shift[j]).map(|(a, b)| a.clone() + b.clone()).collect()
            };
            let after = interval_potential(model, &moved(k), &moved(k + 1), &h);
            let before = interval_potential(model, &path.x[k], &path.x[k + 1], &h);
            acc = acc - (after - before);
        }
    }
    Ok(CocycleAccumulator::new(acc, model.hbar()))
}

/// Samples a gauge field at the path times.
pub fn sample_gauge<T: Field>(path: &DiscretePath<T>, g: &GaugeField<T>) -> Vec<Vec<T>> {
    path.t.iter().map(|t| g.eval(t).v).collect()
}

pub fn path_cocycle<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, g: &GaugeField<T>) -> Result<CocycleAccumulator<T>> {
    path_cocycle_along(model, path, &sample_gauge(path, g))
}

/// `Delta((t, x), v) = sum m (<x, v> + |v|^2 t / 2)`.
pub fn boost_delta<T: Field>(model: &LagrangianModel<T>, p: &Config<T>, v: &Shift<T>) -> Result<T> {
    check_len(model.dim(), p.x.len())?;
    check_len(model.dim(), v.len())?;
    Ok(p.x.iter().zip(&v.v).enumerate().fold(T::zero(), |acc, (c, (x, vc))| {
        acc + model.params.coord_mass(c)
            * (x.clone() * vc.clone() + T::half() * vc.clone() * vc.clone() * p.t.clone())
    }))
}

/// `exp(i Delta / hbar)`.
pub fn boost_phase<T: Real>(model: &LagrangianModel<T>, p: &Config<T>, v: &Shift<T>) -> Result<Complex<T>> {
    let d = boost_delta(model, p, v)?;
    Ok(Complex::from_polar(T::one(), d / model.hbar()))
}

/// `a(chi, p) = sum m <v, chi>`.
pub fn linear_cocycle<T: Field>(model: &LagrangianModel<T>, v: &Shift<T>, chi: &Shift<T>) -> Result<T> {
    check_len(model.dim(), v.len())?;
    check_len(model.dim(), chi.len())?;
    Ok(v.v.iter().zip(&chi.v).enumerate().fold(T::zero(), |acc, (c, (a, b))| {
        acc + model.params.coord_mass(c) * a.clone() * b.clone()
    }))
}

/// Discrete `a_gamma(chi)`: the exact first variation of the discrete action
/// along nodal Lie-algebra samples `chi`.
pub fn path_linear_cocycle<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, chi: &[Vec<T>]) -> Result<T> {
    check_len(path.nodes(), chi.len())?;
    let third = T::one() / T::from_count(3);
    let mut acc = T::zero();
    for k in 0..path.nodes() - 1 {
        let h = path.dt(k);
        let v = path.velocity(k);
        let w: Vec<T> = chi[k + 1].iter().zip(&chi[k]).map(|(b, a)| (b.clone() - a.clone()) / h.clone()).collect();
        acc = acc + h.clone() * linear_cocycle(model, &Shift::new(v), &Shift::new(w))?;
        if let Some(pot) = &model.potential {
            let a = &path.x[k];
            let b = &path.x[k + 1];
            let mid: Vec<T> = a.iter().zip(b).map(|(u, w)| T::half() * (u.clone() + w.clone())).collect();
            let cmid: Vec<T> = chi[k].iter().zip(&chi[k + 1]).map(|(u, w)| T::half() * (u.clone() + w.clone())).collect();
            let g = crate::scalar::dot(&pot.gradient(a), &chi[k])
                + crate::scalar::dot(&pot.gradient(&mid), &cmid)
                + crate::scalar::dot(&pot.gradient(b), &chi[k + 1]);
            acc = acc - h * third.clone() * g;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn free(masses: Vec<f64>) -> LagrangianModel<f64> {
        let n = masses.len();
        LagrangianModel::free(ModelParams::with_unit_hbar(n, 1, masses).unwrap())
    }

    #[test]
    fn density_examples() {
        let m = free(vec![2.0]);
        assert_eq!(cocycle_density(&m, &Shift::new(vec![3.0]), &Shift::new(vec![1.0])).unwrap(), 7.0);
        assert_eq!(cocycle_density(&m, &Shift::new(vec![3.0]), &Shift::zero(1)).unwrap(), 0.0);
        let m2 = free(vec![1.0, 2.0]);
        let c = cocycle_density(&m2, &Shift::new(vec![1.0, 0.0]), &Shift::new(vec![2.0, 1.0])).unwrap();
        assert_eq!(c, 5.0);
        assert!(cocycle_density(&m2, &Shift::zero(1), &Shift::zero(2)).is_err());
    }

    #[test]
    fn boost_cocycle_is_delta_difference() {
        let m = free(vec![1.0]);
        let v = Shift::new(vec![1.0]);
        let g = GaugeField::boost(&v, 0.0, 1.0).unwrap();
        let p0 = Config::new(0.0, vec![0.0]).unwrap();
        let p1 = Config::new(1.0, vec![2.0]).unwrap();
        let path = DiscretePath::straight(&p0, &p1, 10).unwrap();
        let c = path_cocycle(&m, &path, &g).unwrap();
        assert!((c.value - 2.5).abs() < 1e-12);
        let delta = boost_delta(&m, &p1, &v).unwrap() - boost_delta(&m, &p0, &v).unwrap();
        assert!((c.value - delta).abs() < 1e-12);

        let zero = path_cocycle(&m, &path, &GaugeField::zero(1)).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.phase(), Complex::new(1.0, 0.0));
        let rigid = path_cocycle(&m, &path, &GaugeField::constant(Shift::new(vec![3.0]))).unwrap();
        assert_eq!(rigid.value, 0.0);
    }

    #[test]
    fn boost_phase_examples() {
        let m = free(vec![1.0]);
        let p = Config::new(3.0, vec![1.0]).unwrap();
        let ph = boost_phase(&m, &p, &Shift::new(vec![2.0])).unwrap();
        assert!((ph - Complex::from_polar(1.0, 8.0)).norm() < 1e-14);
        assert_eq!(boost_phase(&m, &p, &Shift::zero(1)).unwrap(), Complex::new(1.0, 0.0));
        let origin = Config::new(0.0, vec![0.0]).unwrap();
        assert_eq!(boost_phase(&m, &origin, &Shift::new(vec![2.0])).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn linear_cocycle_examples() {
        let m = free(vec![2.0]);
        let v = Shift::new(vec![3.0]);
        assert_eq!(linear_cocycle(&m, &v, &Shift::new(vec![0.5])).unwrap(), 3.0);
        assert_eq!(linear_cocycle(&m, &v, &Shift::zero(1)).unwrap(), 0.0);
        // first-order difference quotient, with Richardson removing the O(eps) term
        let chi = Shift::new(vec![0.5]);
        let q = |eps: f64| cocycle_density(&m, &v, &chi.scale(eps)).unwrap() / eps;
        assert!((q(1e-3) - 3.0).abs() < 1e-3);
        assert!((2.0 * q(1e-3) - q(2e-3) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn residual_special_cases() {
        let m = free(vec![1.5]);
        let p = Config::new(0.2, vec![0.7]).unwrap();
        let v = Shift::new(vec![-1.3]);
        let x = Shift::new(vec![0.9]);
        assert_eq!(cocycle_property_residual(&m, &p, &v, &Shift::zero(1), &x).unwrap(), 0.0);
        assert!(cocycle_property_residual(&m, &p, &v, &x, &x.neg()).unwrap() < 1e-12);
    }

    #[test]
    fn exact_cocycle_identity_over_rationals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let params = ModelParams::new(2, 1, vec![r(3, 2), r(5, 7)], r(1, 1)).unwrap();
        let layout = params.layout();
        let model = LagrangianModel::with_potential(params, PairHarmonic { layout, k: r(2, 3) });
        let p = Config { t: r(1, 2), x: vec![r(1, 3), r(-4, 5)] };
        let v = Shift::new(vec![r(7, 3), r(-1, 9)]);
        let x = Shift::new(vec![r(2, 11), r(5, 3)]);
        let y = Shift::new(vec![r(-3, 4), r(1, 6)]);
        assert_eq!(cocycle_property_residual(&model, &p, &v, &x, &y).unwrap(), r(0, 1));
    }

    #[test]
    fn potential_cocycle_vanishes_only_for_external_shifts() {
        let params = ModelParams::with_unit_hbar(2, 1, vec![1.0f64, 2.0]).unwrap();
        let layout = params.layout();
        let model = LagrangianModel::with_potential(params, PairHarmonic { layout, k: 1.0 });
        let p = Config::new(0.0, vec![0.3, -0.4]).unwrap();
        let ext = point_cocycle(&model, &p, &Shift::zero(2), &Shift::new(vec![1.0, 1.0]), &Shift::zero(2)).unwrap();
        assert_eq!(ext, 0.0);
        let int = point_cocycle(&model, &p, &Shift::zero(2), &Shift::new(vec![1.0, 0.0]), &Shift::zero(2)).unwrap();
        assert!(int.abs() > 0.1);
        let probes = vec![(vec![0.1, 0.9], vec![3.0]), (vec![-2.0, 1.0], vec![-0.5])];
        assert!(translation_invariance_defect(&model, &probes) < 1e-12);
    }

    proptest! {
        #[test]
        fn cocycle_identity(x0 in -5.0f64..5.0, v in -5.0f64..5.0, a in -5.0f64..5.0, b in -5.0f64..5.0, m in 0.1f64..10.0) {
            let model = free(vec![m]);
            let p = Config::new(0.0, vec![x0]).unwrap();
            let (vs, xs, ys) = (Shift::new(vec![v]), Shift::new(vec![a]), Shift::new(vec![b]));
            let res = cocycle_property_residual(&model, &p, &vs, &xs, &ys).unwrap();
            let cx = point_cocycle(&model, &p, &vs, &xs, &xs).unwrap();
            let cy = point_cocycle(&model, &p, &vs, &ys, &ys).unwrap();
            prop_assert!(res < 1e-10 * (1.0 + cx.abs() + cy.abs()));
        }

        #[test]
        fn linear_in_chi(v in prop::collection::vec(-3.0f64..3.0, 2), c1 in prop::collection::vec(-3.0f64..3.0, 2),
                         c2 in prop::collection::vec(-3.0f64..3.0, 2), al in -2.0f64..2.0, be in -2.0f64..2.0) {
            let model = free(vec![1.3, 0.4]);
            let v = Shift::new(v);
            let (c1, c2) = (Shift::new(c1), Shift::new(c2));
            let lhs = linear_cocycle(&model, &v, &c1.scale(al).add(&c2.scale(be))).unwrap();
            let rhs = al * linear_cocycle(&model, &v, &c1).unwrap() + be * linear_cocycle(&model, &v, &c2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn lift_has_unit_modulus(val in -1e3f64..1e3) {
            let c = CocycleAccumulator::new(val, 0.7);
            prop_assert!((c.phase().norm() - 1.0).abs() < 1e-14);
        }
    }
}
