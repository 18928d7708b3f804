//! The trivial configuration bundle: points `(t, x)`, structure-group shifts,
//! time-dependent gauge fields and the internal/external split of a shift.
//!
//! Particle indices are 0-based throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// Particle count and spatial dimension; positions are blocked per particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub n_particles: usize,
    pub spatial_dim: usize,
}

impl Layout {
    pub fn new(n_particles: usize, spatial_dim: usize) -> Result<Self> {
        if n_particles == 0 || spatial_dim == 0 {
            return Err(Error::InvalidModel("N and d must be at least 1".into()));
        }
        Ok(Self { n_particles, spatial_dim })
    }

    pub fn dim(&self) -> usize {
        self.n_particles * self.spatial_dim
    }

    pub fn block(&self, k: usize) -> std::ops::Range<usize> {
        k * self.spatial_dim..(k + 1) * self.spatial_dim
    }

    pub fn check(&self, len: usize) -> Result<()> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: len })
        }
    }

    pub fn check_particle(&self, k: usize) -> Result<()> {
        if k < self.n_particles {
            Ok(())
        } else {
            Err(Error::AnchorOutOfRange { index: k, len: self.n_particles })
        }
    }

    /// Block-replicates a `d`-vector over all particles.
    pub fn replicate<T: Field>(&self, a: &[T]) -> Vec<T> {
        debug_assert_eq!(a.len(), self.spatial_dim);
        (0..self.n_particles).flat_map(|_| a.iter().cloned()).collect()
    }
}

/// Masses and reduced Planck constant for an `N`-particle system in `d` dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub n_particles: usize,
    pub spatial_dim: usize,
    pub masses: Vec<T>,
    pub hbar: T,
}

impl<T: Field> ModelParams<T> {
    pub fn new(n_particles: usize, spatial_dim: usize, masses: Vec<T>, hbar: T) -> Result<Self> {
        Layout::new(n_particles, spatial_dim)?;
        if masses.len() != n_particles {
            return Err(Error::InvalidModel(format!(
                "{} masses for {} particles",
                masses.len(),
                n_particles
            )));
        }
        if masses.iter().any(|m| *m <= T::zero()) {
            return Err(Error::InvalidModel("masses must be positive".into()));
        }
        if hbar <= T::zero() {
            return Err(Error::InvalidModel("hbar must be positive".into()));
        }
        Ok(Self { n_particles, spatial_dim, masses, hbar })
    }

    /// Same model with `hbar = 1`.
    pub fn with_unit_hbar(n_particles: usize, spatial_dim: usize, masses: Vec<T>) -> Result<Self> {
        Self::new(n_particles, spatial_dim, masses, T::one())
    }

    pub fn layout(&self) -> Layout {
        Layout { n_particles: self.n_particles, spatial_dim: self.spatial_dim }
    }

    pub fn dim(&self) -> usize {
        self.n_particles * self.spatial_dim
    }

    /// Mass attached to coordinate index `c`.
    pub fn coord_mass(&self, c: usize) -> T {
        self.masses[c / self.spatial_dim].clone()
    }
}

/// A point of the trivialised bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config<T> {
    pub t: T,
    pub x: Vec<T>,
}

impl<T: Field> Config<T> {
    pub fn new(t: T, x: Vec<T>) -> Result<Self> {
        if !t.approx_f64().is_finite() || x.iter().any(|v| !v.approx_f64().is_finite()) {
            return Err(Error::InvalidModel("configuration entries must be finite".into()));
        }
        Ok(Self { t, x })
    }
}

/// An element of the structure group, or equally a Lie-algebra element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shift<T> {
    pub v: Vec<T>,
}

impl<T: Field> Shift<T> {
    pub fn new(v: Vec<T>) -> Self {
        Self { v }
    }

    pub fn zero(len: usize) -> Self {
        Self { v: vec![T::zero(); len] }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { v: self.v.iter().zip(&other.v).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { v: self.v.iter().zip(&other.v).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { v: self.v.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { v: self.v.iter().map(|a| -a.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|a| a.is_zero())
    }

    /// True when every particle block is identical (an element of the diagonal subgroup).
    pub fn is_replicated(&self, layout: &Layout) -> bool {
        let first = &self.v[layout.block(0)];
        (1..layout.n_particles).all(|k| &self.v[layout.block(k)] == first)
    }
}

pub fn right_action<T: Field>(layout: &Layout, p: &Config<T>, x: &Shift<T>) -> Result<Config<T>> {
    layout.check(p.x.len())?;
    layout.check(x.len())?;
    Ok(Config {
        t: p.t.clone(),
        x: p.x.iter().zip(&x.v).map(|(a, b)| a.clone() + b.clone()).collect(),
    })
}

/// Choice of representative for the internal part of a shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    Particle(usize),
    Mean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftDecomposition<T> {
    pub internal: Shift<T>,
    pub external: Shift<T>,
    pub anchor: Anchor,
}

pub fn decompose_shift<T: Field>(layout: &Layout, x: &Shift<T>, anchor: Anchor) -> Result<ShiftDecomposition<T>> {
    layout.check(x.len())?;
    let d = layout.spatial_dim;
    let a: Vec<T> = match anchor {
        Anchor::Particle(i) => {
            layout.check_particle(i)?;
            x.v[layout.block(i)].to_vec()
        }
        Anchor::Mean => {
            let n = T::from_count(layout.n_particles);
            (0..d)
                .map(|ax| {
                    let s = (0..layout.n_particles)
                        .fold(T::zero(), |acc, k| acc + x.v[k * d + ax].clone());
                    s / n.clone()
                })
                .collect()
        }
    };
    let external = Shift::new(layout.replicate(&a));
    let mut internal = x.sub(&external);
    if let Anchor::Particle(i) = anchor {
        // exact zero regardless of rounding in the subtraction
        for c in layout.block(i) {
            internal.v[c] = T::zero();
        }
    }
    Ok(ShiftDecomposition { internal, external, anchor })
}

/// A sampled time-dependent shift with piecewise-linear interpolation.
///
/// Outside the sample range the edge value is held constant. With a support
/// window `(t0, t1)` the field vanishes at and outside both endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeField<T> {
    samples: Vec<(T, Shift<T>)>,
    support: Option<(T, T)>,
}

impl<T: Field> GaugeField<T> {
    pub fn new(samples: Vec<(T, Shift<T>)>) -> Result<Self> {
        Self::validate(&samples)?;
        Ok(Self { samples, support: None })
    }

    /// Field supported in `(t0, t1)`. Samples must lie in `[t0, t1]`; zero
    /// samples at the endpoints are added when missing.
    pub fn with_support(samples: Vec<(T, Shift<T>)>, t0: T, t1: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyGaugeField);
        }
        if t1 <= t0 {
            return Err(Error::InvalidGaugeField("support window must have t0 < t1".into()));
        }
        let len = samples[0].1.len();
        let mut all = Vec::with_capacity(samples.len() + 2);
        if samples[0].0 > t0 {
            all.push((t0.clone(), Shift::zero(len)));
        }
        all.extend(samples);
        if all.last().map(|s| s.0 < t1).unwrap_or(false) {
            all.push((t1.clone(), Shift::zero(len)));
        }
        Self::validate(&all)?;
        for (t, s) in &all {
            if *t < t0 || *t > t1 {
                return Err(Error::InvalidGaugeField("sample outside the support window".into()));
            }
            if (*t == t0 || *t == t1) && !s.is_zero() {
                return Err(Error::InvalidGaugeField("nonzero sample at a support endpoint".into()));
            }
        }
        Ok(Self { samples: all, support: Some((t0, t1)) })
    }

    fn validate(samples: &[(T, Shift<T>)]) -> Result<()> {
        let first = samples.first().ok_or(Error::EmptyGaugeField)?;
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidGaugeField("sample times must be strictly increasing".into()));
            }
        }
        if let Some((_, s)) = samples.iter().find(|(_, s)| s.len() != first.1.len()) {
            return Err(Error::DimensionMismatch { expected: first.1.len(), got: s.len() });
        }
        Ok(())
    }

    pub fn zero(len: usize) -> Self {
        Self { samples: vec![(T::zero(), Shift::zero(len))], support: None }
    }

    pub fn constant(shift: Shift<T>) -> Self {
        Self { samples: vec![(T::zero(), shift)], support: None }
    }

    /// `X(t) = v t` on `[t_lo, t_hi]`, held constant beyond.
    pub fn boost(v: &Shift<T>, t_lo: T, t_hi: T) -> Result<Self> {
        Self::new(vec![(t_lo.clone(), v.scale(t_lo)), (t_hi.clone(), v.scale(t_hi))])
    }

    pub fn samples(&self) -> &[(T, Shift<T>)] {
        &self.samples
    }

    pub fn support(&self) -> Option<&(T, T)> {
        self.support.as_ref()
    }

    pub fn len(&self) -> usize {
        self.samples[0].1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eval(&self, t: &T) -> Shift<T> {
        if let Some((t0, t1)) = &self.support {
            if t <= t0 || t >= t1 {
                return Shift::zero(self.len());
            }
        }
        let s = &self.samples;
        if *t <= s[0].0 {
            return s[0].1.clone();
        }
        let last = s.len() - 1;
        if *t >= s[last].0 {
            return s[last].1.clone();
        }
        // first sample strictly after t
        let k = s.partition_point(|(tk, _)| tk <= t);
        let (ta, xa) = &s[k - 1];
        let (tb, xb) = &s[k];
        if t == ta {
            return xa.clone();
        }
        let w = (t.clone() - ta.clone()) / (tb.clone() - ta.clone());
        Shift::new(
            xa.v.iter()
                .zip(&xb.v)
                .map(|(a, b)| a.clone() + w.clone() * (b.clone() - a.clone()))
                .collect(),
        )
    }

    /// Pointwise sum, sampled on the union of both sample grids.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        let mut times: Vec<T> = self.knots().into_iter().chain(other.knots()).collect();
        times.sort_by(|a, b| a.partial_cmp(b).expect("ordered times"));
        times.dedup();
        let samples = times
            .into_iter()
            .map(|t| {
                let v = self.eval(&t).add(&other.eval(&t));
                (t, v)
            })
            .collect();
        Self::new(samples)
    }

    /// Breakpoints of the piecewise-linear field, including support endpoints.
    fn knots(&self) -> Vec<T> {
        let mut k: Vec<T> = self.samples.iter().map(|(t, _)| t.clone()).collect();
        if let Some((t0, t1)) = &self.support {
            k.push(t0.clone());
            k.push(t1.clone());
        }
        k
    }

    pub fn neg(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|(t, s)| (t.clone(), s.neg())).collect(),
            support: self.support.clone(),
        }
    }

    /// True when every sample lies in the diagonal subgroup.
    pub fn is_external(&self, layout: &Layout) -> bool {
        self.samples.iter().all(|(_, s)| s.is_replicated(layout))
    }
}

pub fn gauge_apply<T: Field>(layout: &Layout, p: &Config<T>, g: &GaugeField<T>) -> Result<Config<T>> {
    right_action(layout, p, &g.eval(&p.t))
}
