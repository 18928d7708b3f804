use serde::{Deserialize, Serialize};

use crate::bundle::{Config, Layout};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Which chart a path lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Bare,
    Relational { anchor: usize },
}

/// A sampled history `tau -> (t(tau), x(tau))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath<T> {
    pub tau: Vec<T>,
    pub t: Vec<T>,
    pub x: Vec<Vec<T>>,
    pub deparametrized: bool,
    pub frame: Frame,
}

impl<T: Field> DiscretePath<T> {
    /// Path with `t = tau`.
    pub fn new(t: Vec<T>, x: Vec<Vec<T>>) -> Result<Self> {
        Self::validate(&t, &x)?;
        Ok(Self { tau: t.clone(), t, x, deparametrized: true, frame: Frame::Bare })
    }

    pub fn parametrized(tau: Vec<T>, t: Vec<T>, x: Vec<Vec<T>>) -> Result<Self> {
        Self::validate(&t, &x)?;
        if tau.len() != t.len() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: tau.len() });
        }
        if tau.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid("parameter grid must be strictly increasing".into()));
        }
        let deparametrized = tau == t;
        Ok(Self { tau, t, x, deparametrized, frame: Frame::Bare })
    }

    fn validate(t: &[T], x: &[Vec<T>]) -> Result<()> {
        if t.len() < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: t.len() });
        }
        if x.len() != t.len() {
            return Err(Error::DimensionMismatch { expected: t.len(), got: x.len() });
        }
        if let Some(bad) = x.iter().find(|xi| xi.len() != x[0].len()) {
            return Err(Error::DimensionMismatch { expected: x[0].len(), got: bad.len() });
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateGrid("times must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Straight line between two configurations on `m` uniform intervals.
    pub fn straight(p0: &Config<T>, p1: &Config<T>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::TooFewNodes { needed: 2, got: 1 });
        }
        if p0.x.len() != p1.x.len() {
            return Err(Error::DimensionMismatch { expected: p0.x.len(), got: p1.x.len() });
        }
        let mm = T::from_count(m);
        let (t, x) = (0..=m)
            .map(|k| {
                let w = T::from_count(k) / mm.clone();
                let t = p0.t.clone() + w.clone() * (p1.t.clone() - p0.t.clone());
                let x = p0
                    .x
                    .iter()
                    .zip(&p1.x)
                    .map(|(a, b)| a.clone() + w.clone() * (b.clone() - a.clone()))
                    .collect();
                (t, x)
            })
            .unzip();
        Self::new(t, x)
    }

    pub fn from_fn(t: Vec<T>, f: impl Fn(&T) -> Vec<T>) -> Result<Self> {
        let x = t.iter().map(&f).collect();
        Self::new(t, x)
    }

    pub fn nodes(&self) -> usize {
        self.t.len()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn check_layout(&self, layout: &Layout) -> Result<()> {
        layout.check(self.dim())
    }

    pub fn config(&self, k: usize) -> Config<T> {
        Config { t: self.t[k].clone(), x: self.x[k].clone() }
    }

    pub fn dt(&self, k: usize) -> T {
        self.t[k + 1].clone() - self.t[k].clone()
    }

    /// Per-interval velocity `dx/dt`.
    pub fn velocity(&self, k: usize) -> Vec<T> {
        let h = self.dt(k);
        self.x[k + 1]
            .iter()
            .zip(&self.x[k])
            .map(|(b, a)| (b.clone() - a.clone()) / h.clone())
            .collect()
    }

    pub fn start(&self) -> Config<T> {
        self.config(0)
    }

    pub fn end(&self) -> Config<T> {
        self.config(self.nodes() - 1)
    }

    /// Same positions with every node translated by `shift[k]`.
    pub fn shifted(&self, shift: &[Vec<T>]) -> Self {
        let x = self
            .x
            .iter()
            .zip(shift)
            .map(|(xk, sk)| xk.iter().zip(sk).map(|(a, b)| a.clone() + b.clone()).collect())
            .collect();
        Self { x, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_path_nodes() {
        let p0 = Config::new(0.0, vec![0.0]).unwrap();
        let p1 = Config::new(1.0, vec![2.0]).unwrap();
        let p = DiscretePath::straight(&p0, &p1, 4).unwrap();
        assert_eq!(p.nodes(), 5);
        assert_eq!(p.x[2], vec![1.0]);
        assert_eq!(p.velocity(3), vec![2.0]);
        assert!(p.deparametrized);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(DiscretePath::new(vec![0.0], vec![vec![0.0]]).is_err());
        assert!(DiscretePath::new(vec![0.0, 0.0], vec![vec![0.0], vec![1.0]]).is_err());
        assert!(DiscretePath::new(vec![0.0, 1.0], vec![vec![0.0], vec![1.0, 2.0]]).is_err());
        assert!(DiscretePath::parametrized(vec![0.0, 0.0], vec![0.0, 1.0], vec![vec![0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn parametrized_flag() {
        let p = DiscretePath::parametrized(vec![0.0, 0.5], vec![0.0, 1.0], vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(!p.deparametrized);
    }
}
