//! Scalar abstractions.
//!
//! The algebraic layers (bundle, cocycles, actions, dressing) only need field
//! arithmetic and run unchanged over exact rationals. Everything involving
//! phases, square roots, Newton solves or FFTs is written against [`Real`],
//! which is implemented by `f32` and `f64`.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};
use rustfft::FftNum;

/// Field arithmetic shared by floats and exact rationals.
pub trait Field:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + ToPrimitive + Send + Sync + 'static
{
    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }

    /// `n` as a field element, built by repeated addition so rationals work too.
    fn from_count(n: usize) -> Self {
        let mut acc = Self::zero();
        let mut base = Self::one();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc + base.clone();
            }
            base = base.clone() + base;
            k >>= 1;
        }
        acc
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Lossy conversion used for tolerance checks and reporting.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Field for T where
    T: Clone
        + Debug
        + PartialEq
        + PartialOrd
        + Num
        + Neg<Output = T>
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Field + Float + FloatConst + FromPrimitive + FftNum + Default {
    /// Converts an `f64` literal; infallible for the implementing types.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Inner product of two equally long slices.
pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}
