use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number-like values that fixture evaluators are written against.
///
/// Implemented by `f64`, [`Dual`](super::Dual), [`Series`](super::Series) and
/// [`HyperDual`](super::HyperDual), so a single closed-form evaluator can be run
/// plainly, differentiated once, expanded as a truncated Taylor series, or
/// differentiated along several nested directions.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64) -> Self;

    /// The plain real part.
    fn value(&self) -> f64;

    fn scale(&self, c: f64) -> Self;

    fn exp(&self) -> Self;

    fn sqrt(&self) -> Self;

    fn recip(&self) -> Self {
        Self::constant(1.0) / self.clone()
    }

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

/// Inner product of two coordinate vectors.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (u, v)| acc + u.clone() * v.clone())
}

pub fn lift_vec<S: Scalar>(v: &[f64]) -> Vec<S> {
    v.iter().map(|&c| S::constant(c)).collect()
}

pub fn values<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::value).collect()
}

pub fn axpy<S: Scalar>(a: &[S], c: f64, b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.clone() + v.scale(c))
        .collect()
}
