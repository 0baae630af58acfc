use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

/// First-order dual number `re + eps·ε` with `ε² = 0`, generic over its
/// coefficient type.
///
/// `Dual<f64>` drives forward-mode directional derivatives; `Dual<Series>` is
/// the two-variable series truncated at degree one in the second variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    pub fn variable(re: T) -> Self {
        Self { re, eps: T::one() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let eps = self.re.clone() * o.eps + self.eps * o.re.clone();
        Dual::new(self.re * o.re, eps)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let re = self.re.clone() * inv.clone();
        let eps = (self.eps - re.clone() * o.eps) * inv;
        Dual::new(re, eps)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn constant(v: f64) -> Self {
        Dual::new(T::constant(v), T::zero())
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn scale(&self, c: f64) -> Self {
        Dual::new(self.re.scale(c), self.eps.scale(c))
    }
    fn exp(&self) -> Self {
        let e = self.re.exp();
        Dual::new(e.clone(), self.eps.clone() * e)
    }
    fn sqrt(&self) -> Self {
        let s = self.re.sqrt();
        let eps = self.eps.clone() / s.scale(2.0);
        Dual::new(s, eps)
    }
    fn recip(&self) -> Self {
        let r = self.re.recip();
        let eps = -(self.eps.clone() * r.clone() * r.clone());
        Dual::new(r, eps)
    }
}
