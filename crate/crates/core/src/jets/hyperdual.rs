use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Scalar;

/// Nested dual number with a runtime number of independent nilpotent units
/// `ε_0, …, ε_{d-1}` (each `ε_j² = 0`, distinct units commute).
///
/// Coefficients are indexed by bitmask: `data[m]` multiplies `Π_{j ∈ m} ε_j`.
/// This is `Dual<Dual<…<f64>>>` with the nesting depth chosen at run time,
/// which the recursive connection components need because their depth grows
/// with the jet order.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDual {
    data: Vec<f64>,
}

impl HyperDual {
    pub fn real(v: f64) -> Self {
        Self { data: vec![v] }
    }

    /// Number of nilpotent units carried.
    pub fn depth(&self) -> usize {
        self.data.len().trailing_zeros() as usize
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.data
    }

    /// `self + ε_unit · direction`, where `unit` must not already be used by
    /// either operand.
    pub fn perturb(&self, unit: usize, direction: &HyperDual) -> HyperDual {
        let half = 1usize << unit;
        let mut data = vec![0.0; half * 2];
        let lo = self.promoted(unit);
        let hi = direction.promoted(unit);
        data[..half].copy_from_slice(&lo);
        data[half..].copy_from_slice(&hi);
        HyperDual { data }
    }

    /// Splits along unit `unit` (the outermost unit of a value of depth
    /// `unit + 1`): returns `(part without ε_unit, coefficient of ε_unit)`.
    pub fn split(&self, unit: usize) -> (HyperDual, HyperDual) {
        let half = 1usize << unit;
        if self.data.len() <= half {
            (self.clone(), HyperDual::real(0.0))
        } else {
            debug_assert_eq!(self.data.len(), half * 2);
            (
                HyperDual {
                    data: self.data[..half].to_vec(),
                },
                HyperDual {
                    data: self.data[half..].to_vec(),
                },
            )
        }
    }

    /// Coefficient (itself a hyper-dual of depth `base`) of the monomial in the
    /// units `base..` selected by `mask` (bit 0 of `mask` is unit `base`).
    pub fn component(&self, base: usize, mask: usize) -> HyperDual {
        let block = 1usize << base;
        let start = mask << base;
        if start >= self.data.len() {
            return HyperDual::real(0.0);
        }
        HyperDual {
            data: self.data[start..start + block.min(self.data.len() - start)].to_vec(),
        }
    }

    fn promoted(&self, depth: usize) -> Vec<f64> {
        let n = 1usize << depth;
        let mut v = self.data.clone();
        v.resize(n.max(v.len()), 0.0);
        v
    }

    fn aligned(a: &HyperDual, b: &HyperDual) -> (Vec<f64>, Vec<f64>) {
        let d = a.depth().max(b.depth());
        (a.promoted(d), b.promoted(d))
    }
}

fn mul_slices(a: &[f64], b: &[f64], out: &mut [f64]) {
    let n = a.len();
    for s in 0..n {
        let mut acc = 0.0;
        let mut t = s;
        loop {
            acc += a[t] * b[s ^ t];
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        out[s] = acc;
    }
}

/// Applies a scalar function given its value and derivative maps, one unit at a
/// time: `f(p + εq) = f(p) + ε q f'(p)`.
fn lift_unary(a: &[f64], f: &dyn Fn(f64) -> f64, df: &dyn Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    if a.len() == 1 {
        return vec![f(a[0])];
    }
    let half = a.len() / 2;
    let (p, q) = a.split_at(half);
    let fp = lift_unary(p, f, df);
    let dfp = df(p);
    let mut qd = vec![0.0; half];
    mul_slices(q, &dfp, &mut qd);
    let mut out = fp;
    out.extend_from_slice(&qd);
    out
}

fn exp_slice(a: &[f64]) -> Vec<f64> {
    lift_unary(a, &f64::exp, &exp_slice)
}

fn recip_slice(a: &[f64]) -> Vec<f64> {
    lift_unary(a, &|v| 1.0 / v, &|p| {
        let r = recip_slice(p);
        let mut r2 = vec![0.0; r.len()];
        mul_slices(&r, &r, &mut r2);
        r2.iter().map(|v| -v).collect()
    })
}

fn sqrt_slice(a: &[f64]) -> Vec<f64> {
    lift_unary(a, &f64::sqrt, &|p| {
        let s = sqrt_slice(p);
        recip_slice(&s).iter().map(|v| 0.5 * v).collect()
    })
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (mut a, b) = HyperDual::aligned(&self, &o);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
        HyperDual { data: a }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (mut a, b) = HyperDual::aligned(&self, &o);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x -= y);
        HyperDual { data: a }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.data.len() == 1 {
            return o.scale(self.data[0]);
        }
        if o.data.len() == 1 {
            return self.scale(o.data[0]);
        }
        let (a, b) = HyperDual::aligned(&self, &o);
        let mut out = vec![0.0; a.len()];
        mul_slices(&a, &b, &mut out);
        HyperDual { data: out }
    }
}

impl Div for HyperDual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if o.data.len() == 1 {
            return self.scale(1.0 / o.data[0]);
        }
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual {
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}

impl Scalar for HyperDual {
    fn constant(v: f64) -> Self {
        HyperDual::real(v)
    }
    fn value(&self) -> f64 {
        self.data[0]
    }
    fn scale(&self, c: f64) -> Self {
        HyperDual {
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
    fn exp(&self) -> Self {
        HyperDual {
            data: exp_slice(&self.data),
        }
    }
    fn sqrt(&self) -> Self {
        HyperDual {
            data: sqrt_slice(&self.data),
        }
    }
    fn recip(&self) -> Self {
        HyperDual {
            data: recip_slice(&self.data),
        }
    }
}
