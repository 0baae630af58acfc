use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{Dual, Scalar};
use crate::atlas::SmoothMap;
use crate::error::{check_dim, Error, Result};

/// Univariate truncated power series `Σ_{i ≤ order} c_i tⁱ`.
///
/// Constants built through [`Scalar::constant`] carry no truncation order and
/// adopt the order of whatever they are combined with.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
    order: usize,
}

const EXACT: usize = usize::MAX;

impl Series {
    pub fn new(mut coeffs: Vec<f64>, order: usize) -> Self {
        coeffs.resize(order + 1, 0.0);
        Self { coeffs, order }
    }

    /// The series of `c0 + t·c1` truncated at `order`.
    pub fn linear(c0: f64, c1: f64, order: usize) -> Self {
        Self::new(vec![c0, c1], order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn coeffs(&self) -> Vec<f64> {
        if self.order == EXACT {
            self.coeffs.clone()
        } else {
            (0..=self.order).map(|i| self.coeff(i)).collect()
        }
    }

    /// `d/dt`, lowering the truncation order by one.
    pub fn derivative(&self) -> Series {
        if self.order == EXACT {
            return Series::constant(0.0);
        }
        if self.order == 0 {
            return Series::new(vec![0.0], 0);
        }
        let c = (1..=self.order).map(|i| i as f64 * self.coeff(i)).collect();
        Series::new(c, self.order - 1)
    }

    fn combined_order(&self, o: &Series) -> usize {
        self.order.min(o.order)
    }

    fn result_len(order: usize, natural: usize) -> usize {
        if order == EXACT {
            natural
        } else {
            order + 1
        }
    }
}

impl Add for Series {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let order = self.combined_order(&o);
        let n = Series::result_len(order, self.coeffs.len().max(o.coeffs.len()));
        let coeffs = (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect();
        Series { coeffs, order }
    }
}

impl Sub for Series {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for Series {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let order = self.combined_order(&o);
        let natural = self.coeffs.len() + o.coeffs.len() - 1;
        let n = Series::result_len(order, natural);
        let mut coeffs = vec![0.0; n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                coeffs[i + j] += a * b;
            }
        }
        Series { coeffs, order }
    }
}

impl Div for Series {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Series {
    type Output = Self;
    fn neg(self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|v| -v).collect(),
            order: self.order,
        }
    }
}

impl Scalar for Series {
    fn constant(v: f64) -> Self {
        Series {
            coeffs: vec![v],
            order: EXACT,
        }
    }
    fn value(&self) -> f64 {
        self.coeff(0)
    }
    fn scale(&self, c: f64) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
            order: self.order,
        }
    }
    fn exp(&self) -> Self {
        let n = Series::result_len(self.order, 1);
        let mut e = vec![0.0; n];
        e[0] = self.coeff(0).exp();
        for m in 1..n {
            let s: f64 = (1..=m).map(|j| j as f64 * self.coeff(j) * e[m - j]).sum();
            e[m] = s / m as f64;
        }
        Series {
            coeffs: e,
            order: self.order,
        }
    }
    fn sqrt(&self) -> Self {
        let n = Series::result_len(self.order, 1);
        let mut s = vec![0.0; n];
        s[0] = self.coeff(0).sqrt();
        for m in 1..n {
            let cross: f64 = (1..m).map(|j| s[j] * s[m - j]).sum();
            s[m] = (self.coeff(m) - cross) / (2.0 * s[0]);
        }
        Series {
            coeffs: s,
            order: self.order,
        }
    }
    fn recip(&self) -> Self {
        let n = Series::result_len(self.order, 1);
        let mut r = vec![0.0; n];
        r[0] = 1.0 / self.coeff(0);
        for m in 1..n {
            let s: f64 = (1..=m).map(|j| self.coeff(j) * r[m - j]).sum();
            r[m] = -s * r[0];
        }
        Series {
            coeffs: r,
            order: self.order,
        }
    }
}

/// Vector-valued truncated series `c_0 + c_1 t + … + c_K t^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries1 {
    coeffs: Vec<Vec<f64>>,
}

impl TruncSeries1 {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(
                "a truncated series needs order at least 1".into(),
            ));
        }
        let dim = coeffs[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("zero-dimensional series".into()));
        }
        for c in &coeffs {
            check_dim(dim, c.len())?;
        }
        Ok(Self { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    pub fn components(&self) -> Vec<Series> {
        (0..self.dim())
            .map(|m| Series::new(self.coeffs.iter().map(|c| c[m]).collect(), self.order()))
            .collect()
    }

    pub fn from_components(comps: &[Series], order: usize) -> Result<Self> {
        let coeffs = (0..=order)
            .map(|i| comps.iter().map(|s| s.coeff(i)).collect())
            .collect();
        Self::new(coeffs)
    }
}

/// Vector-valued series in `(t, s)` keeping `t`-degree ≤ K and `s`-degree ≤ 1:
/// `coeffs[i][j]` multiplies `tⁱ sʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries2 {
    coeffs: Vec<[Vec<f64>; 2]>,
}

impl TruncSeries2 {
    pub fn new(coeffs: Vec<[Vec<f64>; 2]>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty series".into()));
        }
        let dim = coeffs[0][0].len();
        for c in &coeffs {
            check_dim(dim, c[0].len())?;
            check_dim(dim, c[1].len())?;
        }
        Ok(Self { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0][0].len()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient vector of `tⁱ sʲ`.
    pub fn coeff(&self, i: usize, j: usize) -> &[f64] {
        &self.coeffs[i][j]
    }

    pub fn components(&self) -> Vec<Dual<Series>> {
        let k = self.order();
        (0..self.dim())
            .map(|m| {
                Dual::new(
                    Series::new(self.coeffs.iter().map(|c| c[0][m]).collect(), k),
                    Series::new(self.coeffs.iter().map(|c| c[1][m]).collect(), k),
                )
            })
            .collect()
    }

    pub fn from_components(comps: &[Dual<Series>], order: usize) -> Result<Self> {
        let coeffs = (0..=order)
            .map(|i| {
                [
                    comps.iter().map(|d| d.re.coeff(i)).collect(),
                    comps.iter().map(|d| d.eps.coeff(i)).collect(),
                ]
            })
            .collect();
        Self::new(coeffs)
    }
}

/// Evaluates `Σ_{i=1}^{K} (1/i!) dⁱf(c)[δ, …, δ]` with `δ = s(t) − c` in the
/// scalar type `S`, where `c` is the constant part of `s`.
fn taylor_polynomial<S: Scalar>(
    f: &dyn SmoothMap,
    base: &[f64],
    delta: &[S],
    max_tensor: usize,
) -> Result<Vec<S>> {
    let mut out: Vec<S> = f.value(base).into_iter().map(S::constant).collect();
    let mut fact = 1.0;
    for i in 1..=max_tensor {
        fact *= i as f64;
        let t = f.tensor(i, base)?;
        let args: Vec<&[S]> = (0..i).map(|_| delta).collect();
        let term = t.apply(&args)?;
        for (o, v) in out.iter_mut().zip(term) {
            *o = o.clone() + v.scale(1.0 / fact);
        }
    }
    Ok(out)
}

/// Truncated series of `t ↦ f(s(t))`, obtained by substituting the polynomial
/// `s` into the order-K Taylor polynomial of `f` at `s(0)`.
pub fn series_compose_oracle(f: &dyn SmoothMap, s: &TruncSeries1) -> Result<TruncSeries1> {
    check_dim(f.dim_in(), s.dim())?;
    let k = s.order();
    if f.max_order() < k {
        return Err(Error::OrderUnavailable {
            requested: k,
            available: f.max_order(),
        });
    }
    let base = &s.coeffs()[0];
    let delta: Vec<Series> = s
        .components()
        .into_iter()
        .zip(base)
        .map(|(c, b)| c - Series::constant(*b))
        .collect();
    let out = taylor_polynomial(f, base, &delta, k)?;
    TruncSeries1::from_components(&out, k)
}

/// Two-variable analogue of [`series_compose_oracle`]. Because `s² = 0` and the
/// pure-`s` part of the increment has no `t`, tensors up to order `K + 1`
/// contribute.
pub fn series2_compose(f: &dyn SmoothMap, s: &TruncSeries2) -> Result<TruncSeries2> {
    check_dim(f.dim_in(), s.dim())?;
    let k = s.order();
    if f.max_order() < k + 1 {
        return Err(Error::OrderUnavailable {
            requested: k + 1,
            available: f.max_order(),
        });
    }
    let base = s.coeff(0, 0).to_vec();
    let delta: Vec<Dual<Series>> = s
        .components()
        .into_iter()
        .zip(&base)
        .map(|(c, b)| c - Dual::constant(*b))
        .collect();
    let out = taylor_polynomial(f, &base, &delta, k + 1)?;
    TruncSeries2::from_components(&out, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_truncates() {
        let a = Series::linear(1.0, 1.0, 2);
        let p = a.clone() * a.clone() * a;
        assert_eq!(p.coeffs(), vec![1.0, 3.0, 3.0]);
    }

    #[test]
    fn constants_adopt_order() {
        let a = Series::linear(0.0, 1.0, 3);
        let b = Series::constant(2.0) + a;
        assert_eq!(b.order(), 3);
        assert_eq!(b.coeffs(), vec![2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn reciprocal_is_geometric_series() {
        let one_minus_t = Series::linear(1.0, -1.0, 4);
        assert_eq!(one_minus_t.recip().coeffs(), vec![1.0; 5]);
    }

    #[test]
    fn exp_and_sqrt() {
        let t = Series::linear(0.0, 1.0, 4);
        let e = t.exp();
        let expected = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in e.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let sq = (Series::constant(1.0) + t.clone()).sqrt();
        let back = sq.clone() * sq;
        for (i, c) in back.coeffs().iter().enumerate() {
            let want = if i < 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_lowers_order() {
        let s = Series::new(vec![1.0, 2.0, 3.0, 4.0], 3);
        assert_eq!(s.derivative().coeffs(), vec![2.0, 6.0, 12.0]);
    }
}
