use std::collections::HashMap;

use rand::Rng;

use super::{SmoothMap, SymTensor};
use crate::error::{check_dim, Error, Result};
use crate::jets::{Dual, Scalar, Series};

/// Highest derivative order served by the non-polynomial closed forms.
pub const CLOSED_FORM_MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

/// Real polynomial in `dim` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            check_dim(dim, t.exps.len())?;
        }
        Ok(Self { dim, terms }.simplified())
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: vec![] }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            dim,
            terms: vec![Monomial {
                coeff: c,
                exps: vec![0; dim],
            }],
        }
        .simplified()
    }

    /// The coordinate function `x_var`.
    pub fn variable(dim: usize, var: usize) -> Self {
        let mut exps = vec![0; dim];
        exps[var] = 1;
        Self {
            dim,
            terms: vec![Monomial { coeff: 1.0, exps }],
        }
    }

    /// Shorthand: `terms` are `(coefficient, exponents)` pairs.
    pub fn from_terms(dim: usize, terms: &[(f64, &[u32])]) -> Result<Self> {
        Self::new(
            dim,
            terms
                .iter()
                .map(|(c, e)| Monomial {
                    coeff: *c,
                    exps: e.to_vec(),
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn simplified(self) -> Self {
        let mut acc: Vec<Monomial> = Vec::new();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        for t in self.terms {
            match index.get(&t.exps) {
                Some(&i) => acc[i].coeff += t.coeff,
                None => {
                    index.insert(t.exps.clone(), acc.len());
                    acc.push(t);
                }
            }
        }
        acc.retain(|t| t.coeff != 0.0);
        acc.sort_by(|a, b| a.exps.cmp(&b.exps));
        Self {
            dim: self.dim,
            terms: acc,
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |acc, t| {
            let m = t
                .exps
                .iter()
                .zip(x)
                .filter(|(e, _)| **e > 0)
                .fold(S::one(), |p, (e, v)| p * v.powi(*e));
            acc + m.scale(t.coeff)
        })
    }

    /// Partial derivative with respect to the multi-index `orders`.
    pub fn partial(&self, orders: &[u32]) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let mut coeff = t.coeff;
                let mut exps = t.exps.clone();
                for (e, &b) in exps.iter_mut().zip(orders) {
                    if *e < b {
                        return None;
                    }
                    for j in 0..b {
                        coeff *= f64::from(*e - j);
                    }
                    *e -= b;
                }
                Some(Monomial { coeff, exps })
            })
            .collect();
        Polynomial {
            dim: self.dim,
            terms,
        }
        .simplified()
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut orders = vec![0; self.dim];
        orders[var] = 1;
        self.partial(&orders)
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Polynomial {
            dim: self.dim,
            terms,
        }
        .simplified()
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Polynomial {
            dim: self.dim,
            terms,
        }
        .simplified()
    }

    /// Symbolic substitution `self(inner_0(x), …, inner_{n-1}(x))`.
    pub fn compose(&self, inner: &[Polynomial]) -> Result<Polynomial> {
        check_dim(self.dim, inner.len())?;
        let dim = inner.first().map_or(0, |p| p.dim);
        let mut out = Polynomial::zero(dim);
        for t in &self.terms {
            let mut m = Polynomial::constant(dim, t.coeff);
            for (e, p) in t.exps.iter().zip(inner) {
                for _ in 0..*e {
                    m = m.mul(p);
                }
            }
            out = out.add(&m);
        }
        Ok(out)
    }
}

/// Polynomial map `ℝⁿ → ℝᵐ` with exact derivative tensors of every order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    dim_in: usize,
    comps: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(dim_in: usize, comps: Vec<Polynomial>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial map without outputs".into(),
            ));
        }
        for p in &comps {
            check_dim(dim_in, p.dim())?;
        }
        Ok(Self { dim_in, comps })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            comps: (0..dim).map(|i| Polynomial::variable(dim, i)).collect(),
        }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn degree(&self) -> u32 {
        self.comps.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        let comps = self
            .comps
            .iter()
            .map(|p| p.compose(&inner.comps))
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(inner.dim_in, comps)
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.comps.iter().map(|p| p.eval(x)).collect()
    }

    /// Random map of total degree ≤ `degree` with coefficients uniform in
    /// `[-1, 1]` and `terms` monomials per component.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        dim_in: usize,
        dim_out: usize,
        degree: u32,
        terms: usize,
    ) -> PolyMap {
        let comps = (0..dim_out)
            .map(|_| {
                let ts = (0..terms)
                    .map(|_| {
                        let total = rng.gen_range(0..=degree);
                        let mut exps = vec![0u32; dim_in];
                        for _ in 0..total {
                            exps[rng.gen_range(0..dim_in)] += 1;
                        }
                        Monomial {
                            coeff: rng.gen_range(-1.0..=1.0),
                            exps,
                        }
                    })
                    .collect();
                Polynomial {
                    dim: dim_in,
                    terms: ts,
                }
                .simplified()
            })
            .collect();
        PolyMap { dim_in, comps }
    }
}

impl SmoothMap for PolyMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.comps.len()
    }
    fn max_order(&self) -> usize {
        usize::MAX
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn value_dual(&self, x: &[Dual<f64>]) -> Vec<Dual<f64>> {
        self.eval(x)
    }
    fn tensor(&self, order: usize, x: &[f64]) -> Result<SymTensor> {
        check_dim(self.dim_in, x.len())?;
        let mut cache: HashMap<(usize, Vec<u32>), f64> = HashMap::new();
        Ok(SymTensor::from_fn(
            order,
            self.dim_in,
            self.comps.len(),
            |out, idx| {
                let mut orders = vec![0u32; self.dim_in];
                for &i in idx {
                    orders[i] += 1;
                }
                *cache
                    .entry((out, orders.clone()))
                    .or_insert_with(|| self.comps[out].partial(&orders).eval(x))
            },
        ))
    }
}

/// Sphere chart change `x ↦ x/|x|²` in dimension 1 or 2.
///
/// Derivatives are closed forms: in 1-D `dⁿ(1/x) = (−1)ⁿ n!/xⁿ⁺¹`; in 2-D the
/// map is `z ↦ 1/z̄`, so `dⁿι(z)[v_1..v_n] = (−1)ⁿ n! Π v̄_j / z̄ⁿ⁺¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    dim: usize,
}

impl Inversion {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 1 || dim == 2 {
            Ok(Self { dim })
        } else {
            Err(Error::InvalidArgument(format!(
                "inversion supports dimension 1 or 2, got {dim}"
            )))
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let r2 = crate::jets::dot(x, x);
        let inv = r2.recip();
        x.iter().map(|v| v.clone() * inv.clone()).collect()
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cinv(a: (f64, f64)) -> (f64, f64) {
    let d = a.0 * a.0 + a.1 * a.1;
    (a.0 / d, -a.1 / d)
}

impl SmoothMap for Inversion {
    fn dim_in(&self) -> usize {
        self.dim
    }
    fn dim_out(&self) -> usize {
        self.dim
    }
    fn max_order(&self) -> usize {
        CLOSED_FORM_MAX_ORDER
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        self.eval(x)
    }
    fn value_dual(&self, x: &[Dual<f64>]) -> Vec<Dual<f64>> {
        self.eval(x)
    }
    fn tensor(&self, order: usize, x: &[f64]) -> Result<SymTensor> {
        check_dim(self.dim, x.len())?;
        if order > CLOSED_FORM_MAX_ORDER {
            return Err(Error::OrderUnavailable {
                requested: order,
                available: CLOSED_FORM_MAX_ORDER,
            });
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::Domain("inversion is singular at the origin".into()));
        }
        let fact: f64 = (1..=order).map(|i| i as f64).product();
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        if self.dim == 1 {
            let v = sign * fact / x[0].powi(order as i32 + 1);
            return Ok(SymTensor::from_fn(order, 1, 1, |_, _| v));
        }
        let zbar = (x[0], -x[1]);
        let mut pow = zbar;
        for _ in 0..order {
            pow = cmul(pow, zbar);
        }
        let base = cinv(pow);
        Ok(SymTensor::from_fn(order, 2, 2, |out, idx| {
            // conj(e_0) = 1, conj(e_1) = -i
            let mut c = (sign * fact, 0.0);
            for &i in idx {
                if i == 1 {
                    c = cmul(c, (0.0, -1.0));
                }
            }
            let v = cmul(c, base);
            if out == 0 {
                v.0
            } else {
                v.1
            }
        }))
    }
}

/// Inverse of the monotone cubic `x ↦ x³ + x` on the real line.
///
/// Values come from Newton's method; derivative tensors from the same Newton
/// iteration run in truncated-series arithmetic on `w + t`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CubicInverse;

impl CubicInverse {
    fn real_root(w: f64) -> f64 {
        let mut h = if w.abs() > 1.0 { w.cbrt() } else { w };
        for _ in 0..100 {
            let step = (h * h * h + h - w) / (3.0 * h * h + 1.0);
            h -= step;
            if step.abs() <= 1e-17 * h.abs().max(1.0) {
                break;
            }
        }
        h
    }

    /// Generic evaluation: Newton iterations started from the exact real root
    /// refine every nilpotent or series part.
    pub fn eval<S: Scalar>(&self, w: &S) -> S {
        let mut h = S::constant(Self::real_root(w.value()));
        for _ in 0..8 {
            let f = h.clone() * h.clone() * h.clone() + h.clone() - w.clone();
            let df = (h.clone() * h.clone()).scale(3.0) + S::one();
            h = h - f / df;
        }
        h
    }
}

impl SmoothMap for CubicInverse {
    fn dim_in(&self) -> usize {
        1
    }
    fn dim_out(&self) -> usize {
        1
    }
    fn max_order(&self) -> usize {
        CLOSED_FORM_MAX_ORDER
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        vec![self.eval(&x[0])]
    }
    fn value_dual(&self, x: &[Dual<f64>]) -> Vec<Dual<f64>> {
        vec![self.eval(&x[0])]
    }
    fn tensor(&self, order: usize, x: &[f64]) -> Result<SymTensor> {
        check_dim(1, x.len())?;
        if order > CLOSED_FORM_MAX_ORDER {
            return Err(Error::OrderUnavailable {
                requested: order,
                available: CLOSED_FORM_MAX_ORDER,
            });
        }
        let s = self.eval(&Series::linear(x[0], 1.0, order));
        let fact: f64 = (1..=order).map(|i| i as f64).product();
        let v = s.coeff(order) * fact;
        Ok(SymTensor::from_fn(order, 1, 1, |_, _| v))
    }
}
