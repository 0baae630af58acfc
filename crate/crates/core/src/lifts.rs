//! Prolongations along `Φ^k`: the lifted metric `G^k`, and Lagrangians with
//! their fibre derivative, energy, Euler–Lagrange vector field and lift `L^k`.

use crate::atlas::{ChartId, Metric};
use crate::connection::{ConnectionComponents, LinearConnection};
use crate::error::{check_dim, Error, Result};
use crate::jets::{dual_directional, CurveJet, HyperDual, Scalar};
use crate::linalg::Mat;
use crate::linearize::trivialize;

/// Relative pivot threshold below which the fibre Hessian counts as singular.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A smooth function on `TM` in local form `L_α(x, y)`.
pub trait Lagrangian: Send + Sync {
    fn dim(&self) -> usize;
    fn value<S: Scalar>(&self, chart: ChartId, x: &[S], y: &[S]) -> Result<S>;
}

/// `L(x, y) = ½ g_x(y, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLagrangian<M> {
    pub metric: M,
}

impl<M: Metric> Lagrangian for EnergyLagrangian<M> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn value<S: Scalar>(&self, chart: ChartId, x: &[S], y: &[S]) -> Result<S> {
        check_dim(self.dim(), y.len())?;
        Ok(self.metric.metric(chart, x)?.bilinear(y, y).scale(0.5))
    }
}

/// `L(x, y) = y_1`, whose fibre Hessian vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearLagrangian {
    pub dim: usize,
}

impl Lagrangian for LinearLagrangian {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value<S: Scalar>(&self, _chart: ChartId, x: &[S], y: &[S]) -> Result<S> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(y[0].clone())
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    X(usize),
    Y(usize),
}

/// First or mixed second partial of `L` at hyper-dual `(x, y)` whose entries
/// carry `base` units; the two slots use units `base` and `base + 1`.
fn partial<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[HyperDual],
    y: &[HyperDual],
    base: usize,
    slots: &[Slot],
) -> Result<HyperDual> {
    let mut px = x.to_vec();
    let mut py = y.to_vec();
    let one = HyperDual::real(1.0);
    for (u, s) in slots.iter().enumerate() {
        let (v, i) = match *s {
            Slot::X(i) => (&mut px, i),
            Slot::Y(i) => (&mut py, i),
        };
        v[i] = v[i].perturb(base + u, &one);
    }
    let value = l.value(chart, &px, &py)?;
    Ok(value.component(base, (1 << slots.len()) - 1))
}

/// `Z = [∂²_2L]^{-1}(∂_1L − ∂_1∂_2L(·)(y))` in hyper-dual arithmetic.
fn vector_field_hd<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[HyperDual],
    y: &[HyperDual],
    base: usize,
) -> Result<Vec<HyperDual>> {
    let n = l.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    let mut hessian = Mat::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let h = partial(l, chart, x, y, base, &[Slot::Y(a), Slot::Y(b)])?;
            hessian.set(a, b, h.clone());
            hessian.set(b, a, h);
        }
    }
    let mut rhs = Vec::with_capacity(n);
    for a in 0..n {
        let mut r = partial(l, chart, x, y, base, &[Slot::X(a)])?;
        for (b, yb) in y.iter().enumerate() {
            r = r - partial(l, chart, x, y, base, &[Slot::Y(a), Slot::X(b)])? * yb.clone();
        }
        rhs.push(r);
    }
    hessian
        .solve(&rhs, DEGENERACY_TOLERANCE)
        .ok_or(Error::DegenerateLagrangian)
}

fn reals(v: &[f64]) -> Vec<HyperDual> {
    v.iter().map(|&a| HyperDual::real(a)).collect()
}

/// `FL(v)w = d/dt L(x, v + tw)|_{t=0}`.
pub fn fibre_derivative<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[f64],
    v: &[f64],
    w: &[f64],
) -> Result<f64> {
    let n = l.dim();
    check_dim(n, x.len())?;
    let mut point = x.to_vec();
    point.extend_from_slice(v);
    let mut dir = vec![0.0; n];
    dir.extend_from_slice(w);
    let d = dual_directional(
        |u| Ok(vec![l.value(chart, &u[..n], &u[n..])?]),
        &point,
        &dir,
    )?;
    Ok(d[0])
}

/// `E = FL(y)y − L`.
pub fn energy<L: Lagrangian>(l: &L, chart: ChartId, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(fibre_derivative(l, chart, x, y, y)? - l.value(chart, x, y)?)
}

/// `∂²_2L(x, y)`.
pub fn fibre_hessian<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[f64],
    y: &[f64],
) -> Result<Mat<f64>> {
    let n = l.dim();
    check_dim(n, x.len())?;
    check_dim(n, y.len())?;
    let (hx, hy) = (reals(x), reals(y));
    let mut h = Mat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            h.set(
                a,
                b,
                partial(l, chart, &hx, &hy, 0, &[Slot::Y(a), Slot::Y(b)])?.coefficients()[0],
            );
        }
    }
    Ok(h)
}

/// The Euler–Lagrange acceleration `Z_α(x, y)`; fails with
/// [`Error::DegenerateLagrangian`] when the fibre Hessian is singular.
pub fn lagrangian_vector_field<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    Ok(vector_field_hd(l, chart, &reals(x), &reals(y), 0)?
        .iter()
        .map(|h| h.coefficients()[0])
        .collect())
}

/// `∂_2Z_α(x, y)·w`.
pub fn vector_field_fibre_derivative<L: Lagrangian>(
    l: &L,
    chart: ChartId,
    x: &[f64],
    y: &[f64],
    w: &[f64],
) -> Result<Vec<f64>> {
    check_dim(l.dim(), w.len())?;
    let hy: Vec<HyperDual> = y
        .iter()
        .zip(w)
        .map(|(&a, &d)| HyperDual::real(a).perturb(0, &HyperDual::real(d)))
        .collect();
    Ok(vector_field_hd(l, chart, &reals(x), &hy, 1)?
        .iter()
        .map(|h| h.split(0).1.coefficients()[0])
        .collect())
}

fn same_base(j1: &CurveJet, j2: &CurveJet) -> Result<()> {
    if j1.chart() != j2.chart() {
        return Err(Error::ChartMismatch(j1.chart(), j2.chart()));
    }
    if j1.x() != j2.x() {
        return Err(Error::BasePointMismatch);
    }
    if j1.order() != j2.order() {
        return Err(Error::OrderMismatch {
            expected: j1.order(),
            found: j2.order(),
        });
    }
    Ok(())
}

/// `G^k(j1, j2) = Σ_i g_α(x)(z_i(j1), z_i(j2))`.
pub fn metric_lift<M: Metric, C: LinearConnection>(
    m: &M,
    mc: &ConnectionComponents<C>,
    j1: &CurveJet,
    j2: &CurveJet,
) -> Result<f64> {
    same_base(j1, j2)?;
    let (a, b) = (trivialize(mc, j1)?, trivialize(mc, j2)?);
    let g = m.metric::<f64>(j1.chart(), j1.x())?;
    Ok(a.z().iter().zip(b.z()).map(|(u, v)| g.bilinear(u, v)).sum())
}

/// `L^k(j) = Σ_i L_α(x, z_i(j))`.
pub fn lagrangian_lift<L: Lagrangian, C: LinearConnection>(
    l: &L,
    mc: &ConnectionComponents<C>,
    j: &CurveJet,
) -> Result<f64> {
    let lv = trivialize(mc, j)?;
    lv.z().iter().map(|z| l.value(j.chart(), j.x(), z)).sum()
}
