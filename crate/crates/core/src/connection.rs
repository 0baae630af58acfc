//! Linear connections, the induced connection-map components `M^i`, the local
//! connection map `K` and the horizontal projection.

use std::sync::Arc;

use crate::atlas::{ChartId, ChartedManifold};
use crate::error::{check_dim, Error, Result};
use crate::jets::{CurveJet, HyperDual, Scalar};
use crate::linalg::{max_abs_diff, Mat};
use crate::osculating::{tangent_transition, OsculatingTangent};
use crate::residual::ResidualReport;

/// Per-chart Christoffel form `(ξ, y) ↦ Γ_α(x)(ξ, y)`, bilinear in `(ξ, y)`
/// and evaluable in any scalar type so it can be differentiated.
pub trait LinearConnection: Send + Sync {
    fn dim(&self) -> usize;
    fn christoffel<S: Scalar>(&self, chart: ChartId, x: &[S], xi: &[S], y: &[S]) -> Result<Vec<S>>;
}

impl<C: LinearConnection> LinearConnection for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn christoffel<S: Scalar>(&self, chart: ChartId, x: &[S], xi: &[S], y: &[S]) -> Result<Vec<S>> {
        (**self).christoffel(chart, x, xi, y)
    }
}

impl<C: LinearConnection> LinearConnection for Arc<C> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn christoffel<S: Scalar>(&self, chart: ChartId, x: &[S], xi: &[S], y: &[S]) -> Result<Vec<S>> {
        (**self).christoffel(chart, x, xi, y)
    }
}

/// `Γ ≡ 0` in every chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatConnection {
    pub dim: usize,
}

impl LinearConnection for FlatConnection {
    fn dim(&self) -> usize {
        self.dim
    }
    fn christoffel<S: Scalar>(
        &self,
        _chart: ChartId,
        x: &[S],
        xi: &[S],
        y: &[S],
    ) -> Result<Vec<S>> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, xi.len())?;
        check_dim(self.dim, y.len())?;
        Ok(vec![S::zero(); self.dim])
    }
}

/// The components `M^1, …, M^k` induced by a linear connection:
/// `M^1 = Γ` and `i·M^i(u)y = D_X[M^{i−1}(u)y] + M^1(u)[M^{i−1}(u)y]`, where
/// `D_X` differentiates along the jet flow `X = (ξ_1, 2ξ_2, …, iξ_i)`.
#[derive(Debug, Clone)]
pub struct ConnectionComponents<C> {
    connection: C,
    order: usize,
    scales: Vec<f64>,
}

/// `M^1(u), …, M^k(u)` at one jet, as matrices acting on `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentsAt {
    mats: Vec<Mat<f64>>,
}

impl<C: LinearConnection> ConnectionComponents<C> {
    pub fn induce(connection: C, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidArgument(
                "connection components need order ≥ 1".into(),
            ));
        }
        Ok(Self {
            connection,
            order,
            scales: vec![1.0; order],
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.connection.dim()
    }

    pub fn connection(&self) -> &C {
        &self.connection
    }

    /// Copy whose `M^level` is multiplied by `factor`; the result no longer
    /// comes from a connection and serves as a negative control.
    pub fn with_level_scaled(mut self, level: usize, factor: f64) -> Result<Self> {
        if level == 0 || level > self.order {
            return Err(Error::OrderUnavailable {
                requested: level,
                available: self.order,
            });
        }
        self.scales[level - 1] = factor;
        Ok(self)
    }

    /// `M^1..M^m` at `(x, ξ_1..ξ_m)`, `m = xi.len() ≤ order`.
    pub fn at(&self, chart: ChartId, x: &[f64], xi: &[Vec<f64>]) -> Result<ComponentsAt> {
        let n = self.dim();
        check_dim(n, x.len())?;
        for c in xi {
            check_dim(n, c.len())?;
        }
        if xi.len() > self.order {
            return Err(Error::OrderUnavailable {
                requested: xi.len(),
                available: self.order,
            });
        }
        if xi.is_empty() {
            return Ok(ComponentsAt { mats: Vec::new() });
        }
        let lift = |v: &[f64]| v.iter().map(|&a| HyperDual::real(a)).collect::<Vec<_>>();
        let hx = lift(x);
        let hxi: Vec<Vec<HyperDual>> = xi.iter().map(|c| lift(c)).collect();
        let mats = self
            .levels(chart, &hx, &hxi, 0)?
            .into_iter()
            .zip(&self.scales)
            .map(|(m, &s)| m.map(|h| h.coefficients()[0] * s))
            .collect();
        Ok(ComponentsAt { mats })
    }

    pub fn at_jet(&self, jet: &CurveJet) -> Result<ComponentsAt> {
        self.at(jet.chart(), jet.x(), jet.xi())
    }

    /// `M^i(x, ξ_1..ξ_i)y`.
    pub fn eval(
        &self,
        i: usize,
        chart: ChartId,
        x: &[f64],
        xi: &[Vec<f64>],
        y: &[f64],
    ) -> Result<Vec<f64>> {
        if i == 0 || i > xi.len() {
            return Err(Error::OrderUnavailable {
                requested: i,
                available: xi.len(),
            });
        }
        check_dim(self.dim(), y.len())?;
        Ok(self.at(chart, x, &xi[..i])?.apply(i, y))
    }

    /// Components at a point whose coordinates already carry `depth`
    /// nilpotent units. Lifting along the jet flow with a fresh unit and
    /// recursing yields, in the real part, the lower components and, in the
    /// new unit, their flow derivatives.
    fn levels(
        &self,
        chart: ChartId,
        x: &[HyperDual],
        xi: &[Vec<HyperDual>],
        depth: usize,
    ) -> Result<Vec<Mat<HyperDual>>> {
        let n = x.len();
        let count = xi.len();
        if count == 1 {
            let columns = (0..n)
                .map(|j| {
                    let e: Vec<HyperDual> = (0..n)
                        .map(|r| HyperDual::real(if r == j { 1.0 } else { 0.0 }))
                        .collect();
                    self.connection.christoffel(chart, x, &xi[0], &e)
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(vec![Mat::from_columns(columns)]);
        }
        let lx: Vec<HyperDual> = x
            .iter()
            .zip(&xi[0])
            .map(|(a, d)| a.perturb(depth, d))
            .collect();
        let lxi: Vec<Vec<HyperDual>> = (0..count - 1)
            .map(|j| {
                let factor = (j + 2) as f64;
                xi[j]
                    .iter()
                    .zip(&xi[j + 1])
                    .map(|(a, d)| a.perturb(depth, &d.scale(factor)))
                    .collect()
            })
            .collect();
        let inner = self.levels(chart, &lx, &lxi, depth + 1)?;
        let mut lower = Vec::with_capacity(count);
        let mut top_derivative = None;
        for (l, m) in inner.iter().enumerate() {
            lower.push(m.map(|h| h.split(depth).0));
            if l + 1 == inner.len() {
                top_derivative = Some(m.map(|h| h.split(depth).1));
            }
        }
        let d = top_derivative.expect("inner levels are non-empty");
        let top = d
            .add(&lower[0].matmul(&lower[count - 2]))
            .scale(1.0 / count as f64);
        lower.push(top);
        Ok(lower)
    }
}

impl ComponentsAt {
    pub fn order(&self) -> usize {
        self.mats.len()
    }

    /// `M^i` as a matrix, `1 ≤ i ≤ order`.
    pub fn matrix(&self, i: usize) -> &Mat<f64> {
        &self.mats[i - 1]
    }

    pub fn apply(&self, i: usize, y: &[f64]) -> Vec<f64> {
        self.mats[i - 1].mul_vec(y)
    }

    /// `Σ_{l=1}^{i-1} M^l η_{i−l} + M^i y`, i.e. stage `i` of `K` minus `η_i`.
    fn correction(&self, i: usize, y: &[f64], eta: &[Vec<f64>]) -> Vec<f64> {
        let mut acc = self.apply(i, y);
        for l in 1..i {
            for (a, v) in acc.iter_mut().zip(self.apply(l, &eta[i - l - 1])) {
                *a += v;
            }
        }
        acc
    }

    /// Stages of the local connection map:
    /// `K_i = η_i + M^1η_{i−1} + … + M^{i−1}η_1 + M^i y`.
    pub fn connection_map(&self, y: &[f64], eta: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (1..=eta.len().min(self.order()))
            .map(|i| {
                self.correction(i, y, eta)
                    .into_iter()
                    .zip(&eta[i - 1])
                    .map(|(c, e)| c + e)
                    .collect()
            })
            .collect()
    }

    /// `η` with the given `y` such that every stage of `K` vanishes.
    pub fn horizontal_eta(&self, y: &[f64], order: usize) -> Vec<Vec<f64>> {
        let mut eta: Vec<Vec<f64>> = Vec::with_capacity(order);
        for i in 1..=order.min(self.order()) {
            let c = self.correction(i, y, &eta);
            eta.push(c.into_iter().map(|v| -v).collect());
        }
        eta
    }
}

fn components_for<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    ot: &OsculatingTangent,
) -> Result<ComponentsAt> {
    if ot.order() > mc.order() {
        return Err(Error::OrderUnavailable {
            requested: ot.order(),
            available: mc.order(),
        });
    }
    mc.at_jet(ot.base())
}

/// `K|_α(u; y, η)`, one vector per stage `1..=k`.
pub fn connection_map_apply<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    ot: &OsculatingTangent,
) -> Result<Vec<Vec<f64>>> {
    Ok(components_for(mc, ot)?.connection_map(ot.y(), ot.eta()))
}

/// The horizontal tangent with the same `y`: the unique element of `ker K`
/// over the same base and first slot.
pub fn horizontal_projector<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    ot: &OsculatingTangent,
) -> Result<OsculatingTangent> {
    let at = components_for(mc, ot)?;
    let eta = at.horizontal_eta(ot.y(), ot.order());
    OsculatingTangent::new(ot.base().clone(), ot.y().to_vec(), eta)
}

/// Residual of `dψ_{βα}(x)[K^α_i] = K^β_i(TΨ^k_{βα} ·)` over the samples.
pub fn verify_compatibility<C: LinearConnection>(
    m: &ChartedManifold,
    mc: &ConnectionComponents<C>,
    samples: &[OsculatingTangent],
    target: ChartId,
    tol: f64,
) -> Result<ResidualReport> {
    let mut residuals = Vec::with_capacity(samples.len());
    for ot in samples {
        residuals.push(compatibility_residual(m, mc, ot, target)?);
    }
    Ok(ResidualReport::from_residuals(residuals, tol))
}

/// Single-sample residual for [`verify_compatibility`].
pub fn compatibility_residual<C: LinearConnection>(
    m: &ChartedManifold,
    mc: &ConnectionComponents<C>,
    ot: &OsculatingTangent,
    target: ChartId,
) -> Result<f64> {
    if ot.chart() != target && m.transition(ot.chart(), target).is_err() {
        return Err(Error::NoOverlapAvailable);
    }
    let jac = m
        .transition_at(ot.chart(), target, ot.base().x())?
        .tensor(1, ot.base().x())?;
    let lhs = connection_map_apply(mc, ot)?;
    let moved = tangent_transition(m, ot, target)?;
    let rhs = connection_map_apply(mc, &moved)?;
    let mut worst: f64 = 0.0;
    for (a, b) in lhs.iter().zip(&rhs) {
        let pushed = jac.apply::<f64>(&[a])?;
        worst = worst.max(max_abs_diff(&pushed, b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_fixture, CHART_A};

    fn exp_components(
        order: usize,
    ) -> ConnectionComponents<crate::atlas::LeviCivita<crate::atlas::FixtureMetric>> {
        ConnectionComponents::induce(build_fixture("exp_metric_1d").unwrap().connection(), order)
            .unwrap()
    }

    #[test]
    fn flat_components_vanish() {
        let mc = ConnectionComponents::induce(FlatConnection { dim: 2 }, 4).unwrap();
        let at = mc
            .at(
                CHART_A,
                &[0.1, 0.2],
                &[
                    vec![1.0, 2.0],
                    vec![3.0, 4.0],
                    vec![5.0, 6.0],
                    vec![7.0, 8.0],
                ],
            )
            .unwrap();
        for i in 1..=4 {
            assert_eq!(at.apply(i, &[1.0, -1.0]), vec![0.0, 0.0]);
        }
        assert!(ConnectionComponents::induce(FlatConnection { dim: 2 }, 0).is_err());
    }

    #[test]
    fn exponential_second_component() {
        let mc = exp_components(3);
        let m2 = mc
            .eval(2, CHART_A, &[0.0], &[vec![1.0], vec![0.0]], &[1.0])
            .unwrap();
        assert!((m2[0] - 0.5).abs() < 1e-15);
        // M² = ξ_2 + ½ξ_1² for c = 1.
        let m2 = mc
            .eval(2, CHART_A, &[0.3], &[vec![2.0], vec![0.7]], &[1.0])
            .unwrap();
        assert!((m2[0] - (0.7 + 2.0)).abs() < 1e-14);
        // M³ = ξ_3 + ξ_1ξ_2 + ξ_1³/6 for c = 1.
        let m3 = mc
            .eval(
                3,
                CHART_A,
                &[0.3],
                &[vec![2.0], vec![0.7], vec![-0.4]],
                &[1.0],
            )
            .unwrap();
        assert!((m3[0] - (-0.4 + 1.4 + 8.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn connection_map_and_projector() {
        let mc = exp_components(2);
        let base = CurveJet::new(CHART_A, vec![0.0], vec![vec![1.0], vec![0.0]]).unwrap();
        let ot =
            OsculatingTangent::new(base.clone(), vec![1.0], vec![vec![0.0], vec![0.0]]).unwrap();
        let k = connection_map_apply(&mc, &ot).unwrap();
        assert_eq!(k.len(), 2);
        assert!((k[0][0] - 1.0).abs() < 1e-15 && (k[1][0] - 0.5).abs() < 1e-15);
        let h = horizontal_projector(&mc, &ot).unwrap();
        assert!((h.eta()[0][0] + 1.0).abs() < 1e-15 && (h.eta()[1][0] - 0.5).abs() < 1e-15);
        assert!(connection_map_apply(&mc, &h)
            .unwrap()
            .iter()
            .all(|v| v[0].abs() < 1e-15));
    }

    #[test]
    fn negative_control_scales_one_level() {
        let mc = exp_components(2).with_level_scaled(2, 1.1).unwrap();
        let m2 = mc
            .eval(2, CHART_A, &[0.0], &[vec![1.0], vec![0.0]], &[1.0])
            .unwrap();
        assert!((m2[0] - 0.55).abs() < 1e-15);
        assert!(exp_components(2).with_level_scaled(3, 1.1).is_err());
    }
}
