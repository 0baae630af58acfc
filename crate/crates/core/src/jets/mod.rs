//! Numeric substrate: scalar types for forward-mode and Taylor-mode
//! differentiation, truncated series, and the curve-jet value type.

mod dual;
mod hyperdual;
mod scalar;
mod series;

pub use dual::Dual;
pub use hyperdual::HyperDual;
pub use scalar::{axpy, dot, lift_vec, values, Scalar};
pub use series::{series2_compose, series_compose_oracle, Series, TruncSeries1, TruncSeries2};

use crate::atlas::ChartId;
use crate::error::{check_dim, Error, Result};

/// Order-k jet of a curve in a chart: base point `x` and normalized Taylor
/// coefficients `xi[i-1] = γ⁽ⁱ⁾(0)/i!`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    chart: ChartId,
    x: Vec<f64>,
    xi: Vec<Vec<f64>>,
}

impl CurveJet {
    pub fn new(chart: ChartId, x: Vec<f64>, xi: Vec<Vec<f64>>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidArgument(
                "jet order must be at least 1".into(),
            ));
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("zero-dimensional jet".into()));
        }
        for c in &xi {
            check_dim(x.len(), c.len())?;
        }
        Ok(Self { chart, x, xi })
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// ξ_1..ξ_k.
    pub fn xi(&self) -> &[Vec<f64>] {
        &self.xi
    }

    pub fn order(&self) -> usize {
        self.xi.len()
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Truncation to the first `order` coefficients.
    pub fn project(&self, order: usize) -> Result<CurveJet> {
        if order == 0 || order > self.order() {
            return Err(Error::OrderUnavailable {
                requested: order,
                available: self.order(),
            });
        }
        Ok(CurveJet {
            chart: self.chart,
            x: self.x.clone(),
            xi: self.xi[..order].to_vec(),
        })
    }

    pub fn to_series(&self) -> TruncSeries1 {
        let mut c = vec![self.x.clone()];
        c.extend(self.xi.iter().cloned());
        TruncSeries1::new(c).expect("jet invariants guarantee a valid series")
    }

    pub fn from_series(chart: ChartId, s: &TruncSeries1) -> CurveJet {
        CurveJet {
            chart,
            x: s.coeffs()[0].clone(),
            xi: s.coeffs()[1..].to_vec(),
        }
    }

    /// Concatenated coordinates `(x, ξ_1, …, ξ_k)`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        for c in &self.xi {
            v.extend_from_slice(c);
        }
        v
    }

    pub fn unflatten(chart: ChartId, dim: usize, flat: &[f64]) -> Result<CurveJet> {
        if dim == 0 || !flat.len().is_multiple_of(dim) || flat.len() < 2 * dim {
            return Err(Error::InvalidArgument(format!(
                "cannot split {} coordinates into a jet of dimension {dim}",
                flat.len()
            )));
        }
        let mut chunks = flat.chunks(dim).map(<[f64]>::to_vec);
        let x = chunks.next().unwrap_or_default();
        CurveJet::new(chart, x, chunks.collect())
    }
}

/// `d/ds f(point + s·direction)` at `s = 0`, by one forward-mode pass.
pub fn dual_directional<F>(f: F, point: &[f64], direction: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[Dual<f64>]) -> Result<Vec<Dual<f64>>>,
{
    check_dim(point.len(), direction.len())?;
    let input: Vec<Dual<f64>> = point
        .iter()
        .zip(direction)
        .map(|(&p, &d)| Dual::new(p, d))
        .collect();
    let out = f(&input)?;
    for v in &out {
        if !v.re.is_finite() || !v.eps.is_finite() {
            return Err(Error::Domain("non-finite value under perturbation".into()));
        }
    }
    Ok(out.into_iter().map(|d| d.eps).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_square() {
        let d =
            dual_directional(|x| Ok(vec![x[0].clone() * x[0].clone()]), &[3.0], &[1.0]).unwrap();
        assert_eq!(d, vec![6.0]);
    }

    #[test]
    fn derivative_of_constant() {
        let d = dual_directional(|_| Ok(vec![Dual::constant(7.0)]), &[3.0], &[1.0]).unwrap();
        assert_eq!(d, vec![0.0]);
    }

    #[test]
    fn bilinear_slot_derivative() {
        // Γ(ξ, y) = c ξ y with c = 2, y = 1, differentiated in ξ
        let c = 2.0;
        let y = Dual::constant(1.0);
        let d =
            dual_directional(|xi| Ok(vec![xi[0].scale(c) * y.clone()]), &[0.3], &[1.0]).unwrap();
        assert_eq!(d, vec![2.0]);
    }

    #[test]
    fn domain_violation_is_reported() {
        let r = dual_directional(|x| Ok(vec![x[0].recip()]), &[0.0], &[1.0]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn jet_rejects_zero_order() {
        assert!(CurveJet::new(ChartId(0), vec![0.0], vec![]).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let j = CurveJet::new(
            ChartId(1),
            vec![1.0, 2.0],
            vec![vec![3.0, 4.0], vec![5.0, 6.0]],
        )
        .unwrap();
        assert_eq!(CurveJet::unflatten(ChartId(1), 2, &j.flatten()).unwrap(), j);
    }
}
