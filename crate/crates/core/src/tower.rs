//! Finite truncations of the `T^∞M` tower: threads of coefficients, order
//! projections, the Fréchet metric, and strong-projective-system checks.

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::atlas::{ChartId, ChartedManifold};
use crate::connection::{ConnectionComponents, LinearConnection};
use crate::error::{check_dim, Error, Result};
use crate::jets::CurveJet;
use crate::linalg::{max_abs_diff, norm};
use crate::linearize::{block_linear_transition, restrict_order, trivialize, LinearizedVector};

/// Default hard cap on thread length.
pub const DEFAULT_MAX_ORDER: usize = 8;

type Supplier = Arc<dyn Fn(usize) -> Option<Vec<f64>> + Send + Sync>;

/// A point of the truncated tower: base point plus a lazily extended sequence
/// `i ↦ ξ_i`, materialized on demand up to `cap`.
pub struct JetThread {
    chart: ChartId,
    x: Vec<f64>,
    supplier: Supplier,
    cap: usize,
    cache: Mutex<Vec<Vec<f64>>>,
}

impl fmt::Debug for JetThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetThread")
            .field("chart", &self.chart)
            .field("x", &self.x)
            .field("cap", &self.cap)
            .field("materialized", &self.materialized())
            .finish()
    }
}

impl JetThread {
    /// `supplier(i)` yields `ξ_i` (`i ≥ 1`) or `None` once exhausted.
    pub fn new(
        chart: ChartId,
        x: Vec<f64>,
        cap: usize,
        supplier: impl Fn(usize) -> Option<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            chart,
            x,
            supplier: Arc::new(supplier),
            cap,
            cache: Mutex::new(Vec::new()),
        }
    }

    /// Thread whose coefficients are those of `jet` and then run out.
    pub fn from_jet(jet: &CurveJet) -> Self {
        let xi = jet.xi().to_vec();
        Self::new(jet.chart(), jet.x().to_vec(), jet.order(), move |i| {
            xi.get(i - 1).cloned()
        })
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn materialized(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    /// `ξ_1..ξ_order`, extending the cache as needed.
    pub fn prefix(&self, order: usize) -> Result<Vec<Vec<f64>>> {
        let mut cache = self
            .cache
            .lock()
            .map_err(|_| Error::InvalidArgument("thread cache poisoned".into()))?;
        while cache.len() < order {
            let next = cache.len() + 1;
            let exhausted = Error::SupplierExhausted {
                requested: order,
                available: cache.len(),
            };
            if next > self.cap {
                return Err(exhausted);
            }
            let c = (self.supplier)(next).ok_or(exhausted)?;
            check_dim(self.x.len(), c.len())?;
            cache.push(c);
        }
        Ok(cache[..order].to_vec())
    }

    /// `φ^{∞,i}`: the order-`i` jet of the thread.
    pub fn project(&self, order: usize) -> Result<CurveJet> {
        CurveJet::new(self.chart, self.x.clone(), self.prefix(order)?)
    }
}

/// `φ^{ki}` on a finite jet.
pub fn project(jet: &CurveJet, order: usize) -> Result<CurveJet> {
    jet.project(order)
}

/// Partial sum of the Fréchet metric and the bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrechetDistance {
    pub partial: f64,
    pub tail_bound: f64,
}

/// `Σ_{i=1}^{N} 2^{−i}·d_i/(1 + d_i)`, where `d_i` is the largest Euclidean
/// norm among the differences of `(x, ξ_1, …, ξ_i)`; the tail is at most `2^{−N}`.
pub fn frechet_distance(
    t1: &JetThread,
    t2: &JetThread,
    truncation: usize,
) -> Result<FrechetDistance> {
    if t1.chart != t2.chart {
        return Err(Error::ChartMismatch(t1.chart, t2.chart));
    }
    check_dim(t1.x.len(), t2.x.len())?;
    let (a, b) = (t1.prefix(truncation)?, t2.prefix(truncation)?);
    let diff =
        |u: &[f64], v: &[f64]| norm(&u.iter().zip(v).map(|(p, q)| p - q).collect::<Vec<_>>());
    let mut level = diff(&t1.x, &t2.x);
    let mut partial = 0.0;
    let mut weight = 1.0;
    for (u, v) in a.iter().zip(&b) {
        level = level.max(diff(u, v));
        weight *= 0.5;
        partial += weight * level / (1.0 + level);
    }
    Ok(FrechetDistance {
        partial,
        tail_bound: weight,
    })
}

/// `max_{j′<j} |ρ^{jj′}(Φ^j(u)) − Φ^{j′}(φ^{jj′}(u))|` for one jet.
pub fn strong_system_residual<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    jet: &CurveJet,
) -> Result<f64> {
    let full = trivialize(mc, jet)?;
    let mut worst: f64 = 0.0;
    for lower in 1..jet.order() {
        let a = restrict_order(&full, lower)?;
        let b = trivialize(mc, &jet.project(lower)?)?;
        worst = worst.max(max_abs_diff(&a.fibre(), &b.fibre()));
    }
    Ok(worst)
}

/// Residual of `(dψ, …, dψ) ∘ ρ^{jj′} = ρ^{jj′} ∘ (dψ, …, dψ)` over all `j′ < j`.
pub fn transition_truncation_residual(
    m: &ChartedManifold,
    lv: &LinearizedVector,
    target: ChartId,
) -> Result<f64> {
    let moved = block_linear_transition(m, lv, target)?;
    let mut worst: f64 = 0.0;
    for lower in 1..lv.order() {
        let a = block_linear_transition(m, &restrict_order(lv, lower)?, target)?;
        let b = restrict_order(&moved, lower)?;
        worst = worst.max(max_abs_diff(&a.fibre(), &b.fibre()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::CHART_A;

    fn constant_thread(first: f64) -> JetThread {
        JetThread::new(CHART_A, vec![0.0], DEFAULT_MAX_ORDER, move |i| {
            Some(vec![if i == 1 { first } else { 0.0 }])
        })
    }

    #[test]
    fn projection_is_functorial() {
        let jet = CurveJet::new(
            CHART_A,
            vec![0.0],
            (1..=5).map(|i| vec![i as f64]).collect(),
        )
        .unwrap();
        assert_eq!(project(&jet, 5).unwrap(), jet);
        assert_eq!(
            project(&project(&jet, 3).unwrap(), 1).unwrap(),
            project(&jet, 1).unwrap()
        );
        assert_eq!(project(&jet, 2).unwrap().xi(), &[vec![1.0], vec![2.0]]);
    }

    #[test]
    fn thread_materializes_lazily() {
        let t = constant_thread(1.0);
        assert_eq!(t.materialized(), 0);
        t.project(3).unwrap();
        assert_eq!(t.materialized(), 3);
        assert!(matches!(t.project(9), Err(Error::SupplierExhausted { .. })));
        let jet = CurveJet::new(CHART_A, vec![0.0], vec![vec![1.0], vec![2.0]]).unwrap();
        let tj = JetThread::from_jet(&jet);
        assert_eq!(tj.project(2).unwrap(), jet);
        assert!(tj.project(3).is_err());
    }

    #[test]
    fn worked_distance() {
        let (a, b) = (constant_thread(0.0), constant_thread(1.0));
        for n in 1..=8 {
            let d = frechet_distance(&a, &b, n).unwrap();
            assert!((d.partial - 0.5 * (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-15);
            assert_eq!(d.tail_bound, 0.5f64.powi(n as i32));
        }
        assert_eq!(frechet_distance(&a, &a, 8).unwrap().partial, 0.0);
        let other = JetThread::new(ChartId(1), vec![0.0], 8, |_| Some(vec![0.0]));
        assert!(frechet_distance(&a, &other, 2).is_err());
    }
}
