//! Charts, transition maps with exact derivative tensors, metrics, and the
//! concrete manifolds the verification suite runs on.

mod config;
mod fixtures;
mod maps;
mod metric;
mod tensor;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use config::parse_key_values;
pub use fixtures::{build_fixture, Fixture, FixtureKind, FixtureParams, CHART_A, CHART_B};
pub use maps::{CubicInverse, Inversion, Monomial, PolyMap, Polynomial, CLOSED_FORM_MAX_ORDER};
pub use metric::{
    levi_civita, metric_invariance_residual, FixtureMetric, LeviCivita, Metric, PullbackInverse,
};
pub use tensor::SymTensor;

use crate::error::{check_dim, Error, Result};
use crate::jets::Dual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChartId(pub u8);

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A map between chart domains that supplies exact symmetric derivative
/// tensors `dⁱψ(x)`.
pub trait SmoothMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    /// Highest tensor order [`SmoothMap::tensor`] can produce.
    fn max_order(&self) -> usize;
    fn value(&self, x: &[f64]) -> Vec<f64>;
    /// Value at a dual-number point, for forward-mode cross-checks.
    fn value_dual(&self, x: &[Dual<f64>]) -> Vec<Dual<f64>>;
    /// `dⁱψ(x)` for `i ≥ 1`.
    fn tensor(&self, order: usize, x: &[f64]) -> Result<SymTensor>;

    /// `d¹ψ(x) … d^kψ(x)`.
    fn tensors(&self, x: &[f64], k: usize) -> Result<Vec<SymTensor>> {
        if k > self.max_order() {
            return Err(Error::OrderUnavailable {
                requested: k,
                available: self.max_order(),
            });
        }
        (1..=k).map(|i| self.tensor(i, x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity {
    pub dim: usize,
}

impl SmoothMap for Identity {
    fn dim_in(&self) -> usize {
        self.dim
    }
    fn dim_out(&self) -> usize {
        self.dim
    }
    fn max_order(&self) -> usize {
        usize::MAX
    }
    fn value(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }
    fn value_dual(&self, x: &[Dual<f64>]) -> Vec<Dual<f64>> {
        x.to_vec()
    }
    fn tensor(&self, order: usize, x: &[f64]) -> Result<SymTensor> {
        check_dim(self.dim, x.len())?;
        Ok(SymTensor::from_fn(order, self.dim, self.dim, |o, idx| {
            if order == 1 && idx[0] == o {
                1.0
            } else {
                0.0
            }
        }))
    }
}

/// Coordinate membership predicate of a chart or an overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Everywhere,
    /// `|x| > min_radius`.
    Punctured {
        min_radius: f64,
    },
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Domain::Everywhere => x.iter().all(|v| v.is_finite()),
            Domain::Punctured { min_radius } => {
                x.iter().all(|v| v.is_finite()) && crate::linalg::norm(x) > min_radius
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub id: ChartId,
    pub name: String,
    pub domain: Domain,
}

#[derive(Clone)]
pub struct Transition {
    pub map: Arc<dyn SmoothMap>,
    /// Overlap, in source-chart coordinates.
    pub overlap: Domain,
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transition")
            .field("dim_in", &self.map.dim_in())
            .field("overlap", &self.overlap)
            .finish()
    }
}

/// Atlas of a manifold: chart domains plus transition maps `ψ_{βα}` for each
/// ordered overlapping pair.
#[derive(Debug, Clone)]
pub struct ChartedManifold {
    name: String,
    dim: usize,
    charts: Vec<Chart>,
    transitions: BTreeMap<(ChartId, ChartId), Transition>,
    identity: Arc<Identity>,
}

impl ChartedManifold {
    pub fn new(name: impl Into<String>, dim: usize, charts: Vec<Chart>) -> Self {
        Self {
            name: name.into(),
            dim,
            charts,
            transitions: BTreeMap::new(),
            identity: Arc::new(Identity { dim }),
        }
    }

    /// Registers `ψ_{to,from}` together with its overlap in `from` coordinates.
    pub fn with_transition(
        mut self,
        from: ChartId,
        to: ChartId,
        map: Arc<dyn SmoothMap>,
        overlap: Domain,
    ) -> Self {
        self.transitions
            .insert((from, to), Transition { map, overlap });
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, id: ChartId) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or(Error::UnknownChart(id))
    }

    pub fn contains(&self, id: ChartId, x: &[f64]) -> Result<bool> {
        Ok(self.chart(id)?.domain.contains(x))
    }

    /// Ordered pairs `(α, β)`, `α ≠ β`, with a registered transition.
    pub fn overlapping_pairs(&self) -> Vec<(ChartId, ChartId)> {
        self.transitions.keys().copied().collect()
    }

    pub fn in_overlap(&self, from: ChartId, to: ChartId, x: &[f64]) -> Result<bool> {
        if !self.contains(from, x)? {
            return Ok(false);
        }
        if from == to {
            return Ok(true);
        }
        match self.transitions.get(&(from, to)) {
            Some(t) => Ok(t.overlap.contains(x)),
            None => Ok(false),
        }
    }

    /// `ψ_{to,from}`; the identity when the charts coincide.
    pub fn transition(&self, from: ChartId, to: ChartId) -> Result<&dyn SmoothMap> {
        self.chart(from)?;
        self.chart(to)?;
        if from == to {
            return Ok(self.identity.as_ref());
        }
        self.transitions
            .get(&(from, to))
            .map(|t| t.map.as_ref())
            .ok_or(Error::NoOverlap(from, to))
    }

    /// Transition map after checking that `x` lies in the overlap.
    pub fn transition_at(&self, from: ChartId, to: ChartId, x: &[f64]) -> Result<&dyn SmoothMap> {
        check_dim(self.dim, x.len())?;
        let map = self.transition(from, to)?;
        if !self.in_overlap(from, to, x)? {
            return Err(Error::OutsideOverlap { from, to });
        }
        Ok(map)
    }

    pub fn map_point(&self, from: ChartId, to: ChartId, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.transition_at(from, to, x)?.value(x))
    }
}
