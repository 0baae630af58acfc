//! The connection-induced trivialization `Φ^k` of `T^kM`, its inverse, and
//! the transitions it makes block-linear.

use crate::atlas::{ChartId, ChartedManifold};
use crate::connection::{ComponentsAt, ConnectionComponents, LinearConnection};
use crate::error::{check_dim, Error, Result};
use crate::jets::CurveJet;
use crate::osculating::natural_transition;

/// A point `(x; z_1, …, z_k)` of `T^kM` in the vector-bundle chart `Φ^k_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedVector {
    chart: ChartId,
    x: Vec<f64>,
    z: Vec<Vec<f64>>,
}

impl LinearizedVector {
    pub fn new(chart: ChartId, x: Vec<f64>, z: Vec<Vec<f64>>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument(
                "fibre needs at least one slot".into(),
            ));
        }
        for s in &z {
            check_dim(x.len(), s.len())?;
        }
        Ok(Self { chart, x, z })
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn z(&self) -> &[Vec<f64>] {
        &self.z
    }

    pub fn order(&self) -> usize {
        self.z.len()
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Fibre slots concatenated.
    pub fn fibre(&self) -> Vec<f64> {
        self.z.concat()
    }
}

/// `Σ_{l=1}^{i−1} (i−l)/i · M^l[ξ_{i−l}]`, reading `ξ` from `xi` (0-based).
fn correction(at: &ComponentsAt, i: usize, xi: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for l in 1..i {
        let w = (i - l) as f64 / i as f64;
        for (a, v) in acc.iter_mut().zip(at.apply(l, &xi[i - l - 1])) {
            *a += w * v;
        }
    }
    acc
}

fn check_order<C: LinearConnection>(mc: &ConnectionComponents<C>, k: usize) -> Result<()> {
    if k > mc.order() {
        return Err(Error::OrderMismatch {
            expected: mc.order(),
            found: k,
        });
    }
    Ok(())
}

/// `Φ^k_α`: `z_i = ξ_i + (1/i) Σ_{l=1}^{i−1} (i−l)·M^l(x, ξ_1..ξ_l)[ξ_{i−l}]`.
pub fn trivialize<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    j: &CurveJet,
) -> Result<LinearizedVector> {
    let k = j.order();
    check_order(mc, k)?;
    let n = j.dim();
    let at = mc.at(j.chart(), j.x(), &j.xi()[..k - 1])?;
    let z = (1..=k)
        .map(|i| {
            let c = correction(&at, i, j.xi(), n);
            j.xi()[i - 1].iter().zip(c).map(|(a, b)| a + b).collect()
        })
        .collect();
    LinearizedVector::new(j.chart(), j.x().to_vec(), z)
}

/// `(Φ^k_α)^{-1}`, solving for `ξ_i` in increasing `i`; each step only needs
/// components at the already recovered prefix.
pub fn detrivialize<C: LinearConnection>(
    mc: &ConnectionComponents<C>,
    lv: &LinearizedVector,
) -> Result<CurveJet> {
    let k = lv.order();
    check_order(mc, k)?;
    let n = lv.dim();
    let mut xi: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in 1..=k {
        let at = mc.at(lv.chart, &lv.x, &xi)?;
        let c = correction(&at, i, &xi, n);
        xi.push(lv.z[i - 1].iter().zip(c).map(|(a, b)| a - b).collect());
    }
    CurveJet::new(lv.chart, lv.x.clone(), xi)
}

/// `Φ^k_β ∘ Ψ^k_{βα} ∘ (Φ^k_α)^{-1}`, computed through the natural chart
/// change.
pub fn linear_transition<C: LinearConnection>(
    m: &ChartedManifold,
    mc: &ConnectionComponents<C>,
    lv: &LinearizedVector,
    target: ChartId,
) -> Result<LinearizedVector> {
    m.transition_at(lv.chart, target, &lv.x)?;
    let jet = detrivialize(mc, lv)?;
    let moved = natural_transition(m, &jet, target)?;
    trivialize(mc, &moved)
}

/// `(ψ(x); dψ(x)z_1, …, dψ(x)z_k)`.
pub fn block_linear_transition(
    m: &ChartedManifold,
    lv: &LinearizedVector,
    target: ChartId,
) -> Result<LinearizedVector> {
    let map = m.transition_at(lv.chart, target, &lv.x)?;
    let jac = map.tensor(1, &lv.x)?;
    let z =
        lv.z.iter()
            .map(|s| jac.apply::<f64>(&[s]))
            .collect::<Result<Vec<_>>>()?;
    LinearizedVector::new(target, map.value(&lv.x), z)
}

/// Drops the slots above `order`.
pub fn restrict_order(lv: &LinearizedVector, order: usize) -> Result<LinearizedVector> {
    if order == 0 || order >= lv.order() {
        return Err(Error::OrderUnavailable {
            requested: order,
            available: lv.order().saturating_sub(1),
        });
    }
    LinearizedVector::new(lv.chart, lv.x.clone(), lv.z[..order].to_vec())
}
