//! Natural chart changes of `T^kM`, their tangent maps, and the vertical
//! endomorphism `J`.

use crate::atlas::{ChartId, ChartedManifold};
use crate::error::{check_dim, Error, Result};
use crate::faa::{chain_rule, pushforward_jet};
use crate::jets::{dual_directional, series2_compose, CurveJet, Dual, TruncSeries2};

/// Local representative `(u; y, η_1, …, η_k)` of a tangent vector to `T^kM`
/// at the jet `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct OsculatingTangent {
    base: CurveJet,
    y: Vec<f64>,
    eta: Vec<Vec<f64>>,
}

impl OsculatingTangent {
    pub fn new(base: CurveJet, y: Vec<f64>, eta: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(base.dim(), y.len())?;
        if eta.len() != base.order() {
            return Err(Error::OrderMismatch {
                expected: base.order(),
                found: eta.len(),
            });
        }
        for e in &eta {
            check_dim(base.dim(), e.len())?;
        }
        Ok(Self { base, y, eta })
    }

    pub fn zero(base: CurveJet) -> Self {
        let n = base.dim();
        let k = base.order();
        Self {
            base,
            y: vec![0.0; n],
            eta: vec![vec![0.0; n]; k],
        }
    }

    pub fn base(&self) -> &CurveJet {
        &self.base
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn eta(&self) -> &[Vec<f64>] {
        &self.eta
    }

    pub fn chart(&self) -> ChartId {
        self.base.chart()
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    /// Fibre coordinates `(y, η_1, …, η_k)` concatenated.
    pub fn fibre(&self) -> Vec<f64> {
        let mut v = self.y.clone();
        for e in &self.eta {
            v.extend_from_slice(e);
        }
        v
    }
}

/// `Ψ^k_{βα}`: transports a jet to `target` with the order-k chain rule.
pub fn natural_transition(m: &ChartedManifold, j: &CurveJet, target: ChartId) -> Result<CurveJet> {
    let map = m.transition_at(j.chart(), target, j.x())?;
    let out = pushforward_jet(map, j)?;
    CurveJet::new(target, out.x().to_vec(), out.xi().to_vec())
}

/// `TΨ^k_{βα}` via the composed series of `c̄(t, s) = x + sy + Σ tʲ(ξ_j + sη_j)`:
/// `ȳ` and `η̄_i` are the coefficients of `s` and `tⁱs`.
pub fn tangent_transition(
    m: &ChartedManifold,
    ot: &OsculatingTangent,
    target: ChartId,
) -> Result<OsculatingTangent> {
    let j = &ot.base;
    let map = m.transition_at(j.chart(), target, j.x())?;
    let mut grid = vec![[j.x().to_vec(), ot.y.clone()]];
    for (xi, eta) in j.xi().iter().zip(&ot.eta) {
        grid.push([xi.clone(), eta.clone()]);
    }
    let out = series2_compose(map, &TruncSeries2::new(grid)?)?;
    let k = j.order();
    let base = CurveJet::new(
        target,
        out.coeff(0, 0).to_vec(),
        (1..=k).map(|i| out.coeff(i, 0).to_vec()).collect(),
    )?;
    OsculatingTangent::new(
        base,
        out.coeff(0, 1).to_vec(),
        (1..=k).map(|i| out.coeff(i, 1).to_vec()).collect(),
    )
}

/// Independent route for [`tangent_transition`]: the forward-mode derivative
/// of `Ψ^k_{βα}` in the direction `(y, η)`.
pub fn tangent_transition_dual(
    m: &ChartedManifold,
    ot: &OsculatingTangent,
    target: ChartId,
) -> Result<OsculatingTangent> {
    let j = &ot.base;
    let n = j.dim();
    let k = j.order();
    let map = m.transition_at(j.chart(), target, j.x())?;
    let tensors = map.tensors(j.x(), k + 1)?;
    let flat_dir = {
        let mut v = ot.y.clone();
        for e in &ot.eta {
            v.extend_from_slice(e);
        }
        v
    };
    let evaluator = |u: &[Dual<f64>]| -> Result<Vec<Dual<f64>>> {
        let y: Vec<f64> = u[..n].iter().map(|d| d.eps).collect();
        let xi: Vec<Vec<Dual<f64>>> = u[n..].chunks(n).map(<[Dual<f64>]>::to_vec).collect();
        // dⁱψ(x + εy)[v…] = dⁱψ(x)[v…] + ε·dⁱ⁺¹ψ(x)[y, re v…].
        let out = chain_rule(&xi, |i, args| {
            let head = tensors[i - 1].apply(args)?;
            let re: Vec<Vec<f64>> = args
                .iter()
                .map(|a| a.iter().map(|d| d.re).collect())
                .collect();
            let mut shifted: Vec<&[f64]> = vec![&y];
            shifted.extend(re.iter().map(Vec::as_slice));
            let tail = tensors[i].apply::<f64>(&shifted)?;
            Ok(head
                .into_iter()
                .zip(tail)
                .map(|(h, t)| Dual::new(h.re, h.eps + t))
                .collect())
        })?;
        let mut v = map.value_dual(&u[..n]);
        for c in out {
            v.extend(c);
        }
        Ok(v)
    };
    let d = dual_directional(evaluator, &j.flatten(), &flat_dir)?;
    let image = natural_transition(m, j, target)?;
    let mut chunks = d.chunks(n).map(<[f64]>::to_vec);
    let y = chunks.next().unwrap_or_default();
    OsculatingTangent::new(image, y, chunks.collect())
}

/// `J(u; y, η_1, …, η_k) = (u; 0, y, η_1, …, η_{k−1})`.
pub fn vertical_shift_j(ot: &OsculatingTangent) -> OsculatingTangent {
    let n = ot.base.dim();
    let mut eta = Vec::with_capacity(ot.eta.len());
    if !ot.eta.is_empty() {
        eta.push(ot.y.clone());
        eta.extend(ot.eta[..ot.eta.len() - 1].iter().cloned());
    }
    OsculatingTangent {
        base: ot.base.clone(),
        y: vec![0.0; n],
        eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_fixture, CHART_A, CHART_B};

    fn jet(x: f64, xi: &[f64]) -> CurveJet {
        CurveJet::new(CHART_A, vec![x], xi.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn natural_transition_flat_poly() {
        let f = build_fixture("flat_poly").unwrap();
        let out = natural_transition(f.manifold(), &jet(1.0, &[1.0, 0.0]), CHART_B).unwrap();
        assert_eq!(out.chart(), CHART_B);
        assert_eq!(out.x(), &[2.0]);
        assert_eq!(out.xi(), &[vec![4.0], vec![3.0]]);
        let same = natural_transition(f.manifold(), &jet(1.0, &[1.0, 0.0]), CHART_A).unwrap();
        assert_eq!(same, jet(1.0, &[1.0, 0.0]));
    }

    #[test]
    fn tangent_transition_flat_poly() {
        let f = build_fixture("flat_poly").unwrap();
        let ot =
            OsculatingTangent::new(jet(1.0, &[1.0, 0.0]), vec![1.0], vec![vec![0.0], vec![0.0]])
                .unwrap();
        let a = tangent_transition(f.manifold(), &ot, CHART_B).unwrap();
        let b = tangent_transition_dual(f.manifold(), &ot, CHART_B).unwrap();
        assert_eq!(a.y(), &[4.0]);
        assert_eq!(a.eta()[0], vec![6.0]);
        // ψ(1 + t + s) expanded: coefficient of t²s is ψ'''(1)/2 = 3.
        assert!((a.eta()[1][0] - 3.0).abs() < 1e-12);
        for (p, q) in a.fibre().iter().zip(b.fibre()) {
            assert!((p - q).abs() < 1e-12);
        }
        assert_eq!(a.base(), b.base());
    }

    #[test]
    fn zero_tangent_maps_to_zero() {
        let f = build_fixture("sphere_stereo").unwrap();
        let base = CurveJet::new(
            CHART_A,
            vec![0.6, 0.8],
            vec![vec![0.0, 1.0], vec![0.3, -0.2]],
        )
        .unwrap();
        let out =
            tangent_transition(f.manifold(), &OsculatingTangent::zero(base), CHART_B).unwrap();
        assert!(out.fibre().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn vertical_shift_is_nilpotent() {
        let ot =
            OsculatingTangent::new(jet(0.0, &[1.0, 2.0]), vec![5.0], vec![vec![6.0], vec![7.0]])
                .unwrap();
        let j1 = vertical_shift_j(&ot);
        assert_eq!(j1.y(), &[0.0]);
        assert_eq!(j1.eta(), &[vec![5.0], vec![6.0]]);
        let j2 = vertical_shift_j(&j1);
        assert_eq!(j2.eta(), &[vec![0.0], vec![5.0]]);
        assert!(vertical_shift_j(&j2).fibre().iter().all(|v| *v == 0.0));
    }
}
