use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;

use super::sampling::{
    random_jet, random_linearized, random_tangent, relative_error, rng_for, scaled_diff,
    scaled_scalar, sweep, uniform_vec,
};
use super::{tolerance_table, CheckRecord, Comparison, RunConfig, SuiteReport};
use crate::atlas::{
    metric_invariance_residual, ChartId, Fixture, FixtureMetric, LeviCivita, PolyMap,
};
use crate::connection::{
    compatibility_residual, connection_map_apply, horizontal_projector, ConnectionComponents,
    LinearConnection,
};
use crate::error::{Error, Result};
use crate::faa::pushforward_jet;
use crate::jets::{dual_directional, series_compose_oracle, CurveJet, Series};
use crate::lifts::{
    lagrangian_lift, lagrangian_vector_field, metric_lift, vector_field_fibre_derivative,
    EnergyLagrangian, LinearLagrangian,
};
use crate::linalg::max_abs;
use crate::linearize::{
    block_linear_transition, detrivialize, linear_transition, restrict_order, trivialize,
    LinearizedVector,
};
use crate::osculating::{
    natural_transition, tangent_transition, tangent_transition_dual, vertical_shift_j,
    OsculatingTangent,
};
use crate::tower::{
    frechet_distance, strong_system_residual, transition_truncation_residual, JetThread,
    DEFAULT_MAX_ORDER,
};

/// Random polynomial maps drawn by the chain-rule check.
pub const CHAIN_RULE_MAPS: usize = 200;
/// Highest jet order exercised by the chain-rule check.
pub const CHAIN_RULE_MAX_ORDER: usize = 6;
/// Random thread triples drawn by the Fréchet-metric check.
pub const FRECHET_TRIPLES: usize = 1000;

use Comparison::{AtMost, Below};

/// `(id, anchor, default tolerance, comparison)`; the position doubles as the
/// check's random stream.
const CHECKS: &[(&str, &str, f64, Comparison)] = &[
    ("atlas-round-trip", "inverse transition maps", 1e-12, AtMost),
    (
        "tensor-symmetry",
        "symmetric derivative tensors",
        1e-12,
        AtMost,
    ),
    ("jacobian-dual", "first derivative oracle", 1e-10, AtMost),
    (
        "metric-invariance",
        "local representatives of the metric",
        1e-10,
        AtMost,
    ),
    (
        "christoffel-symmetry",
        "Levi-Civita connection",
        1e-12,
        AtMost,
    ),
    ("chain-rule", "chain rule of order k", 1e-12, AtMost),
    (
        "chain-rule-transition",
        "chain rule of order k",
        1e-12,
        AtMost,
    ),
    (
        "tangent-transition",
        "transformation rule of natural charts",
        1e-10,
        AtMost,
    ),
    (
        "tangent-linearity",
        "transformation rule of natural charts",
        1e-11,
        AtMost,
    ),
    ("first-component", "induced connection map", 1e-12, AtMost),
    ("stage-identities", "connection map on T^kM", 1e-12, AtMost),
    (
        "horizontal-split",
        "kernel of the connection map",
        1e-12,
        AtMost,
    ),
    ("compatibility", "compatibility condition", 1e-9, AtMost),
    (
        "bijectivity",
        "vector bundle structure, inverse construction",
        1e-12,
        AtMost,
    ),
    ("block-linearity", "vector bundle structure", 1e-9, AtMost),
    ("fibre-linearity", "vector bundle structure", 1e-10, AtMost),
    ("restriction-commutes", "order restriction", 1e-12, AtMost),
    (
        "metric-lift-symmetry",
        "Riemannian metric on T^kM",
        1e-13,
        AtMost,
    ),
    (
        "metric-lift-positivity",
        "Riemannian metric on T^kM",
        0.0,
        Below,
    ),
    (
        "metric-lift-invariance",
        "Riemannian metric on T^kM",
        1e-9,
        AtMost,
    ),
    ("spray", "Lagrangian vector field", 1e-9, AtMost),
    ("spray-derivative", "Lagrangian vector field", 1e-9, AtMost),
    (
        "lagrangian-lift-invariance",
        "nondegenerate Lagrangian of order k",
        1e-9,
        AtMost,
    ),
    ("degenerate-detector", "weakly nondegenerate", 0.5, Below),
    ("strong-system", "strong projective system", 1e-12, AtMost),
    (
        "thread-commutation",
        "strong projective system, thread operators",
        0.0,
        AtMost,
    ),
    (
        "thread-transition",
        "threads of the projective limit",
        1e-12,
        AtMost,
    ),
    ("frechet-axioms", "associated Fréchet metric", 1e-12, AtMost),
    (
        "frechet-worked-value",
        "associated Fréchet metric",
        1e-12,
        AtMost,
    ),
    ("frechet-monotone", "associated Fréchet metric", 0.0, AtMost),
];

/// Check ids known to `verify`, in report order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

type Components = ConnectionComponents<LeviCivita<FixtureMetric>>;

struct Runner<'a> {
    cfg: &'a RunConfig,
    f: Fixture,
    mc: Components,
    tols: std::collections::BTreeMap<String, f64>,
    records: Mutex<Vec<CheckRecord>>,
}

impl Runner<'_> {
    fn rng(&self, id: &str) -> rand_chacha::ChaCha8Rng {
        let stream = CHECKS
            .iter()
            .position(|c| c.0 == id)
            .expect("registered check") as u64;
        rng_for(self.cfg.seed, stream)
    }

    fn record(&self, id: &str, (residuals, note): (Vec<f64>, Option<String>)) {
        let &(_, anchor, _, cmp) = CHECKS.iter().find(|c| c.0 == id).expect("registered check");
        self.records
            .lock()
            .expect("records lock")
            .push(CheckRecord::new(
                id,
                anchor,
                &residuals,
                self.tols[id],
                cmp,
                note,
            ));
    }

    fn k(&self) -> usize {
        self.cfg.order
    }

    fn n(&self) -> usize {
        self.cfg.samples
    }

    /// Jets for every order `1..=k`, `samples` each.
    fn jets_all_orders(&self, id: &str) -> Vec<CurveJet> {
        let mut rng = self.rng(id);
        (1..=self.k())
            .flat_map(|k| (0..self.n()).map(move |_| k))
            .map(|k| random_jet(&mut rng, &self.f, k))
            .collect()
    }

    fn tangents_all_orders(&self, id: &str) -> Vec<OsculatingTangent> {
        let mut rng = self.rng(id);
        let orders: Vec<usize> = (1..=self.k())
            .flat_map(|k| (0..self.n()).map(move |_| k))
            .collect();
        orders
            .into_iter()
            .map(|k| random_tangent(&mut rng, &self.f, k))
            .collect()
    }

    fn linearized_all_orders(&self, id: &str) -> Vec<LinearizedVector> {
        let mut rng = self.rng(id);
        let orders: Vec<usize> = (1..=self.k())
            .flat_map(|k| (0..self.n()).map(move |_| k))
            .collect();
        orders
            .into_iter()
            .map(|k| random_linearized(&mut rng, &self.f, k))
            .collect()
    }

    fn partner(&self) -> Option<ChartId> {
        self.f.partner_chart()
    }

    fn fixture_invariants(&self) {
        let f = &self.f;
        let m = f.manifold();
        let k = self.k();
        let a = f.primary_chart();
        if let Some(b) = self.partner() {
            let pts: Vec<Vec<f64>> = {
                let mut rng = self.rng("atlas-round-trip");
                (0..self.n())
                    .map(|_| f.sample_base_point(&mut rng))
                    .collect()
            };
            let r = sweep(&pts, |x| {
                let y = m.map_point(a, b, x)?;
                Ok(scaled_diff(&m.map_point(b, a, &y)?, x))
            });
            self.record("atlas-round-trip", r);

            let r = sweep(&pts, |x| {
                let y = m.map_point(a, b, x)?;
                let mut worst: f64 = 0.0;
                for (from, to, p) in [(a, b, x.as_slice()), (b, a, y.as_slice())] {
                    for t in m.transition(from, to)?.tensors(p, k + 1)? {
                        worst = worst.max(t.max_asymmetry() / t.max_abs().max(f64::MIN_POSITIVE));
                    }
                }
                Ok(worst)
            });
            self.record("tensor-symmetry", r);

            let mut rng = self.rng("jacobian-dual");
            let probes: Vec<(Vec<f64>, Vec<f64>)> = pts
                .iter()
                .map(|x| (x.clone(), uniform_vec(&mut rng, f.dim())))
                .collect();
            let r = sweep(&probes, |(x, v)| {
                let map = m.transition(a, b)?;
                let exact = map.tensor(1, x)?.apply::<f64>(&[v])?;
                let dual = dual_directional(|u| Ok(map.value_dual(u)), x, v)?;
                Ok(relative_error(&dual, &exact))
            });
            self.record("jacobian-dual", r);

            let mut rng = self.rng("metric-invariance");
            let probes: Vec<[Vec<f64>; 3]> = pts
                .iter()
                .map(|x| {
                    [
                        x.clone(),
                        uniform_vec(&mut rng, f.dim()),
                        uniform_vec(&mut rng, f.dim()),
                    ]
                })
                .collect();
            let r = sweep(&probes, |[x, u, v]| {
                let y = m.map_point(a, b, x)?;
                let jac = m.transition(a, b)?.tensor(1, x)?;
                let (ub, vb) = (jac.apply::<f64>(&[u])?, jac.apply::<f64>(&[v])?);
                let back = metric_invariance_residual(m, f.metric(), b, a, &y, &ub, &vb)?;
                Ok(metric_invariance_residual(m, f.metric(), a, b, x, u, v)?.max(back))
            });
            self.record("metric-invariance", r);
        }

        let mut rng = self.rng("christoffel-symmetry");
        let probes: Vec<[Vec<f64>; 3]> = (0..self.n())
            .map(|_| {
                [
                    f.sample_base_point(&mut rng),
                    uniform_vec(&mut rng, f.dim()),
                    uniform_vec(&mut rng, f.dim()),
                ]
            })
            .collect();
        let gamma = f.connection();
        let charts: Vec<ChartId> = std::iter::once(a).chain(self.partner()).collect();
        let r = sweep(&probes, |[x, u, v]| {
            let mut worst: f64 = 0.0;
            let mut p = x.clone();
            for &c in &charts {
                if c != a {
                    p = m.map_point(a, c, x)?;
                }
                let uv = gamma.christoffel::<f64>(c, &p, u, v)?;
                let vu = gamma.christoffel::<f64>(c, &p, v, u)?;
                worst = worst.max(scaled_diff(&uv, &vu));
            }
            Ok(worst)
        });
        self.record("christoffel-symmetry", r);
    }

    fn chain_rule(&self) {
        let mut rng = self.rng("chain-rule");
        let cases: Vec<(PolyMap, CurveJet)> = (0..CHAIN_RULE_MAPS)
            .map(|i| {
                let din = rng.gen_range(1..=3);
                let dout = rng.gen_range(1..=3);
                let degree = rng.gen_range(1..=4);
                let map = PolyMap::random(&mut rng, din, dout, degree, 6);
                let k = 1 + i % CHAIN_RULE_MAX_ORDER;
                let x = uniform_vec(&mut rng, din);
                let xi = (0..k).map(|_| uniform_vec(&mut rng, din)).collect();
                (
                    map,
                    CurveJet::new(ChartId(0), x, xi).expect("well-formed jet"),
                )
            })
            .collect();
        let r = sweep(&cases, |(map, jet)| {
            let fast = pushforward_jet(map, jet)?.flatten();
            let oracle =
                CurveJet::from_series(jet.chart(), &series_compose_oracle(map, &jet.to_series())?)
                    .flatten();
            let k = jet.order();
            let direct: Vec<Series> = map.eval(&jet.to_series().components());
            let mut direct_flat = Vec::new();
            for i in 0..=k {
                direct_flat.extend(direct.iter().map(|s| s.coeff(i)));
            }
            Ok(relative_error(&fast, &oracle).max(relative_error(&fast, &direct_flat)))
        });
        self.record("chain-rule", r);

        if let Some(b) = self.partner() {
            let jets = self.jets_all_orders("chain-rule-transition");
            let m = self.f.manifold();
            let r = sweep(&jets, |j| {
                let map = m.transition_at(j.chart(), b, j.x())?;
                let fast = pushforward_jet(map, j)?.flatten();
                let oracle = CurveJet::from_series(b, &series_compose_oracle(map, &j.to_series())?)
                    .flatten();
                Ok(relative_error(&fast, &oracle))
            });
            self.record("chain-rule-transition", r);
        }
    }

    fn osculating(&self) {
        let Some(b) = self.partner() else { return };
        let m = self.f.manifold();
        let tangents = self.tangents_all_orders("tangent-transition");
        let r = sweep(&tangents, |ot| {
            let s = tangent_transition(m, ot, b)?;
            let d = tangent_transition_dual(m, ot, b)?;
            Ok(scaled_diff(&s.fibre(), &d.fibre())
                .max(scaled_diff(&s.base().flatten(), &d.base().flatten())))
        });
        self.record("tangent-transition", r);

        let mut rng = self.rng("tangent-linearity");
        let triples: Vec<(OsculatingTangent, OsculatingTangent, f64)> = tangents
            .iter()
            .map(|ot| {
                let k = ot.order();
                let other = OsculatingTangent::new(
                    ot.base().clone(),
                    uniform_vec(&mut rng, self.f.dim()),
                    (0..k)
                        .map(|_| uniform_vec(&mut rng, self.f.dim()))
                        .collect(),
                )
                .expect("well-formed tangent");
                (ot.clone(), other, rng.gen_range(-2.0..=2.0))
            })
            .collect();
        let r = sweep(&triples, |(p, q, c)| {
            let combo = combine(p, q, *c)?;
            let lhs = tangent_transition(m, &combo, b)?.fibre();
            let tp = tangent_transition(m, p, b)?.fibre();
            let tq = tangent_transition(m, q, b)?.fibre();
            let rhs: Vec<f64> = tp.iter().zip(&tq).map(|(u, v)| u + c * v).collect();
            Ok(scaled_diff(&lhs, &rhs))
        });
        self.record("tangent-linearity", r);
    }

    fn connection(&self) {
        let m = self.f.manifold();
        let mc = &self.mc;
        let gamma = self.f.connection();
        let tangents = self.tangents_all_orders("first-component");
        let r = sweep(&tangents, |ot| {
            let j = ot.base();
            let m1 = mc.eval(1, j.chart(), j.x(), j.xi(), ot.y())?;
            let g = gamma.christoffel::<f64>(j.chart(), j.x(), &j.xi()[0], ot.y())?;
            Ok(scaled_diff(&m1, &g))
        });
        self.record("first-component", r);

        let tangents = self.tangents_all_orders("stage-identities");
        let r = sweep(&tangents, |ot| {
            let k = ot.order();
            let base = connection_map_apply(mc, ot)?;
            let mut shifted = ot.clone();
            let mut worst: f64 = 0.0;
            for a in 1..=k {
                shifted = vertical_shift_j(&shifted);
                let stage = connection_map_apply(mc, &shifted)?;
                let want: &[f64] = if a < k { &base[k - a - 1] } else { ot.y() };
                worst = worst.max(scaled_diff(&stage[k - 1], want));
            }
            Ok(worst)
        });
        self.record("stage-identities", r);

        let tangents = self.tangents_all_orders("horizontal-split");
        let r = sweep(&tangents, |ot| {
            let h = horizontal_projector(mc, ot)?;
            let k_h = connection_map_apply(mc, &h)?;
            let again = horizontal_projector(mc, &h)?;
            let vertical: Vec<f64> = ot
                .fibre()
                .iter()
                .zip(h.fibre())
                .map(|(a, b)| a - b)
                .collect();
            let n = self.f.dim();
            let scale = max_abs(&h.fibre()).max(1.0);
            Ok((k_h.iter().fold(0.0f64, |w, v| w.max(max_abs(v))) / scale)
                .max(scaled_diff(&again.fibre(), &h.fibre()))
                .max(max_abs(&vertical[..n])))
        });
        self.record("horizontal-split", r);

        if let Some(b) = self.partner() {
            let tangents = self.tangents_all_orders("compatibility");
            let r = sweep(&tangents, |ot| compatibility_residual(m, mc, ot, b));
            self.record("compatibility", r);
        }
    }

    fn linearize(&self) {
        let m = self.f.manifold();
        let mc = &self.mc;
        let jets = self.jets_all_orders("bijectivity");
        let fibres = self.linearized_all_orders("bijectivity");
        let pairs: Vec<(CurveJet, LinearizedVector)> = jets.into_iter().zip(fibres).collect();
        let r = sweep(&pairs, |(j, lv)| {
            let jj = detrivialize(mc, &trivialize(mc, j)?)?;
            let ll = trivialize(mc, &detrivialize(mc, lv)?)?;
            Ok(scaled_diff(&jj.flatten(), &j.flatten()).max(scaled_diff(&ll.fibre(), &lv.fibre())))
        });
        self.record("bijectivity", r);

        let Some(b) = self.partner() else { return };
        let fibres = self.linearized_all_orders("block-linearity");
        let r =
            sweep(&fibres, |lv| {
                let honest = linear_transition(m, mc, lv, b)?;
                let block = block_linear_transition(m, lv, b)?;
                Ok(scaled_diff(&honest.fibre(), &block.fibre())
                    .max(scaled_diff(honest.x(), block.x())))
            });
        self.record("block-linearity", r);

        let mut rng = self.rng("fibre-linearity");
        let k = self.k();
        let n = self.f.dim();
        let cases: Vec<(LinearizedVector, Vec<Vec<f64>>, f64)> = (0..self.n())
            .map(|_| {
                let lv = random_linearized(&mut rng, &self.f, k);
                let other = (0..k).map(|_| uniform_vec(&mut rng, n)).collect();
                (lv, other, rng.gen_range(-2.0..=2.0))
            })
            .collect();
        let r = sweep(&cases, |(lv, other, c)| {
            let x = lv.x().to_vec();
            let chart = lv.chart();
            let jac = m.transition_at(chart, b, &x)?.tensor(1, &x)?;
            let route = |z: Vec<Vec<f64>>| -> Result<Vec<f64>> {
                Ok(
                    linear_transition(m, mc, &LinearizedVector::new(chart, x.clone(), z)?, b)?
                        .fibre(),
                )
            };
            let mut worst: f64 = 0.0;
            for slot in 0..k {
                for comp in 0..n {
                    let mut z = vec![vec![0.0; n]; k];
                    z[slot][comp] = 1.0;
                    let image = route(z)?;
                    let mut want = vec![0.0; n * k];
                    for r in 0..n {
                        want[slot * n + r] = jac.entry(r, &[comp]);
                    }
                    worst = worst.max(scaled_diff(&image, &want));
                }
            }
            let combo: Vec<Vec<f64>> = lv
                .z()
                .iter()
                .zip(other)
                .map(|(p, q)| p.iter().zip(q).map(|(u, v)| u + c * v).collect())
                .collect();
            let lhs = route(combo)?;
            let (tp, tq) = (route(lv.z().to_vec())?, route(other.clone())?);
            let rhs: Vec<f64> = tp.iter().zip(&tq).map(|(u, v)| u + c * v).collect();
            Ok(worst.max(scaled_diff(&lhs, &rhs)))
        });
        self.record("fibre-linearity", r);

        if k >= 2 {
            let fibres: Vec<LinearizedVector> = {
                let mut rng = self.rng("restriction-commutes");
                (0..self.n())
                    .map(|_| random_linearized(&mut rng, &self.f, k))
                    .collect()
            };
            let r = sweep(&fibres, |lv| {
                let moved = linear_transition(m, mc, lv, b)?;
                let mut worst: f64 = 0.0;
                for lower in 1..k {
                    let a = restrict_order(&moved, lower)?;
                    let c = linear_transition(m, mc, &restrict_order(lv, lower)?, b)?;
                    worst = worst.max(scaled_diff(&a.fibre(), &c.fibre()));
                }
                Ok(worst)
            });
            self.record("restriction-commutes", r);
        }
    }

    fn lifts(&self) {
        let m = self.f.manifold();
        let mc = &self.mc;
        let metric = self.f.metric();
        let k = self.k();
        let n = self.f.dim();
        let mut rng = self.rng("metric-lift-symmetry");
        let pairs: Vec<(CurveJet, CurveJet)> = (0..self.n())
            .map(|_| {
                let a = random_jet(&mut rng, &self.f, k);
                let xi = (0..k).map(|_| uniform_vec(&mut rng, n)).collect();
                let b = CurveJet::new(a.chart(), a.x().to_vec(), xi).expect("well-formed jet");
                (a, b)
            })
            .collect();
        let r = sweep(&pairs, |(a, b)| {
            Ok(scaled_scalar(
                metric_lift(metric, mc, a, b)?,
                metric_lift(metric, mc, b, a)?,
            ))
        });
        self.record("metric-lift-symmetry", r);

        let jets = self.jets_all_orders("metric-lift-positivity");
        let r = sweep(&jets, |j| Ok(-metric_lift(metric, mc, j, j)?));
        self.record("metric-lift-positivity", r);

        let energy = EnergyLagrangian {
            metric: metric.clone(),
        };
        if let Some(b) = self.partner() {
            let r = sweep(&pairs, |(j1, j2)| {
                let (p1, p2) = (natural_transition(m, j1, b)?, natural_transition(m, j2, b)?);
                Ok(scaled_scalar(
                    metric_lift(metric, mc, &p1, &p2)?,
                    metric_lift(metric, mc, j1, j2)?,
                ))
            });
            self.record("metric-lift-invariance", r);
        }

        let gamma = self.f.connection();
        let charts: Vec<ChartId> = std::iter::once(self.f.primary_chart())
            .chain(self.partner())
            .collect();
        let mut rng = self.rng("spray");
        let probes: Vec<[Vec<f64>; 3]> = (0..self.n())
            .map(|_| {
                [
                    self.f.sample_base_point(&mut rng),
                    uniform_vec(&mut rng, n),
                    uniform_vec(&mut rng, n),
                ]
            })
            .collect();
        let a = self.f.primary_chart();
        let at_chart = |c: ChartId, x: &[f64]| {
            if c == a {
                Ok(x.to_vec())
            } else {
                m.map_point(a, c, x)
            }
        };
        let r = sweep(&probes, |[x, y, _]| {
            let mut worst: f64 = 0.0;
            for &c in &charts {
                let p = at_chart(c, x)?;
                let z = lagrangian_vector_field(&energy, c, &p, y)?;
                let g = gamma.christoffel::<f64>(c, &p, y, y)?;
                let minus: Vec<f64> = g.iter().map(|v| -v).collect();
                worst = worst.max(scaled_diff(&z, &minus));
            }
            Ok(worst)
        });
        self.record("spray", r);

        let r = sweep(&probes, |[x, y, w]| {
            let mut worst: f64 = 0.0;
            for &c in &charts {
                let p = at_chart(c, x)?;
                let dz = vector_field_fibre_derivative(&energy, c, &p, y, w)?;
                let g = gamma.christoffel::<f64>(c, &p, y, w)?;
                let twice: Vec<f64> = g.iter().map(|v| -2.0 * v).collect();
                worst = worst.max(scaled_diff(&dz, &twice));
            }
            Ok(worst)
        });
        self.record("spray-derivative", r);

        if let Some(b) = self.partner() {
            let jets = self.jets_all_orders("lagrangian-lift-invariance");
            let r = sweep(&jets, |j| {
                let moved = natural_transition(m, j, b)?;
                Ok(scaled_scalar(
                    lagrangian_lift(&energy, mc, &moved)?,
                    lagrangian_lift(&energy, mc, j)?,
                ))
            });
            self.record("lagrangian-lift-invariance", r);
        }

        let degenerate = LinearLagrangian { dim: n };
        let r = sweep(&probes, |[x, y, _]| {
            Ok(match lagrangian_vector_field(&degenerate, a, x, y) {
                Err(Error::DegenerateLagrangian) => 0.0,
                _ => 1.0,
            })
        });
        self.record("degenerate-detector", r);
    }

    fn tower(&self) {
        let m = self.f.manifold();
        let mc = &self.mc;
        let k = self.k();
        let n = self.f.dim();
        if k >= 2 {
            let jets: Vec<CurveJet> = {
                let mut rng = self.rng("strong-system");
                (0..self.n())
                    .map(|_| random_jet(&mut rng, &self.f, k))
                    .collect()
            };
            let r = sweep(&jets, |j| strong_system_residual(mc, j));
            self.record("strong-system", r);

            if let Some(b) = self.partner() {
                let fibres: Vec<LinearizedVector> = {
                    let mut rng = self.rng("thread-commutation");
                    (0..self.n())
                        .map(|_| random_linearized(&mut rng, &self.f, k))
                        .collect()
                };
                let r = sweep(&fibres, |lv| transition_truncation_residual(m, lv, b));
                self.record("thread-commutation", r);

                let r = sweep(&jets, |j| {
                    let moved = natural_transition(m, j, b)?;
                    let lv = trivialize(mc, j)?;
                    let lmoved = linear_transition(m, mc, &lv, b)?;
                    let mut worst: f64 = 0.0;
                    for lower in 1..k {
                        let p = natural_transition(m, &j.project(lower)?, b)?;
                        worst =
                            worst.max(scaled_diff(&p.flatten(), &moved.project(lower)?.flatten()));
                        let q = linear_transition(m, mc, &restrict_order(&lv, lower)?, b)?;
                        worst = worst.max(scaled_diff(
                            &q.fibre(),
                            &restrict_order(&lmoved, lower)?.fibre(),
                        ));
                    }
                    Ok(worst)
                });
                self.record("thread-transition", r);
            }
        }

        let mut rng = self.rng("frechet-axioms");
        let x = vec![0.0; n];
        let chart = self.f.primary_chart();
        let thread = |rng: &mut rand_chacha::ChaCha8Rng| {
            let scale: f64 = rng.gen_range(0.1..=10.0);
            let coeffs: Vec<Vec<f64>> = (0..DEFAULT_MAX_ORDER)
                .map(|_| uniform_vec(rng, n).into_iter().map(|v| v * scale).collect())
                .collect();
            JetThread::new(chart, x.clone(), DEFAULT_MAX_ORDER, move |i| {
                coeffs.get(i - 1).cloned()
            })
        };
        let triples: Vec<[JetThread; 3]> = (0..FRECHET_TRIPLES)
            .map(|_| [thread(&mut rng), thread(&mut rng), thread(&mut rng)])
            .collect();
        let r = sweep(&triples, |[a, b, c]| {
            let d = |p: &JetThread, q: &JetThread| {
                frechet_distance(p, q, DEFAULT_MAX_ORDER).map(|v| v.partial)
            };
            let tri = (d(a, c)? - d(a, b)? - d(b, c)?).max(0.0);
            let sym = (d(a, b)? - d(b, a)?).abs();
            Ok(tri.max(sym).max(d(a, a)?))
        });
        self.record("frechet-axioms", r);

        let worked: Vec<usize> = (1..=DEFAULT_MAX_ORDER).collect();
        let r = sweep(&worked, |&truncation| {
            let mut e1 = vec![0.0; n];
            e1[0] = 1.0;
            let zero = JetThread::new(chart, vec![0.0; n], DEFAULT_MAX_ORDER, move |_| {
                Some(vec![0.0; n])
            });
            let one = JetThread::new(chart, vec![0.0; n], DEFAULT_MAX_ORDER, move |i| {
                Some(if i == 1 {
                    e1.clone()
                } else {
                    vec![0.0; e1.len()]
                })
            });
            let d = frechet_distance(&zero, &one, truncation)?;
            Ok((d.partial - 0.5 * (1.0 - 0.5f64.powi(truncation as i32))).abs())
        });
        self.record("frechet-worked-value", r);

        let r = sweep(&triples, |[a, b, _]| {
            let mut prev = 0.0;
            let mut worst: f64 = 0.0;
            for truncation in 1..=DEFAULT_MAX_ORDER {
                let d = frechet_distance(a, b, truncation)?.partial;
                worst = worst.max(prev - d).max(d - 1.0);
                prev = d;
            }
            Ok(worst)
        });
        self.record("frechet-monotone", r);
    }
}

/// `p + c·q` over the same base.
fn combine(p: &OsculatingTangent, q: &OsculatingTangent, c: f64) -> Result<OsculatingTangent> {
    let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u + c * v).collect::<Vec<_>>();
    OsculatingTangent::new(
        p.base().clone(),
        add(p.y(), q.y()),
        p.eta()
            .iter()
            .zip(q.eta())
            .map(|(a, b)| add(a, b))
            .collect(),
    )
}

/// Runs every applicable property sweep on the configured fixture.
pub fn run_verify(cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let f = cfg.build_fixture()?;
    let defaults: Vec<(&str, f64)> = CHECKS.iter().map(|c| (c.0, c.2)).collect();
    let tols = tolerance_table(&defaults, &cfg.tolerances)?;
    let mut mc = ConnectionComponents::induce(f.connection(), cfg.order)?;
    if cfg.negative_control {
        mc = mc.with_level_scaled(2, 1.1)?;
    }
    let runner = Runner {
        cfg,
        f,
        mc,
        tols,
        records: Mutex::new(Vec::new()),
    };
    runner.fixture_invariants();
    if runner
        .records
        .lock()
        .expect("records lock")
        .iter()
        .all(|r| r.passed)
    {
        runner.chain_rule();
        runner.osculating();
        runner.connection();
        runner.linearize();
        runner.lifts();
        runner.tower();
    }
    Ok(SuiteReport::new(
        "verify",
        cfg,
        runner.records.into_inner().expect("records lock"),
        Vec::new(),
        start.elapsed().as_secs_f64(),
    ))
}
