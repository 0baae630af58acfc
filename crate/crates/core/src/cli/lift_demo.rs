use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::sampling::{random_jet, rng_for, sweep};
use super::{tolerance_table, CheckRecord, Comparison, RunConfig, SuiteReport};
use crate::atlas::FixtureKind;
use crate::connection::ConnectionComponents;
use crate::error::Result;
use crate::lifts::{lagrangian_lift, metric_lift, EnergyLagrangian, Lagrangian};
use crate::linearize::trivialize;
use crate::osculating::natural_transition;

/// Lifted values of one sampled jet in the primary chart and, when the
/// fixture has one, in its partner chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftRow {
    pub sample: usize,
    pub metric_lift: f64,
    pub metric_lift_partner: Option<f64>,
    pub lagrangian_lift: f64,
    pub lagrangian_lift_partner: Option<f64>,
    /// `Σ_i |z_i|²`, the flat slot-wise sum.
    pub slot_sum: f64,
    /// `L(x, ξ_1)`.
    pub base_lagrangian: f64,
}

impl LiftRow {
    pub(super) fn csv_header() -> String {
        "sample,metric_lift,metric_lift_partner,lagrangian_lift,lagrangian_lift_partner,slot_sum,base_lagrangian\n".into()
    }

    pub(super) fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{},{:e},{},{:e},{},{:e},{:e}",
            self.sample,
            self.metric_lift,
            opt(self.metric_lift_partner),
            self.lagrangian_lift,
            opt(self.lagrangian_lift_partner),
            self.slot_sum,
            self.base_lagrangian
        );
        s
    }
}

const CHECKS: &[(&str, &str, f64, Comparison)] = &[
    (
        "lift-metric-invariance",
        "Riemannian metric on T^kM",
        1e-9,
        Comparison::AtMost,
    ),
    (
        "lift-lagrangian-invariance",
        "nondegenerate Lagrangian of order k",
        1e-9,
        Comparison::AtMost,
    ),
    (
        "lift-flat-slot-sum",
        "Riemannian metric on T^kM",
        1e-13,
        Comparison::AtMost,
    ),
    (
        "lift-first-order",
        "nondegenerate Lagrangian of order k",
        1e-13,
        Comparison::AtMost,
    ),
];

/// Tabulates `G^k(j, j)` and `L^k(j)` for the energy Lagrangian on sampled
/// jets, with cross-chart residuals.
pub fn run_lift_demo(cfg: &RunConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let f = cfg.build_fixture()?;
    let defaults: Vec<(&str, f64)> = CHECKS.iter().map(|c| (c.0, c.2)).collect();
    let tols = tolerance_table(&defaults, &cfg.tolerances)?;
    let mut mc = ConnectionComponents::induce(f.connection(), cfg.order)?;
    if cfg.negative_control {
        mc = mc.with_level_scaled(2, 1.1)?;
    }
    let m = f.manifold();
    let metric = f.metric();
    let energy = EnergyLagrangian {
        metric: metric.clone(),
    };
    let partner = f.partner_chart();
    let mut rng = rng_for(cfg.seed, 0);
    let jets: Vec<_> = (0..cfg.samples)
        .map(|_| random_jet(&mut rng, &f, cfg.order))
        .collect();
    let indexed: Vec<(usize, &crate::jets::CurveJet)> = jets.iter().enumerate().collect();

    let rows: Vec<Result<LiftRow>> = {
        use rayon::prelude::*;
        indexed
            .par_iter()
            .map(|&(sample, j)| {
                let moved = partner.map(|b| natural_transition(m, j, b)).transpose()?;
                let lv = trivialize(&mc, j)?;
                Ok(LiftRow {
                    sample,
                    metric_lift: metric_lift(metric, &mc, j, j)?,
                    metric_lift_partner: moved
                        .as_ref()
                        .map(|p| metric_lift(metric, &mc, p, p))
                        .transpose()?,
                    lagrangian_lift: lagrangian_lift(&energy, &mc, j)?,
                    lagrangian_lift_partner: moved
                        .as_ref()
                        .map(|p| lagrangian_lift(&energy, &mc, p))
                        .transpose()?,
                    slot_sum: lv.z().iter().flatten().map(|v| v * v).sum(),
                    base_lagrangian: energy.value(j.chart(), j.x(), &j.xi()[0])?,
                })
            })
            .collect()
    };
    let rows: Vec<LiftRow> = rows.into_iter().collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut push = |id: &str, values: (Vec<f64>, Option<String>)| {
        let &(_, anchor, _, cmp) = CHECKS.iter().find(|c| c.0 == id).expect("registered check");
        records.push(CheckRecord::new(
            id, anchor, &values.0, tols[id], cmp, values.1,
        ));
    };
    if partner.is_some() {
        push(
            "lift-metric-invariance",
            sweep(&rows, |r| {
                Ok((r.metric_lift - r.metric_lift_partner.unwrap_or(f64::NAN)).abs())
            }),
        );
        push(
            "lift-lagrangian-invariance",
            sweep(&rows, |r| {
                Ok((r.lagrangian_lift - r.lagrangian_lift_partner.unwrap_or(f64::NAN)).abs())
            }),
        );
    }
    if f.kind() == FixtureKind::FlatPoly {
        push(
            "lift-flat-slot-sum",
            sweep(&rows, |r| Ok((r.metric_lift - r.slot_sum).abs())),
        );
    }
    if cfg.order == 1 {
        push(
            "lift-first-order",
            sweep(&rows, |r| Ok((r.lagrangian_lift - r.base_lagrangian).abs())),
        );
    }
    Ok(SuiteReport::new(
        "lift-demo",
        cfg,
        records,
        rows,
        start.elapsed().as_secs_f64(),
    ))
}
