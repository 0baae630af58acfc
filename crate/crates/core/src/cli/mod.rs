//! Batch verification runner and lift tabulation behind the `jetbundle`
//! binary.

mod lift_demo;
mod sampling;
mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::atlas::{Fixture, FixtureKind, FixtureParams};
use crate::error::{Error, Result};

pub use lift_demo::{run_lift_demo, LiftRow};
pub use verify::{check_ids, run_verify};

/// Environment variable naming a directory of `<fixture>.conf` files.
pub const FIXTURE_DIR_ENV: &str = "JETBUNDLE_FIXTURE_DIR";

/// Highest jet order the runner accepts.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    /// Nested JSON document.
    #[default]
    Tree,
    /// One CSV row per check.
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(OutputFormat::Tree),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::InvalidArgument(format!(
                "unknown format `{s}` (expected tree or table)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fixture: String,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    /// Per-check tolerance overrides, keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Replace the connection components by ones with `M²` scaled by 1.1.
    pub negative_control: bool,
    /// Directory searched for `<fixture>.conf` parameter overrides.
    pub fixture_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fixture: "flat_poly".into(),
            order: 3,
            samples: 100,
            seed: 42,
            tolerances: BTreeMap::new(),
            format: OutputFormat::Tree,
            out: None,
            negative_control: false,
            fixture_dir: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<FixtureKind> {
        let kind: FixtureKind = self.fixture.parse()?;
        if self.order < 1 || self.order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "order must lie in 1..={MAX_ORDER}, got {}",
                self.order
            )));
        }
        if self.samples < 1 {
            return Err(Error::InvalidArgument(
                "at least one sample is required".into(),
            ));
        }
        if self.negative_control && self.order < 2 {
            return Err(Error::InvalidArgument(
                "the negative control needs order ≥ 2".into(),
            ));
        }
        Ok(kind)
    }

    /// Builds the fixture, applying `<fixture_dir>/<name>.conf` when present.
    pub fn build_fixture(&self) -> Result<Fixture> {
        let kind = self.validate()?;
        if self.negative_control && kind == FixtureKind::ExpMetric1d {
            return Err(Error::InvalidArgument(
                "the negative control needs a fixture with overlapping charts".into(),
            ));
        }
        let mut params = FixtureParams::defaults(kind);
        if let Some(dir) = &self.fixture_dir {
            let path = dir.join(format!("{}.conf", kind.name()));
            if path.is_file() {
                params = FixtureParams::from_file(kind, &path)?;
            }
        }
        Fixture::new(kind, params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    /// Passes when the statistic is at most the tolerance.
    #[serde(rename = "<=")]
    AtMost,
    /// Passes when the statistic is strictly below the tolerance.
    #[serde(rename = "<")]
    Below,
    /// Passes when the statistic strictly exceeds the tolerance.
    #[serde(rename = ">")]
    Exceeds,
}

impl Comparison {
    fn symbol(&self) -> &'static str {
        match self {
            Comparison::AtMost => "<=",
            Comparison::Below => "<",
            Comparison::Exceeds => ">",
        }
    }

    fn holds(&self, value: f64, tol: f64) -> bool {
        match self {
            Comparison::AtMost => value <= tol,
            Comparison::Below => value < tol,
            Comparison::Exceeds => value > tol,
        }
    }
}

/// Outcome of one property sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// Name of the property in the underlying theory.
    pub anchor: String,
    pub samples: usize,
    /// Worst observed statistic (`NaN` if any sample failed to evaluate).
    pub max_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(
        id: &str,
        anchor: &str,
        residuals: &[f64],
        tolerance: f64,
        comparison: Comparison,
        note: Option<String>,
    ) -> Self {
        let max_residual = residuals.iter().fold(f64::NEG_INFINITY, |m, &r| {
            if r.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(r)
            }
        });
        let max_residual = if residuals.is_empty() {
            f64::NAN
        } else {
            max_residual
        };
        let passed =
            note.is_none() && max_residual.is_finite() && comparison.holds(max_residual, tolerance);
        Self {
            id: id.into(),
            anchor: anchor.into(),
            samples: residuals.len(),
            max_residual,
            tolerance,
            comparison,
            passed,
            note,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub command: String,
    pub fixture: String,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub negative_control: bool,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<LiftRow>,
    #[serde(skip)]
    pub timing: Timing,
}

impl SuiteReport {
    fn new(
        command: &str,
        cfg: &RunConfig,
        checks: Vec<CheckRecord>,
        table: Vec<LiftRow>,
        elapsed: f64,
    ) -> Self {
        Self {
            command: command.into(),
            fixture: cfg.fixture.clone(),
            order: cfg.order,
            samples: cfg.samples,
            seed: cfg.seed,
            negative_control: cfg.negative_control,
            passed: checks.iter().all(|c| c.passed),
            checks,
            table,
            timing: Timing {
                elapsed_seconds: elapsed,
            },
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Deterministic rendering without timing information.
    pub fn render_body(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Tree => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Table => {
                let mut s =
                    String::from("id,anchor,samples,max_residual,comparison,tolerance,passed\n");
                for c in &self.checks {
                    let _ = writeln!(
                        s,
                        "{},\"{}\",{},{:e},{},{:e},{}",
                        c.id,
                        c.anchor,
                        c.samples,
                        c.max_residual,
                        c.comparison.symbol(),
                        c.tolerance,
                        c.passed
                    );
                }
                if !self.table.is_empty() {
                    s.push('\n');
                    s.push_str(&LiftRow::csv_header());
                    for r in &self.table {
                        s.push_str(&r.csv_row());
                    }
                }
                s
            }
        }
    }

    /// Body followed by the timing fields.
    pub fn render(&self, format: OutputFormat) -> String {
        let body = self.render_body(format);
        match format {
            OutputFormat::Tree => {
                #[derive(Serialize)]
                struct WithTiming<'a> {
                    #[serde(flatten)]
                    report: &'a SuiteReport,
                    timing: Timing,
                }
                let mut s = serde_json::to_string_pretty(&WithTiming {
                    report: self,
                    timing: self.timing,
                })
                .expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Table => format!(
                "{body}# elapsed_seconds={:.3}\n",
                self.timing.elapsed_seconds
            ),
        }
    }
}

/// Resolves per-check tolerances, rejecting overrides for unknown ids.
fn tolerance_table(
    defaults: &[(&str, f64)],
    overrides: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>> {
    let mut table: BTreeMap<String, f64> =
        defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        match table.get_mut(k) {
            Some(slot) => *slot = *v,
            None => return Err(Error::InvalidArgument(format!("no check named `{k}`"))),
        }
    }
    Ok(table)
}
