//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use jetbundle::atlas::{Fixture, FixtureKind, FixtureParams};
use jetbundle::cli::{run_lift_demo, run_verify, OutputFormat, RunConfig, SuiteReport};
use jetbundle::connection::ConnectionComponents;
use jetbundle::jets::CurveJet;
use jetbundle::linearize::{
    block_linear_transition, detrivialize, linear_transition, trivialize, LinearizedVector,
};
use jetbundle::osculating::{tangent_transition, tangent_transition_dual, OsculatingTangent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn config(fixture: &str, order: usize, dir: Option<&PathBuf>) -> RunConfig {
    RunConfig {
        fixture: fixture.into(),
        order,
        samples: 100,
        seed: 20240611,
        fixture_dir: dir.cloned(),
        ..RunConfig::default()
    }
}

/// Fixture variants: name, config directory (for the alternate dimensions).
struct Variants {
    runs: Vec<(String, SuiteReport)>,
}

impl Variants {
    fn reports(&self) -> impl Iterator<Item = &(String, SuiteReport)> {
        self.runs.iter()
    }

    fn get(&self, label: &str) -> &SuiteReport {
        &self
            .runs
            .iter()
            .find(|(l, _)| l == label)
            .expect("variant")
            .1
    }
}

/// Worst residual of `id` over `reports`; every report must contain it and pass.
fn gather<'a>(reports: impl Iterator<Item = (&'a str, &'a SuiteReport)>, id: &str) -> Outcome {
    let mut passed = true;
    let mut worst: f64 = 0.0;
    let mut tol = f64::NAN;
    let mut seen = Vec::new();
    for (label, r) in reports {
        match r.check(id) {
            Some(c) => {
                passed &= c.passed;
                worst = if c.max_residual.is_nan() {
                    f64::NAN
                } else {
                    worst.max(c.max_residual)
                };
                tol = c.tolerance;
                seen.push(label.to_string());
            }
            None => {
                passed = false;
                seen.push(format!("{label}(missing)"));
            }
        }
    }
    Outcome {
        passed,
        detail: format!("{id}: max {worst:e} vs {tol:e} [{}]", seen.join(", ")),
    }
}

fn all(outcomes: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: outcomes.iter().all(|o| o.passed),
        detail: outcomes
            .into_iter()
            .map(|o| o.detail)
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn fixture_variants() -> Vec<(&'static str, Fixture)> {
    use FixtureKind::*;
    let make = |kind, edit: fn(&mut FixtureParams)| {
        let mut p = FixtureParams::defaults(kind);
        edit(&mut p);
        Fixture::new(kind, p).expect("fixture")
    };
    vec![
        ("flat_poly/1d", make(FlatPoly, |_| {})),
        ("flat_poly/2d", make(FlatPoly, |p| p.dim = 2)),
        ("exp_metric_1d/c=1", make(ExpMetric1d, |_| {})),
        ("exp_metric_1d/c=-0.6", make(ExpMetric1d, |p| p.c = -0.6)),
        ("sphere_stereo/2d", make(SphereStereo, |_| {})),
        ("sphere_stereo/1d", make(SphereStereo, |p| p.dim = 1)),
    ]
}

fn levels(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
}

/// Unscaled residuals computed directly against the library, 100 samples per
/// order and fixture; `probe` returns the absolute error of one sample.
fn absolute<F>(label: &str, tol: f64, fixtures: &[(&str, Fixture)], probe: F) -> Outcome
where
    F: Fn(
        &Fixture,
        &ConnectionComponents<jetbundle::atlas::LeviCivita<jetbundle::atlas::FixtureMetric>>,
        &mut ChaCha8Rng,
        usize,
    ) -> f64,
{
    let mut worst = 0.0f64;
    for (i, (_, f)) in fixtures.iter().enumerate() {
        let mc = ConnectionComponents::induce(f.connection(), 5).expect("components");
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE55 + i as u64);
        for k in 1..=5 {
            for _ in 0..100 {
                let r = probe(f, &mc, &mut rng, k);
                worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
            }
        }
    }
    Outcome {
        passed: worst <= tol,
        detail: format!("{label} (unscaled): max {worst:e} vs {tol:e}"),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let tmp = std::env::temp_dir().join(format!("jetbundle-acceptance-{}", std::process::id()));
    let alt = tmp.join("alt");
    std::fs::create_dir_all(&alt).expect("temp dir");
    std::fs::write(alt.join("flat_poly.conf"), "dim = 2\n").expect("config");
    std::fs::write(alt.join("sphere_stereo.conf"), "dim = 1\n").expect("config");
    std::fs::write(alt.join("exp_metric_1d.conf"), "c = -0.6\n").expect("config");

    let variant_specs: Vec<(&str, &str, Option<&PathBuf>)> = vec![
        ("flat_poly/1d", "flat_poly", None),
        ("flat_poly/2d", "flat_poly", Some(&alt)),
        ("exp_metric_1d/c=1", "exp_metric_1d", None),
        ("exp_metric_1d/c=-0.6", "exp_metric_1d", Some(&alt)),
        ("sphere_stereo/2d", "sphere_stereo", None),
        ("sphere_stereo/1d", "sphere_stereo", Some(&alt)),
    ];
    let run =
        |f: &str, k: usize, d: Option<&PathBuf>| run_verify(&config(f, k, d)).expect("suite runs");
    let k5 = Variants {
        runs: variant_specs
            .iter()
            .map(|(l, f, d)| (l.to_string(), run(f, 5, *d)))
            .collect(),
    };
    let k3 = Variants {
        runs: variant_specs
            .iter()
            .map(|(l, f, d)| (l.to_string(), run(f, 3, *d)))
            .collect(),
    };
    let negative = RunConfig {
        negative_control: true,
        ..config("sphere_stereo", 5, None)
    };
    let negative_report = run_verify(&negative).expect("suite runs");
    let negative3 = run_verify(&RunConfig {
        negative_control: true,
        ..config("sphere_stereo", 3, None)
    })
    .expect("suite runs");

    let every = |v: &Variants, id: &str| gather(v.reports().map(|(l, r)| (l.as_str(), r)), id);
    let charted = |v: &Variants, id: &str| {
        gather(
            v.reports()
                .filter(|(l, _)| !l.starts_with("exp_metric"))
                .map(|(l, r)| (l.as_str(), r)),
            id,
        )
    };
    let sphere = |v: &Variants, id: &str| {
        gather(
            v.reports()
                .filter(|(l, _)| l.starts_with("sphere"))
                .map(|(l, r)| (l.as_str(), r)),
            id,
        )
    };
    let exceeds = |r: &SuiteReport, id: &str, bound: f64| {
        let c = r.check(id).expect("negative-control check present");
        Outcome {
            passed: !c.passed && c.max_residual > bound,
            detail: format!("negative control {id}: {:e} > {bound:e}", c.max_residual),
        }
    };

    let fixtures = fixture_variants();
    let spheres: Vec<(&str, Fixture)> = fixtures
        .iter()
        .filter(|(l, _)| l.starts_with("sphere"))
        .cloned()
        .collect();
    let charted_fixtures: Vec<(&str, Fixture)> = fixtures
        .iter()
        .filter(|(_, f)| f.partner_chart().is_some())
        .cloned()
        .collect();
    let block_abs = absolute("block-linearity", 1e-9, &spheres, |f, mc, rng, k| {
        let x = f.sample_base_point(rng);
        let lv = LinearizedVector::new(f.primary_chart(), x, levels(rng, f.dim(), k)).unwrap();
        let target = f.partner_chart().unwrap();
        let honest = linear_transition(f.manifold(), mc, &lv, target).unwrap();
        let block = block_linear_transition(f.manifold(), &lv, target).unwrap();
        abs_diff(&honest.fibre(), &block.fibre()).max(abs_diff(honest.x(), block.x()))
    });
    let bijective_abs = absolute("bijectivity", 1e-12, &fixtures, |f, mc, rng, k| {
        let x = f.sample_base_point(rng);
        let jet = CurveJet::new(f.primary_chart(), x.clone(), levels(rng, f.dim(), k)).unwrap();
        let back = detrivialize(mc, &trivialize(mc, &jet).unwrap()).unwrap();
        let lv = LinearizedVector::new(f.primary_chart(), x, levels(rng, f.dim(), k)).unwrap();
        let again = trivialize(mc, &detrivialize(mc, &lv).unwrap()).unwrap();
        abs_diff(&back.flatten(), &jet.flatten()).max(abs_diff(&again.fibre(), &lv.fibre()))
    });
    let tangent_abs = absolute(
        "tangent-transition",
        1e-10,
        &charted_fixtures,
        |f, _, rng, k| {
            let n = f.dim();
            let x = f.sample_base_point(rng);
            let base = CurveJet::new(f.primary_chart(), x, levels(rng, n, k)).unwrap();
            let y = levels(rng, n, 1).remove(0);
            let ot = OsculatingTangent::new(base, y, levels(rng, n, k)).unwrap();
            let target = f.partner_chart().unwrap();
            let series = tangent_transition(f.manifold(), &ot, target).unwrap();
            let dual = tangent_transition_dual(f.manifold(), &ot, target).unwrap();
            abs_diff(&series.fibre(), &dual.fibre())
                .max(abs_diff(&series.base().flatten(), &dual.base().flatten()))
        },
    );

    let mut criteria: Vec<(&str, Outcome)> = vec![
        (
            "chain-rule oracle equivalence",
            all(vec![
                every(&k5, "chain-rule"),
                charted(&k5, "chain-rule-transition"),
            ]),
        ),
        (
            "block-linearity of trivialized transitions",
            all(vec![
                sphere(&k5, "block-linearity"),
                block_abs,
                sphere(&k5, "fibre-linearity"),
                exceeds(&negative_report, "block-linearity", 1e-3),
            ]),
        ),
        (
            "trivialization bijectivity",
            all(vec![every(&k5, "bijectivity"), bijective_abs]),
        ),
        (
            "connection-map identities",
            all(vec![
                every(&k5, "stage-identities"),
                every(&k5, "horizontal-split"),
            ]),
        ),
        (
            "compatibility of connection components",
            all(vec![
                sphere(&k3, "compatibility"),
                charted(&k3, "compatibility"),
                exceeds(&negative3, "compatibility", 1e-3),
            ]),
        ),
        (
            "tangent transitions, series vs forward mode",
            all(vec![
                charted(&k5, "tangent-transition"),
                charted(&k5, "tangent-linearity"),
                tangent_abs,
            ]),
        ),
        (
            "lifted metric",
            all(vec![
                every(&k5, "metric-lift-symmetry"),
                every(&k5, "metric-lift-positivity"),
                charted(&k5, "metric-lift-invariance"),
            ]),
        ),
        (
            "Lagrangian machinery",
            all(vec![
                every(&k5, "spray"),
                every(&k5, "spray-derivative"),
                charted(&k5, "lagrangian-lift-invariance"),
                every(&k5, "degenerate-detector"),
            ]),
        ),
        (
            "tower consistency",
            all(vec![
                every(&k5, "strong-system"),
                charted(&k5, "thread-commutation"),
                charted(&k5, "thread-transition"),
                every(&k5, "frechet-axioms"),
                every(&k5, "frechet-worked-value"),
                every(&k5, "frechet-monotone"),
            ]),
        ),
    ];

    let determinism = {
        let mut ok = true;
        let mut compared = 0;
        for (f, d) in [
            ("sphere_stereo", None),
            ("flat_poly", Some(&alt)),
            ("exp_metric_1d", None),
        ] {
            let cfg = config(f, 4, d);
            for format in [OutputFormat::Tree, OutputFormat::Table] {
                let a = run_verify(&cfg).expect("suite runs").render_body(format);
                let b = run_verify(&cfg).expect("suite runs").render_body(format);
                let c = run_lift_demo(&cfg).expect("demo runs").render_body(format);
                let e = run_lift_demo(&cfg).expect("demo runs").render_body(format);
                ok &= a == b && c == e;
                compared += 2;
            }
        }
        let sphere_body = k5.get("sphere_stereo/2d").render_body(OutputFormat::Tree);
        let again = run("sphere_stereo", 5, None).render_body(OutputFormat::Tree);
        ok &= sphere_body == again;
        Outcome {
            passed: ok,
            detail: format!("{} report pairs byte-identical", compared + 1),
        }
    };
    criteria.push(("determinism", determinism));

    let _ = std::fs::remove_dir_all(&tmp);
    let mut failed = 0;
    for (i, (name, o)) in criteria.iter().enumerate() {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name} — {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
