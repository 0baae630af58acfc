use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetbundle::cli::{run_lift_demo, run_verify, OutputFormat, RunConfig, FIXTURE_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "jetbundle",
    version,
    about = "Property checks for higher-order tangent bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full property suite on a fixture.
    Verify(RunArgs),
    /// Tabulate lifted metric and Lagrangian values with cross-chart residuals.
    LiftDemo(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tree,
    Table,
}

#[derive(Args)]
struct RunArgs {
    /// flat_poly, exp_metric_1d or sphere_stereo.
    #[arg(long, default_value = "flat_poly")]
    fixture: String,
    /// Highest jet order k.
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Samples per check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance override, `check-id=value`; repeatable.
    #[arg(long = "tol", value_name = "CHECK=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[arg(long, value_enum, default_value = "tree")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corrupt the second connection component to exercise failure paths.
    #[arg(long)]
    negative_control: bool,
    /// Directory with `<fixture>.conf` parameter files.
    #[arg(long, env = FIXTURE_DIR_ENV)]
    fixture_dir: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CHECK=VALUE, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|_| format!("invalid tolerance `{v}`"))?;
    if v.is_nan() || v < 0.0 {
        return Err(format!("tolerance must be non-negative, got {v}"));
    }
    Ok((k.to_string(), v))
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            fixture: a.fixture,
            order: a.order,
            samples: a.samples,
            seed: a.seed,
            tolerances: a.tol.into_iter().collect::<BTreeMap<_, _>>(),
            format: match a.format {
                Format::Tree => OutputFormat::Tree,
                Format::Table => OutputFormat::Table,
            },
            out: a.out,
            negative_control: a.negative_control,
            fixture_dir: a.fixture_dir,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, demo): (RunConfig, bool) = match cli.command {
        Command::Verify(a) => (a.into(), false),
        Command::LiftDemo(a) => (a.into(), true),
    };
    let report = if demo {
        run_lift_demo(&cfg)
    } else {
        run_verify(&cfg)
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id.as_str())
        .collect();
    if failed.is_empty() {
        eprintln!("{}: {} checks passed", report.fixture, report.checks.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("{}: failed checks: {}", report.fixture, failed.join(", "));
        ExitCode::from(1)
    }
}
