use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use screen_limits::shell::scenario::{self, OutputSpec};
use screen_limits::shell::{self, Format, Kind, Scenario};
use screen_limits::{Error, Result};

#[derive(Parser)]
#[command(name = "screen-limits", version, about = "False-alert limits of threshold-based screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson tail with Chernoff and Robbins bounds.
    Tail(ScenarioArgs),
    /// System false-alert probability for one configuration.
    System(ScenarioArgs),
    /// System risk along n = sqrt(lambda) exp(alpha lambda D).
    PhaseScan(ScenarioArgs),
    /// Failure time under exponential data growth.
    Lifetime(ScenarioArgs),
    /// Per-group risk and dominance for a heterogeneous population.
    Cohort(ScenarioArgs),
    /// PPV, FDR and evidential regime.
    Bayes(ScenarioArgs),
    /// Correlation-adjusted exponent and critical population.
    Effdim(ScenarioArgs),
    /// Monte Carlo estimate against the analytic value.
    Simulate(ScenarioArgs),
    /// Write the four phase-transition panel datasets.
    Figures {
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        /// Monte Carlo replications per point of panel (a).
        #[arg(long, default_value_t = 5000)]
        runs: u64,
        /// Base seed; point i of panel (a) uses seed + i.
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
    /// Recompute the worked-example registry; exits nonzero on any failure.
    Golden {
        #[arg(long, default_value = "golden.csv")]
        out: PathBuf,
        /// Multiplier applied to every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; without it, and without [output] in the config, the table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    /// Parameter override, `key=value` with a TOML value; repeatable.
    #[arg(long = "param", short = 'P')]
    params: Vec<String>,
    /// Monte Carlo replications (simulate only).
    #[arg(long)]
    runs: Option<u64>,
    /// Base seed (simulate only).
    #[arg(long)]
    seed: Option<u64>,
    /// Lifetime failure constant: the corrected time solves n q = level.
    #[arg(long)]
    criterion_level: Option<f64>,
}

fn build(kind: Kind, args: ScenarioArgs) -> Result<Scenario> {
    let mut s = match &args.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::inline(kind),
    };
    if s.kind != kind {
        return Err(Error::Schema(format!("config has kind {}, subcommand expects {kind}", s.kind)));
    }
    for p in &args.params {
        s.set_param(p)?;
    }
    if let Some(runs) = args.runs {
        s.set_value("runs", i64::try_from(runs).map_err(|_| Error::Schema("runs too large".into()))?);
    }
    if let Some(seed) = args.seed {
        s.set_value("seed", i64::try_from(seed).map_err(|_| Error::Schema("seed too large".into()))?);
    }
    if let Some(level) = args.criterion_level {
        s.set_value("criterion_level", level);
    }
    let format = args.format.as_deref().map(str::parse::<Format>).transpose()?;
    match (args.out, &mut s.output) {
        (Some(path), Some(out)) => out.path = path,
        (Some(path), None) => s.output = Some(OutputSpec { path, format: Format::Csv }),
        (None, _) => {}
    }
    if let (Some(f), Some(out)) = (format, &mut s.output) {
        out.format = f;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (kind, args) = match cli.command {
        Command::Tail(a) => (Kind::Tail, a),
        Command::System(a) => (Kind::System, a),
        Command::PhaseScan(a) => (Kind::Phase, a),
        Command::Lifetime(a) => (Kind::Lifetime, a),
        Command::Cohort(a) => (Kind::Cohort, a),
        Command::Bayes(a) => (Kind::Bayes, a),
        Command::Effdim(a) => (Kind::Effdim, a),
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Figures { out, runs, seed } => {
            let manifest = shell::figure_panels(&out, runs, seed)?;
            for p in manifest.panels {
                eprintln!("wrote {} ({} rows, sha256 {})", out.join(&p.file).display(), p.rows, p.sha256);
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Golden { out, tolerance_scale } => {
            let report = shell::worked_examples(&out, tolerance_scale)?;
            let passed = report.rows.len() - report.failures.len();
            eprintln!("wrote {}: {passed}/{} rows pass", out.display(), report.rows.len());
            if report.all_pass() {
                return Ok(ExitCode::SUCCESS);
            }
            eprintln!("golden failures: {}", report.failures.join(","));
            return Ok(ExitCode::FAILURE);
        }
    };
    let format = args.format.as_deref().map(str::parse::<Format>).transpose()?;
    let s = build(kind, args)?;
    if s.output.is_some() {
        let manifest = shell::run_scenario(&s)?;
        eprintln!("wrote {} (sha256 {})", manifest.output.display(), manifest.sha256);
    } else {
        let (table, _) = scenario::prepare(&s)?;
        let bytes = table.encode(format.unwrap_or_default());
        std::io::stdout().write_all(&bytes).map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={} exit={} message={message:?}", e.kind(), e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
