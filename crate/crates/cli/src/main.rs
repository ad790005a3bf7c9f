//! `finsler`: run the identity suites, inspect tensors at points, list the
//! special cases and print the process diagram.

mod tensors;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use finsler_core::cases;
use finsler_core::config::{parse_points, Config};
use finsler_core::verify::{
    run_all, run_suites, CheckReport, Report, RunOptions, Tolerances, Verdict,
};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "finsler",
    version,
    about = "Check generalized quarter-symmetric Finsler connections numerically"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration; the bundled default is used when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the sampling seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// File of points, one `x1 .. xn y1 .. yn` row per line, used instead of sampling.
    #[arg(long, global = true, value_name = "FILE")]
    points: Option<PathBuf>,
    /// Override a tolerance, e.g. `--tolerance bianchi=1e-9`. Repeatable.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VAL", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Perturb one connection coefficient; every suite must then fail.
    #[arg(long, global = true)]
    fuzz: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tensors of the Cartan and generalized connections at each point.
    Report {
        /// Metric name from the configuration (default: the first one).
        #[arg(long)]
        metric: Option<String>,
        /// Parameter entry name (default: the first one).
        #[arg(long)]
        params: Option<String>,
    },
    /// Run every suite; exit status 0 iff all pass.
    Check,
    /// Case catalog with residuals per metric.
    Cases {
        /// Show a single case.
        #[arg(long)]
        id: Option<usize>,
    },
    /// Residuals of the process diagram arrows.
    Diagram,
    /// Print the default configuration.
    Init {
        /// Start from the three-dimensional sample metrics.
        #[arg(long)]
        three: bool,
    },
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VAL, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("tolerance `{name}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Dispatch; `Ok(false)` means a check ran and failed.
fn run(cli: Cli) -> Result<bool> {
    let common = &cli.common;
    if let Command::Init { three } = cli.command {
        let cfg = if three {
            Config::default_config_3d()
        } else {
            Config::default_config()
        };
        emit(common.out.as_deref(), &cfg.to_toml())?;
        return Ok(true);
    }
    let cfg = load_config(common)?;
    let opts = run_options(common, &cfg)?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.clone().map(PathBuf::from));
    match cli.command {
        Command::Report { metric, params } => {
            let doc = tensors::report(&cfg, metric.as_deref(), params.as_deref(), &opts)?;
            emit(out.as_deref(), &to_json(&doc))?;
            Ok(true)
        }
        Command::Check => {
            let report = run_all(&cfg, &opts)?;
            summarize(&report);
            emit(out.as_deref(), &report.to_json())?;
            Ok(report.passed)
        }
        Command::Cases { id } => {
            let doc = case_table(&cfg, &opts, id)?;
            for row in &doc.rows {
                eprintln!("{}", row.line());
            }
            emit(out.as_deref(), &to_json(&doc))?;
            Ok(doc.passed)
        }
        Command::Diagram => {
            let report = run_suites(&cfg, &opts, &["diagram"])?;
            summarize(&report);
            emit(out.as_deref(), &report.to_json())?;
            Ok(report.passed)
        }
        Command::Init { .. } => unreachable!("handled above"),
    }
}

fn load_config(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Config::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Config::default_config(),
    };
    if let Some(seed) = common.seed {
        cfg.sample.seed = seed;
    }
    for (name, value) in &common.tolerances {
        cfg.tolerances.insert(name.clone(), *value);
    }
    Tolerances::with_overrides(&cfg.tolerances)?;
    cfg.validate()?;
    Ok(cfg)
}

fn run_options(common: &Common, cfg: &Config) -> Result<RunOptions> {
    let points = match &common.points {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let pts = parse_points(&text, cfg.dimension)
                .with_context(|| format!("in {}", path.display()))?;
            if pts.is_empty() {
                bail!("{} holds no points", path.display());
            }
            Some(pts)
        }
        None => None,
    };
    Ok(RunOptions {
        fuzz: common.fuzz,
        points,
    })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{text}") {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.context("writing to standard output"),
            }
        }
    }
}

/// One line per suite and metric on standard error, plus failing rows.
fn summarize(report: &Report) {
    for s in &report.suites {
        let mark = if s.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "{mark} {:<10} {:<12} {} rows",
            s.suite,
            s.metric,
            s.rows.len()
        );
        for row in s.failures() {
            eprintln!(
                "     {} [{}]: {:e} >= {:e}",
                row.label,
                row.params.as_deref().unwrap_or("-"),
                row.residual,
                row.tolerance.unwrap_or(f64::NAN)
            );
        }
    }
    eprintln!(
        "{}",
        if report.passed {
            "all suites passed"
        } else {
            "some suites failed"
        }
    );
}

#[derive(Serialize)]
struct CaseRow {
    id: usize,
    metric: String,
    family: &'static str,
    constraints: &'static str,
    source: &'static str,
    typo: bool,
    convention_dependent: bool,
    residual: f64,
    tolerance: Option<f64>,
    verdict: Verdict,
    printed_residual: Option<f64>,
}

impl CaseRow {
    fn line(&self) -> String {
        let mut flags = String::new();
        if self.typo {
            flags.push_str(" [printed form has a slip]");
        }
        if self.convention_dependent {
            flags.push_str(" [Ricci convention]");
        }
        let printed = self
            .printed_residual
            .map_or(String::new(), |p| format!(", printed {p:.1e}"));
        format!(
            "{:?} case {:>2} {:<12} {:.1e}{printed}  {}{flags}",
            self.verdict, self.id, self.metric, self.residual, self.source
        )
    }
}

#[derive(Serialize)]
struct CaseTable {
    rows: Vec<CaseRow>,
    passed: bool,
}

fn case_table(cfg: &Config, opts: &RunOptions, id: Option<usize>) -> Result<CaseTable> {
    let ids: Vec<usize> = match id {
        Some(id) => {
            cases::info(id)?;
            vec![id]
        }
        None => (1..=cases::CASE_COUNT).collect(),
    };
    let report = run_suites(cfg, opts, &["cases"])?;
    let mut rows = Vec::new();
    for s in &report.suites {
        for &id in &ids {
            rows.push(case_row(s, id)?);
        }
    }
    let passed = rows.iter().all(|r| r.verdict != Verdict::Fail);
    Ok(CaseTable { rows, passed })
}

fn case_row(s: &CheckReport, id: usize) -> Result<CaseRow> {
    let info = cases::info(id)?;
    let label = format!("case {id}");
    let row = s
        .rows
        .iter()
        .find(|r| r.label == label)
        .with_context(|| format!("case {id} missing from the {} report", s.metric))?;
    let printed = format!("{label} printed form");
    Ok(CaseRow {
        id,
        metric: s.metric.clone(),
        family: info.family,
        constraints: info.constraints,
        source: info.source,
        typo: info.typo,
        convention_dependent: info.convention_dependent,
        residual: row.residual,
        tolerance: row.tolerance,
        verdict: row.verdict,
        printed_residual: s
            .rows
            .iter()
            .find(|r| r.label == printed)
            .map(|r| r.residual),
    })
}
