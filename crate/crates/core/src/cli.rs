//! `ppc` command-line interface.
//!
//! Exit codes: 0 success, 1 verification or validation failure (with a JSON
//! error object on stderr), 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Error;
use crate::scenario::Scenario;
use crate::selftest;
use crate::shift::ShiftFunction;
use crate::sim::summarize_metrics;

#[derive(Debug, Parser)]
#[command(name = "ppc", version, about = "Prescribed performance control simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario, write the trace CSV and print metrics JSON.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate scenarios and check the compliance clauses; exit 0 iff all pass.
    Verify {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Number of scenarios run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the shift-function, envelope and transform property suites.
    Selftest,
    /// Tabulate mu and mu' over [0, T].
    MuTable {
        support: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = crate::shift::DEFAULT_GRID_SIZE)]
        grid: usize,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
}

fn error_json(err: &Error, source: Option<&Path>) -> Value {
    let mut v = match err {
        Error::InvalidScenario { field, reason } => json!({"error": "validation", "field": field, "message": reason}),
        Error::InvalidParameter { name, reason } => json!({"error": "validation", "field": name, "message": reason}),
        Error::Parse(e) => json!({"error": "parse", "message": e.to_string()}),
        Error::Violation(v) => json!({"error": "violation", "message": err.to_string(), "violation": v}),
        Error::Io(e) => json!({"error": "io", "message": e.to_string()}),
        Error::Csv(e) => json!({"error": "io", "message": e.to_string()}),
    };
    if let Some(p) = source {
        v["scenario"] = json!(p.display().to_string());
    }
    v
}

fn fail(err: &mut dyn Write, e: &Error, source: Option<&Path>) -> i32 {
    let _ = writeln!(err, "{}", error_json(e, source));
    1
}

fn write_trace(path: &Path, trace: &crate::sim::SimulationTrace) -> Result<(), Error> {
    trace.write_csv(BufWriter::new(File::create(path)?))
}

fn simulate(path: &Path, csv: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let sim = match Scenario::from_path(path).and_then(|s| s.build()) {
        Ok(sim) => sim,
        Err(e) => return fail(err, &e, Some(path)),
    };
    let trace = sim.run();
    if let Err(e) = write_trace(csv, &trace) {
        return fail(err, &e, Some(path));
    }
    let metrics = summarize_metrics(&trace);
    let _ = writeln!(out, "{}", json!({"scenario": path.display().to_string(), "metrics": metrics}));
    match trace.aborted {
        Some(v) => fail(err, &Error::Violation(v), Some(path)),
        None => 0,
    }
}

fn verify_one(path: &Path) -> Result<Value, Error> {
    let scenario = Scenario::from_path(path)?;
    let (trace, report) = scenario.verify()?;
    Ok(json!({
        "scenario": path.display().to_string(),
        "passed": report.passed(),
        "report": report,
        "metrics": summarize_metrics(&trace),
    }))
}

fn verify(paths: &[PathBuf], jobs: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let run = || paths.par_iter().map(|p| verify_one(p)).collect::<Vec<_>>();
    let results = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => paths.iter().map(|p| verify_one(p)).collect(),
    };
    let mut code = 0;
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok(v) => {
                if v["passed"] != json!(true) {
                    code = 1;
                }
                let _ = writeln!(out, "{v}");
            }
            Err(e) => code = fail(err, &e, Some(path)),
        }
    }
    code
}

fn run_selftest(out: &mut dyn Write) -> i32 {
    let results = selftest::run_all();
    let mut code = 0;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {} ({} checks, {:.3} s)", r.name, r.checks, r.elapsed_s);
        for f in &r.failures {
            let _ = writeln!(out, "    {f}");
        }
        if !r.passed {
            code = 1;
        }
    }
    code
}

fn mu_table(support: f64, grid: usize, samples: usize, path: &Path) -> Result<(), Error> {
    if samples < 2 {
        return Err(Error::param("samples", "need at least 2 samples"));
    }
    let sf = ShiftFunction::new(support, grid)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["t", "mu", "mu_dot"])?;
    for k in 0..samples {
        let t = support * k as f64 / (samples - 1) as f64;
        w.write_record([t, sf.eval(t), sf.derivative(t)].map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Simulate { scenario, out: csv } => simulate(&scenario, &csv, out, err),
        Command::Verify { scenarios, jobs } => verify(&scenarios, jobs, out, err),
        Command::Selftest => run_selftest(out),
        Command::MuTable {
            support,
            out: csv,
            grid,
            samples,
        } => match mu_table(support, grid, samples, &csv) {
            Ok(()) => 0,
            Err(e) => fail(err, &e, None),
        },
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
