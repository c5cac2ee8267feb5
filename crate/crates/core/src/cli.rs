// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end shared by the `trapscope` binary and the tests.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 a certificate
//! (or controllability check) that ran but did not pass.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::controls::{random_direction, PiecewiseControl};
use crate::dynamics::{dyson_forms_converged, objective_at, Quadrature};
use crate::error::{Error, Result};
use crate::landscape::{differential, lie_rank, taylor_fit, trap_certificate};
use crate::numerics::hermitian_spectral_norm;
use crate::report::{csv_real, summary, CsvTable};

/// Environment variable selecting the worker-thread count.
pub const THREADS_ENV: &str = "TRAPSCOPE_THREADS";
/// Highest differential order the `differential` command will compute.
pub const MAX_CLI_ORDER: usize = 16;
const DEFAULT_REPORT: &str = "trapscope_report.json";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "trapscope", version, about = "Trap certificates for degenerate ladder control systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full certificate and write a JSON report plus a text summary.
    Certify {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the analytic differential of one order with a Taylor fit.
    Differential {
        config: PathBuf,
        #[arg(long)]
        control: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sample J(t·f) along the configured random directions.
    Scan {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        tmax: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Check full controllability of the configured system.
    Controllability { config: PathBuf },
}

/// Parses the thread-count variable; `None` when unset.
pub fn threads_from_env(value: Option<OsString>) -> Result<Option<usize>> {
    let Some(raw) = value else { return Ok(None) };
    let text = raw.to_string_lossy();
    match text.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{text}'"))),
    }
}

/// Runs the CLI reading the thread count from the process environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_threads(args, std::env::var_os(THREADS_ENV), out, err)
}

pub fn run_with_threads<I, T>(args: I, threads: Option<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = threads_from_env(threads).and_then(|threads| match cli.command {
        Command::Certify { config, out: path } => certify(&config, path, threads, out, err),
        Command::Differential { config, control, order, csv } => differential_cmd(&config, &control, order, csv, out),
        Command::Scan { config, out: path, tmax, points } => scan(&config, &path, tmax, points, out),
        Command::Controllability { config } => controllability(&config, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn summary_path(report: &Path) -> PathBuf {
    report.with_extension("txt")
}

fn certify(config: &Path, out_path: Option<PathBuf>, threads: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    let inst = cfg.instance()?;
    let path = out_path.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_REPORT));
    let cert = cfg.certificate_config(threads);
    let (report, code) = match trap_certificate(&inst, &cert) {
        Ok(report) => {
            let code = if report.passed { EXIT_OK } else { EXIT_FAILED };
            (report, code)
        }
        Err(failure) => {
            writeln!(err, "error: stage {}: {}", failure.stage, failure.error)?;
            let code = if failure.stage == "precondition" { EXIT_INPUT } else { EXIT_FAILED };
            (*failure.partial, code)
        }
    };
    std::fs::write(&path, report.to_json())?;
    let text = summary(&report);
    std::fs::write(summary_path(&path), &text)?;
    out.write_all(text.as_bytes())?;
    writeln!(out, "report: {}", path.display())?;
    Ok(code)
}

fn differential_cmd(config: &Path, control: &Path, order: usize, csv: Option<PathBuf>, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    let inst = cfg.instance()?;
    let sys = &inst.system;
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let f = PiecewiseControl::read(control)?;
    if (f.horizon() - sys.horizon()).abs() > 1e-12 * sys.horizon() {
        return Err(Error::GridMismatch(format!("control horizon {} differs from T = {}", f.horizon(), sys.horizon())));
    }
    let quad = Quadrature { substeps: cfg.substeps, convergence_tol: Some(cfg.tolerances.convergence), ..Quadrature::default() };
    let forms = dyson_forms_converged(sys, &f, order.min(MAX_CLI_ORDER), &quad)?;
    let analytic = differential(&inst, &forms, order)?;

    let fit_order = order + 2;
    let scale = hermitian_spectral_norm(&sys.v())? * f.abs_integral();
    let radius = if scale > 0.0 { 1.0 / scale } else { 1.0 };
    let fit = taylor_fit(&inst, &f, fit_order, radius, 2 * fit_order + 8)?;
    let fitted = fit.coefficient(order);
    let discrepancy = (analytic - fitted).abs();

    writeln!(out, "order {order}")?;
    writeln!(out, "analytic {}", csv_real(analytic))?;
    writeln!(out, "fitted {}", csv_real(fitted))?;
    writeln!(out, "discrepancy {}", csv_real(discrepancy))?;
    if let Some(path) = csv {
        let mut table = CsvTable::new(&["order", "analytic", "fitted", "discrepancy"]);
        table.push(vec![order.to_string(), csv_real(analytic), csv_real(fitted), csv_real(discrepancy)]);
        table.append(path)?;
    }
    Ok(EXIT_OK)
}

fn scan(config: &Path, path: &Path, tmax: f64, points: usize, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    let inst = cfg.instance()?;
    if !(tmax > 0.0 && tmax.is_finite()) || points < 2 {
        return Err(Error::InvalidArgument("scan needs tmax > 0 and at least 2 points".into()));
    }
    let mut table = CsvTable::new(&["seed", "mean_zero", "t", "J"]);
    for i in 0..cfg.directions {
        let mean_zero = i % 2 == 1;
        let seed = cfg.seed.wrapping_add(i as u64);
        let f = random_direction(seed, cfg.segments, cfg.horizon, mean_zero, 1.0)?;
        for k in 0..points {
            let t = -tmax + 2.0 * tmax * k as f64 / (points - 1) as f64;
            let j = objective_at(&inst, &f.scaled(t))?;
            table.push(vec![seed.to_string(), u8::from(mean_zero).to_string(), csv_real(t), csv_real(j)]);
        }
    }
    table.write(path)?;
    writeln!(out, "wrote {} rows to {}", table.len(), path.display())?;
    Ok(EXIT_OK)
}

fn controllability(config: &Path, out: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::load(config)?;
    let sys = cfg.system()?;
    let lie = lie_rank(&sys, cfg.tolerances.lie, 12);
    writeln!(out, "dimension {}", lie.dimension)?;
    writeln!(out, "target {}", sys.levels() * sys.levels() - 1)?;
    writeln!(out, "saturated {}", lie.saturated)?;
    writeln!(out, "depth {}", lie.depth_reached)?;
    Ok(if lie.saturated { EXIT_OK } else { EXIT_FAILED })
}
