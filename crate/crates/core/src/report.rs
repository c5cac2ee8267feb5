// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Human-readable summaries and CSV output.
//!
//! CSV files use `,` separators, LF line endings, a header row, and reals
//! printed with 17 significant digits so they round-trip exactly.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::controls::format_real;
use crate::error::Result;
use crate::landscape::TrapReport;

/// One-page text summary of a certificate, derived only from the report.
pub fn summary(report: &TrapReport) -> String {
    let inst = &report.instance;
    let mut s = String::new();
    let verdict = if report.passed { "PASSED" } else { "FAILED" };
    let _ = writeln!(s, "trap certificate: {verdict}");
    let _ = writeln!(s, "claimed order: {}", report.claimed_order);
    let _ = writeln!(
        s,
        "instance: N = {}, a = {}, b = {}, omega = {}, T = {}",
        inst.levels, inst.a, inst.b, inst.omega, inst.horizon
    );
    let _ = writeln!(s, "couplings: {:?}", inst.couplings);
    let _ = writeln!(s, "lambda (normalized): {:?}, shift {}", inst.lambda_normalized, inst.lambda_shift);
    if let (Some(stage), Some(err)) = (&report.failed_stage, &report.error) {
        let _ = writeln!(s, "stopped at stage {stage}: {err}");
    }
    let _ = writeln!(s, "checks:");
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let gate = if c.gating { "" } else { " (informational)" };
        let _ = writeln!(s, "  [{mark}] {}{gate}", c.name);
        for m in &c.measurements {
            let _ = writeln!(s, "         {} = {:.3e} {} {:.3e}", m.quantity, m.value, m.relation, m.threshold);
        }
    }
    let mean_zero = report.directions.iter().filter(|d| d.mean_zero).count();
    let _ = writeln!(
        s,
        "directions: {} ({} mean-zero), fit orders up to {}",
        report.directions.len(),
        mean_zero,
        report.fit_max_order
    );
    for w in &report.witness {
        let _ = writeln!(s, "witness: T = {:.6}, J = {:.6}, threshold {:.3e}, found = {}", w.horizon, w.value, w.threshold, w.success);
    }
    if let Some(lie) = &report.lie {
        let _ = writeln!(s, "dynamical Lie algebra: dimension {}, saturated = {}, depth {}", lie.dimension, lie.saturated, lie.depth_reached);
    }
    s
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "csv row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn header_line(&self) -> String {
        self.header.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header_line();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Appends rows to `path`, writing the header first if the file is new or empty.
    pub fn append(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        let text = self.to_csv();
        let body = if fresh { text.as_str() } else { text.split_once('\n').map(|(_, rest)| rest).unwrap_or("") };
        file.write_all(body.as_bytes())?;
        Ok(())
    }
}

/// CSV cell for a real, 17 significant digits.
pub fn csv_real(x: f64) -> String {
    format_real(x)
}
