// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Every failure the toolkit can report.
///
/// The variant names double as the machine-readable tag printed by the CLI,
/// so `Display` always starts with the variant name.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotHermitian: max |H - H^dagger| = {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("NotUnitary: ||U^dagger U - I||_F = {defect:e} exceeds {tol:e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("DegenerateSpectrum: a = {a} and b = {b} must differ")]
    DegenerateSpectrum { a: f64, b: f64 },

    #[error("ZeroCoupling: coupling v_{index} is zero")]
    ZeroCoupling { index: usize },

    #[error("BadDimension: {0}")]
    BadDimension(String),

    #[error("OrderingViolation: {0}")]
    OrderingViolation(String),

    #[error("GridMismatch: {0}")]
    GridMismatch(String),

    #[error("NonConvergence: relative change {change:e} at {substeps} substeps exceeds {tol:e}")]
    NonConvergence { change: f64, substeps: usize, tol: f64 },

    #[error("DomainError: {0}")]
    DomainError(String),

    #[error("TooExpensive: {0}")]
    TooExpensive(String),

    #[error("InsufficientOrder: order {requested} requested but forms only reach {available}")]
    InsufficientOrder { requested: usize, available: usize },

    #[error("NonRealResult: imaginary part {imag:e} against magnitude {magnitude:e}")]
    NonRealResult { imag: f64, magnitude: f64 },

    #[error("IllConditioned: design matrix condition number {cond:e}")]
    IllConditioned { cond: f64 },

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("ParseError: line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("IoError: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
