// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: flat `key = value` text, `#` comments, lists comma-separated.
//!
//! ```text
//! N = 3
//! a = 1
//! b = 0
//! v = 1, 1
//! T = 2pi
//! lambda = 1, -1, 0
//! ```
//!
//! Reals accept a trailing `pi` factor (`2pi`, `2*pi`, `pi`). Tolerances can
//! be overridden with `tol.<name>` keys named after the [`Tolerances`] fields.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::controls::DEFAULT_SEGMENTS;
use crate::error::{Error, Result};
use crate::landscape::{CertificateConfig, Tolerances};
use crate::model::{Observable, ProblemInstance, SystemSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub levels: usize,
    pub a: f64,
    pub b: f64,
    pub couplings: Vec<f64>,
    pub horizon: f64,
    pub lambda: Vec<f64>,
    pub segments: usize,
    pub substeps: usize,
    pub directions: usize,
    pub seed: u64,
    pub witness_budget: usize,
    pub witness_horizons: Vec<f64>,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

const REQUIRED: [&str; 6] = ["N", "a", "b", "v", "T", "lambda"];

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let x = if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().ok()? };
        factor * std::f64::consts::PI
    } else {
        s.parse::<f64>().ok()?
    };
    x.is_finite().then_some(x)
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig {
            levels: 0,
            a: 0.0,
            b: 0.0,
            couplings: Vec::new(),
            horizon: 0.0,
            lambda: Vec::new(),
            segments: DEFAULT_SEGMENTS,
            substeps: 0,
            directions: 8,
            seed: 1,
            witness_budget: 500,
            witness_horizons: Vec::new(),
            out: None,
            tolerances: Tolerances::default(),
        };
        let mut seen = HashSet::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key '{key}'")));
            }
            let real = || parse_real(value).ok_or_else(|| err(format!("invalid number '{value}' for {key}")));
            let list = || parse_list(value).ok_or_else(|| err(format!("invalid list '{value}' for {key}")));
            let uint = || value.parse::<usize>().map_err(|_| err(format!("invalid non-negative integer '{value}' for {key}")));
            match key {
                "N" => cfg.levels = uint()?,
                "a" => cfg.a = real()?,
                "b" => cfg.b = real()?,
                "v" => cfg.couplings = list()?,
                "T" => cfg.horizon = real()?,
                "lambda" => cfg.lambda = list()?,
                "M" => cfg.segments = uint()?,
                "substeps" => cfg.substeps = uint()?,
                "directions" => cfg.directions = uint()?,
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("invalid seed '{value}'")))?,
                "witness_budget" => cfg.witness_budget = uint()?,
                "witness_horizons" => cfg.witness_horizons = list()?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                _ => match key.strip_prefix("tol.") {
                    Some(name) => {
                        let x = real()?;
                        if x <= 0.0 && name != "leading_floor" {
                            return Err(err(format!("tolerance {key} must be positive")));
                        }
                        *tolerance_slot(&mut cfg.tolerances, name).ok_or_else(|| err(format!("unknown tolerance '{name}'")))? = x;
                    }
                    None => return Err(err(format!("unknown key '{key}'"))),
                },
            }
        }
        for key in REQUIRED {
            if !seen.contains(key) {
                return Err(Error::Parse { line: last_line.max(1), message: format!("missing required key '{key}'") });
            }
        }
        if cfg.segments < 8 {
            return Err(Error::InvalidArgument(format!("M must be at least 8, got {}", cfg.segments)));
        }
        if cfg.directions < 2 {
            return Err(Error::InvalidArgument(format!("directions must be at least 2, got {}", cfg.directions)));
        }
        if cfg.witness_horizons.iter().any(|t| *t <= 0.0) {
            return Err(Error::InvalidArgument("witness horizons must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn system(&self) -> Result<SystemSpec> {
        SystemSpec::new(self.levels, self.a, self.b, self.couplings.clone(), self.horizon)
    }

    /// Theorem-mode instance with `ρ0 = |N⟩⟨N|`.
    pub fn instance(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(self.system()?, Observable::new(self.lambda.clone(), true)?)
    }

    pub fn certificate_config(&self, threads: Option<usize>) -> CertificateConfig {
        CertificateConfig {
            segments: self.segments,
            substeps: self.substeps,
            directions: self.directions,
            seed: self.seed,
            tolerances: self.tolerances.clone(),
            witness_budget: self.witness_budget,
            witness_horizons: self.witness_horizons.clone(),
            threads,
            ..CertificateConfig::default()
        }
    }
}

fn tolerance_slot<'a>(t: &'a mut Tolerances, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "stationarity_analytic" => &mut t.stationarity_analytic,
        "stationarity_fit" => &mut t.stationarity_fit,
        "descent_relative" => &mut t.descent_relative,
        "flatness_analytic" => &mut t.flatness_analytic,
        "flatness_fit" => &mut t.flatness_fit,
        "leading_relative" => &mut t.leading_relative,
        "leading_floor" => &mut t.leading_floor,
        "path_agreement" => &mut t.path_agreement,
        "convergence" => &mut t.convergence,
        "lie" => &mut t.lie,
        _ => return None,
    })
}
