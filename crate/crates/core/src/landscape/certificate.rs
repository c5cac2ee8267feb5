// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end trap certificate for the zero control.
//!
//! Every direction runs the same pure pipeline (forms, analytic coefficients,
//! polynomial fit). Directions are evaluated in parallel and merged in index
//! order, so the report does not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use super::{differential, lie_rank, order_2n2_value, taylor_fit, witness_search, LieAlgebraResult, WitnessResult};
use crate::controls::random_direction;
use crate::dynamics::{dyson_forms_converged, kernel_form_a1n, Quadrature};
use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::numerics::hermitian_spectral_norm;

pub const SCHEMA: &str = "trapscope/1";

/// Thresholds for every check; all recorded verbatim in the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// `|J'(0)(f)|` from the forms.
    pub stationarity_analytic: f64,
    /// `|c_1|` from the fit.
    pub stationarity_fit: f64,
    /// Relative agreement of `c_2` with `λ_{N−1} v_{N−1}² (∫f)²`.
    pub descent_relative: f64,
    /// `|differential(n)| / (1 + ‖f‖)ⁿ` on mean-zero directions.
    pub flatness_analytic: f64,
    /// `|c_n|` from the fit on mean-zero directions, and the trap remainder bound.
    pub flatness_fit: f64,
    /// Relative agreement of the fitted `c_{2N−2}` with `λ_1 |A^{N−1}_{1N}|²`.
    pub leading_relative: f64,
    /// Lower bound accepted for the fitted `c_{2N−2}`.
    pub leading_floor: f64,
    /// Relative agreement between the independent evaluations of the leading coefficient.
    pub path_agreement: f64,
    /// Substep-doubling convergence of the forms.
    pub convergence: f64,
    pub lie: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stationarity_analytic: 1e-10,
            stationarity_fit: 1e-8,
            descent_relative: 1e-3,
            flatness_analytic: 1e-9,
            flatness_fit: 1e-6,
            leading_relative: 1e-2,
            leading_floor: -1e-8,
            path_agreement: 1e-6,
            convergence: 1e-9,
            lie: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateConfig {
    /// Control segments `M`.
    pub segments: usize,
    /// Initial RK4 substeps per segment; `0` picks the phase-resolution default.
    pub substeps: usize,
    /// Number of random directions; even indices have nonzero mean, odd ones are mean-zero.
    pub directions: usize,
    pub seed: u64,
    /// Direction amplitude (uniform samples on `[−amplitude, amplitude]`).
    pub amplitude: f64,
    /// Samples per side of the fit grid; `0` picks `2·max_order + 8`.
    pub fit_points: usize,
    pub tolerances: Tolerances,
    pub witness_budget: usize,
    /// Horizons for the witness search; empty means `{T, 2T}`.
    pub witness_horizons: Vec<f64>,
    pub witness_amplitudes: (f64, f64),
    pub lie_max_depth: usize,
    /// Worker threads for the direction loop; `None` uses the rayon default.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            segments: crate::controls::DEFAULT_SEGMENTS,
            substeps: 0,
            directions: 8,
            seed: 1,
            amplitude: 1.0,
            fit_points: 0,
            tolerances: Tolerances::default(),
            witness_budget: 500,
            witness_horizons: Vec::new(),
            witness_amplitudes: (0.1, 2.0),
            lie_max_depth: 12,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub levels: usize,
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub couplings: Vec<f64>,
    pub horizon: f64,
    pub lambda_raw: Vec<f64>,
    pub lambda_normalized: Vec<f64>,
    pub lambda_shift: f64,
    pub initial_level: usize,
}

impl InstanceSummary {
    fn of(inst: &ProblemInstance) -> Self {
        let sys = &inst.system;
        Self {
            levels: sys.levels(),
            a: sys.a(),
            b: sys.b(),
            omega: sys.omega(),
            couplings: sys.couplings().to_vec(),
            horizon: sys.horizon(),
            lambda_raw: inst.observable.raw().to_vec(),
            lambda_normalized: inst.observable.normalized().to_vec(),
            lambda_shift: inst.observable.shift(),
            initial_level: inst.initial_level(),
        }
    }
}

/// One checked number with its threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub quantity: String,
    pub value: f64,
    /// One of `"<="`, `">="`, `"<"`, `">"`.
    pub relation: &'static str,
    pub threshold: f64,
    pub passed: bool,
}

impl Measurement {
    fn at_most(quantity: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { quantity: quantity.into(), value, relation: "<=", threshold, passed: value <= threshold }
    }

    fn at_least(quantity: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { quantity: quantity.into(), value, relation: ">=", threshold, passed: value >= threshold }
    }

    fn above(quantity: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { quantity: quantity.into(), value, relation: ">", threshold, passed: value > threshold }
    }

    fn below(quantity: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { quantity: quantity.into(), value, relation: "<", threshold, passed: value < threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Whether the check counts towards the overall verdict.
    pub gating: bool,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
}

impl Check {
    fn new(name: impl Into<String>, gating: bool, measurements: Vec<Measurement>) -> Self {
        let passed = !measurements.is_empty() && measurements.iter().all(|m| m.passed);
        Self { name: name.into(), gating, passed, measurements }
    }
}

/// Everything measured along one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionRecord {
    pub index: usize,
    pub seed: u64,
    pub mean_zero: bool,
    pub norm: f64,
    pub integral: f64,
    pub substeps: usize,
    pub convergence_change: f64,
    /// `analytic[n − 1]` is the forms-based coefficient of order `n`, `1 ≤ n ≤ 2N−2`.
    pub analytic: Vec<f64>,
    /// `fitted[n − 1]` is the fitted coefficient of order `n`, `1 ≤ n ≤ 2N`.
    pub fitted: Vec<f64>,
    pub fit_radius: f64,
    pub fit_residual: f64,
    pub fit_accepted: bool,
    /// `λ_{N−1} v_{N−1}² (∫f)²`, nonzero-mean directions only.
    pub expected_c2: Option<f64>,
    /// `λ_1 |A^{N−1}_{1N}|²` from the forms, mean-zero directions only.
    pub leading_forms: Option<f64>,
    /// Same coefficient through the one-dimensional kernel reduction.
    pub leading_kernel: Option<f64>,
    /// `max_{|t| ≤ radius} Σ_{k=2}^{2N−3} c_k t^k` on the fit grid.
    pub remainder_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub schema: &'static str,
    pub instance: InstanceSummary,
    pub claimed_order: usize,
    pub passed: bool,
    /// Stage that raised an error, for partial reports.
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    pub config: CertificateConfig,
    pub fit_max_order: usize,
    pub checks: Vec<Check>,
    pub directions: Vec<DirectionRecord>,
    pub witness: Vec<WitnessResult>,
    pub lie: Option<LieAlgebraResult>,
}

impl TrapReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A certificate that stopped early; `partial` holds everything computed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateFailure {
    pub stage: String,
    pub error: Error,
    pub partial: Box<TrapReport>,
}

impl std::fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.error)
    }
}

impl std::error::Error for CertificateFailure {}

fn stage<T>(name: &str, r: Result<T>) -> std::result::Result<T, (String, Error)> {
    r.map_err(|e| (name.to_string(), e))
}

fn analyse_direction(
    inst: &ProblemInstance,
    config: &CertificateConfig,
    fit_max_order: usize,
    fit_points: usize,
    v_norm: f64,
    index: usize,
) -> std::result::Result<DirectionRecord, (String, Error)> {
    let sys = &inst.system;
    let big_n = inst.levels();
    let top = 2 * big_n - 2;
    let mean_zero = index % 2 == 1;
    let seed = config.seed.wrapping_add(index as u64);
    let f = stage("direction", random_direction(seed, config.segments, sys.horizon(), mean_zero, config.amplitude))?;

    let quad = Quadrature { substeps: config.substeps, convergence_tol: Some(config.tolerances.convergence), ..Quadrature::default() };
    let forms = stage("dyson_forms", dyson_forms_converged(sys, &f, top, &quad))?;
    let analytic = (1..=top)
        .map(|n| differential(inst, &forms, n))
        .collect::<Result<Vec<f64>>>();
    let analytic = stage("differential", analytic)?;

    let scale = v_norm * f.abs_integral();
    let radius = if scale > 0.0 { 1.0 / scale } else { 1.0 };
    let fit = stage("taylor_fit", taylor_fit(inst, &f, fit_max_order, radius, fit_points))?;

    let (leading_forms, leading_kernel) = if mean_zero {
        let forms_value = stage("order_2n2_value", order_2n2_value(inst, &forms))?;
        let kernel = stage("kernel_form", kernel_form_a1n(sys, &f))?;
        (Some(forms_value), Some(inst.observable.lambda(1) * kernel.norm_sqr()))
    } else {
        (None, None)
    };
    let expected_c2 = (!mean_zero).then(|| {
        let v = sys.coupling(big_n - 1);
        inst.observable.lambda(big_n - 1) * v * v * f.integral().powi(2)
    });

    let r = fit.t_grid_radius;
    let remainder_max = (0..=fit_points)
        .flat_map(|k| {
            let t = r * k as f64 / fit_points as f64;
            [t, -t]
        })
        .map(|t| fit.partial_sum(2, 2 * big_n - 3, t))
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(DirectionRecord {
        index,
        seed,
        mean_zero,
        norm: f.norm(),
        integral: f.integral(),
        substeps: forms.substeps(),
        convergence_change: forms.relative_change().unwrap_or(0.0),
        analytic,
        fitted: fit.coefficients.clone(),
        fit_radius: fit.t_grid_radius,
        fit_residual: fit.residual,
        fit_accepted: fit.accepted,
        expected_c2,
        leading_forms,
        leading_kernel,
        remainder_max,
    })
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b.abs() }
}

fn assemble_checks(inst: &ProblemInstance, records: &[DirectionRecord], tol: &Tolerances) -> Vec<Check> {
    let big_n = inst.levels();
    let top = 2 * big_n - 2;
    let nonzero: Vec<&DirectionRecord> = records.iter().filter(|r| !r.mean_zero).collect();
    let zero: Vec<&DirectionRecord> = records.iter().filter(|r| r.mean_zero).collect();

    let stationarity = Check::new(
        "stationarity",
        true,
        vec![
            Measurement::at_most("max |differential(1)|", max_of(records.iter().map(|r| r.analytic[0].abs())), tol.stationarity_analytic),
            Measurement::at_most("max |fitted c_1|", max_of(records.iter().map(|r| r.fitted[0].abs())), tol.stationarity_fit),
        ],
    );

    let mut descent = Vec::new();
    if !nonzero.is_empty() {
        descent.push(Measurement::at_most(
            "max rel |fitted c_2 - lambda_(N-1) v_(N-1)^2 (int f)^2|",
            max_of(nonzero.iter().map(|r| rel(r.fitted[1], r.expected_c2.unwrap()))),
            tol.descent_relative,
        ));
        descent.push(Measurement::at_most(
            "max rel |differential(2) - lambda_(N-1) v_(N-1)^2 (int f)^2|",
            max_of(nonzero.iter().map(|r| rel(r.analytic[1], r.expected_c2.unwrap()))),
            tol.descent_relative,
        ));
        descent.push(Measurement::below(
            "max fitted c_2",
            nonzero.iter().map(|r| r.fitted[1]).fold(f64::NEG_INFINITY, f64::max),
            0.0,
        ));
        descent.push(Measurement::at_most(
            "max trap remainder on nonzero-mean directions",
            nonzero.iter().map(|r| r.remainder_max).fold(f64::NEG_INFINITY, f64::max),
            tol.flatness_fit,
        ));
    }
    let descent = Check::new("mean_descent", true, descent);

    let mut flat = Vec::new();
    if !zero.is_empty() {
        flat.push(Measurement::at_most(
            format!("max |differential(n)| / (1 + |f|)^n, 2 <= n <= {}", 2 * big_n - 3),
            max_of(zero.iter().flat_map(|r| (2..=2 * big_n - 3).map(move |n| r.analytic[n - 1].abs() / (1.0 + r.norm).powi(n as i32)))),
            tol.flatness_analytic,
        ));
        flat.push(Measurement::at_most(
            format!("max |fitted c_n|, 2 <= n <= {}", 2 * big_n - 3),
            max_of(zero.iter().flat_map(|r| (2..=2 * big_n - 3).map(move |n| r.fitted[n - 1].abs()))),
            tol.flatness_fit,
        ));
        flat.push(Measurement::at_most(
            "max trap remainder on mean-zero directions",
            zero.iter().map(|r| r.remainder_max).fold(f64::NEG_INFINITY, f64::max),
            tol.flatness_fit,
        ));
    }
    let flatness = Check::new(format!("flatness_3_to_{}", 2 * big_n - 3), true, flat);

    let mut matched = Vec::new();
    let mut nonneg = Vec::new();
    if !zero.is_empty() {
        let lead = |r: &DirectionRecord| r.leading_forms.unwrap();
        matched.push(Measurement::at_most(
            format!("max rel |fitted c_{top} - lambda_1 |A^(N-1)_1N|^2|"),
            max_of(zero.iter().map(|r| rel(r.fitted[top - 1], lead(r)))),
            tol.leading_relative,
        ));
        matched.push(Measurement::at_most(
            format!("max rel |differential({top}) - lambda_1 |A^(N-1)_1N|^2|"),
            max_of(zero.iter().map(|r| rel(r.analytic[top - 1], lead(r)))),
            tol.path_agreement,
        ));
        matched.push(Measurement::at_most(
            "max rel |kernel reduction - Dyson forms| for lambda_1 |A^(N-1)_1N|^2",
            max_of(zero.iter().map(|r| rel(r.leading_kernel.unwrap(), lead(r)))),
            tol.path_agreement,
        ));
        nonneg.push(Measurement::at_least(
            "min lambda_1 |A^(N-1)_1N|^2",
            zero.iter().map(|r| lead(r)).fold(f64::INFINITY, f64::min),
            0.0,
        ));
        nonneg.push(Measurement::at_least(
            format!("min fitted c_{top}"),
            zero.iter().map(|r| r.fitted[top - 1]).fold(f64::INFINITY, f64::min),
            tol.leading_floor,
        ));
    }
    vec![
        stationarity,
        descent,
        flatness,
        Check::new(format!("order_{top}_match"), true, matched),
        Check::new(format!("order_{top}_nonneg"), true, nonneg),
    ]
}

/// Certifies that `f ≡ 0` is a trap of order `2N − 3` for `inst`.
pub fn trap_certificate(inst: &ProblemInstance, config: &CertificateConfig) -> std::result::Result<TrapReport, CertificateFailure> {
    let big_n = inst.levels();
    let fit_max_order = 2 * big_n;
    let fit_points = if config.fit_points == 0 { 2 * fit_max_order + 8 } else { config.fit_points };
    let mut report = TrapReport {
        schema: SCHEMA,
        instance: InstanceSummary::of(inst),
        claimed_order: 2 * big_n - 3,
        passed: false,
        failed_stage: None,
        error: None,
        config: config.clone(),
        fit_max_order,
        checks: Vec::new(),
        directions: Vec::new(),
        witness: Vec::new(),
        lie: None,
    };
    let fail = |mut report: TrapReport, stage: String, error: Error| {
        report.failed_stage = Some(stage.clone());
        report.error = Some(error.to_string());
        CertificateFailure { stage, error, partial: Box::new(report) }
    };

    // preconditions
    let o = &inst.observable;
    if !(o.lambda(1) > o.lambda(big_n) && o.lambda(big_n) > o.lambda(big_n - 1)) {
        let e = Error::OrderingViolation(format!(
            "need lambda_1 > lambda_N > lambda_(N-1), got {} , {} , {}",
            o.raw()[0],
            o.raw()[big_n - 1],
            o.raw()[big_n - 2]
        ));
        return Err(fail(report, "precondition".into(), e));
    }
    if inst.initial_level() != big_n {
        return Err(fail(report, "precondition".into(), Error::DomainError("the certificate needs rho_0 = |N><N|".into())));
    }
    if config.directions < 2 || config.segments < 1 || config.amplitude.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        let e = Error::InvalidArgument("need directions >= 2, segments >= 1 and a positive amplitude".into());
        return Err(fail(report, "precondition".into(), e));
    }

    let v_norm = match hermitian_spectral_norm(&inst.system.v()) {
        Ok(x) => x,
        Err(e) => return Err(fail(report, "spectral_norm".into(), e)),
    };

    let run = || {
        (0..config.directions)
            .into_par_iter()
            .map(|i| analyse_direction(inst, config, fit_max_order, fit_points, v_norm, i))
            .collect::<Vec<_>>()
    };
    let results = match config.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => return Err(fail(report, "thread_pool".into(), Error::InvalidArgument(e.to_string()))),
        },
        None => run(),
    };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => report.directions.push(rec),
            Err((stage, e)) => return Err(fail(report, format!("direction {i}: {stage}"), e)),
        }
    }
    report.checks = assemble_checks(inst, &report.directions, &config.tolerances);

    let lie = lie_rank(&inst.system, config.tolerances.lie, config.lie_max_depth);
    report.checks.push(Check::new(
        "controllable",
        true,
        vec![Measurement::at_least("Lie algebra dimension", lie.dimension as f64, (big_n * big_n - 1) as f64)],
    ));
    report.lie = Some(lie);

    let horizons = if config.witness_horizons.is_empty() {
        vec![inst.system.horizon(), 2.0 * inst.system.horizon()]
    } else {
        config.witness_horizons.clone()
    };
    for (k, &t) in horizons.iter().enumerate() {
        let found = inst
            .with_horizon(t)
            .and_then(|h| witness_search(&h, config.seed.wrapping_add(1000 + k as u64), config.witness_budget, config.witness_amplitudes, config.segments));
        match found {
            Ok(w) => report.witness.push(w),
            Err(e) => return Err(fail(report, format!("witness_search T={t}"), e)),
        }
    }
    let best = report.witness.iter().fold(f64::NEG_INFINITY, |m, w| m.max(w.value - w.threshold));
    report.checks.push(Check::new(
        "witness_found",
        false,
        vec![Measurement::above("max over horizons of J_best - (J(0) + 0.01 (lambda_1 - lambda_N))", best, 0.0)],
    ));

    report.passed = report.checks.iter().filter(|c| c.gating).all(|c| c.passed);
    Ok(report)
}
