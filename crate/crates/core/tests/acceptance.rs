// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion, at fixed tolerances.
//!
//! Runs without the libtest harness so the verdict lines are always printed.
//! Criterion 9 (the non-optimality witness) is reported but never fails the run.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use trapscope::controls::{random_direction, PiecewiseControl};
use trapscope::dynamics::{
    dyson_forms_converged, dyson_resum_defect, kernel_bruteforce_a1n, kernel_form_a1n, remainder_bound, Quadrature,
};
use trapscope::landscape::{differential, lie_rank, order_2n2_value, taylor_fit, witness_search, TaylorFit};
use trapscope::model::{Observable, ProblemInstance, SystemSpec};
use trapscope::numerics::hermitian_spectral_norm;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    soft: bool,
    run: fn() -> Outcome,
}

fn ladder(levels: usize, a: f64, lambda: Vec<f64>) -> ProblemInstance {
    let sys = SystemSpec::new(levels, a, 0.0, vec![1.0; levels - 1], 2.0 * PI).expect("valid system");
    ProblemInstance::new(sys, Observable::new(lambda, true).expect("valid observable")).expect("valid instance")
}

fn n3() -> ProblemInstance {
    ladder(3, 1.0, vec![1.0, -1.0, 0.0])
}

fn n4() -> ProblemInstance {
    ladder(4, 1.0, vec![1.0, -0.5, -1.0, 0.0])
}

/// Fit of order 2N on the radius `1/(‖V‖₂ ∫|f|)`, as the certificate does.
fn fit(inst: &ProblemInstance, f: &PiecewiseControl) -> trapscope::Result<TaylorFit> {
    let order = 2 * inst.levels();
    let radius = 1.0 / (hermitian_spectral_norm(&inst.system.v())? * f.abs_integral());
    taylor_fit(inst, f, order, radius, 2 * order + 8)
}

fn stationarity() -> Outcome {
    let inst = n3();
    let (mut d1, mut c1) = (0.0f64, 0.0f64);
    for i in 0..20u64 {
        let f = random_direction(100 + i, 64, 2.0 * PI, i % 2 == 1, 1.0)?;
        let forms = dyson_forms_converged(&inst.system, &f, 2, &Quadrature::default())?;
        d1 = d1.max(differential(&inst, &forms, 1)?.abs());
        c1 = c1.max(fit(&inst, &f)?.coefficient(1).abs());
    }
    Ok((d1 <= 1e-10 && c1 <= 1e-8, format!("20 directions: max|d1| = {d1:.1e} (<= 1e-10), max|c1| = {c1:.1e} (<= 1e-8)")))
}

fn descent() -> Outcome {
    let inst = n3();
    let (mut worst, mut all_negative) = (0.0f64, true);
    for i in 0..10u64 {
        let f = random_direction(200 + i, 64, 2.0 * PI, false, 1.0)?;
        let expected = inst.observable.lambda(2) * inst.system.coupling(2).powi(2) * f.integral().powi(2);
        let c2 = fit(&inst, &f)?.coefficient(2);
        all_negative &= c2 < 0.0;
        worst = worst.max((c2 - expected).abs() / expected.abs());
    }
    Ok((worst <= 1e-3 && all_negative, format!("10 nonzero-mean directions: max rel err {worst:.1e} (<= 1e-3), all c2 < 0: {all_negative}")))
}

fn flatness() -> Outcome {
    let mut worst3 = 0.0f64;
    let mut worst4 = 0.0f64;
    for i in 0..10u64 {
        let inst = n3();
        let f = random_direction(300 + i, 64, 2.0 * PI, true, 1.0)?;
        let forms = dyson_forms_converged(&inst.system, &f, 3, &Quadrature::default())?;
        worst3 = worst3.max(differential(&inst, &forms, 3)?.abs());
        let inst = n4();
        let forms = dyson_forms_converged(&inst.system, &f, 5, &Quadrature::default())?;
        for n in 3..=5 {
            worst4 = worst4.max(differential(&inst, &forms, n)?.abs());
        }
    }
    let ok = worst3 <= 1e-9 && worst4 <= 1e-9;
    Ok((ok, format!("10 mean-zero directions: N=3 max|d3| = {worst3:.1e}, N=4 max|d3..d5| = {worst4:.1e} (<= 1e-9)")))
}

fn leading_order() -> Outcome {
    // N = 3, ω = 2, f = cos: λ_1 |iπ/2|² = π²/4
    let inst = ladder(3, 2.0, vec![1.0, -1.0, 0.0]);
    let segments = 256;
    let f = PiecewiseControl::from_fn_midpoint(2.0 * PI, segments, f64::cos)?;
    let forms = dyson_forms_converged(&inst.system, &f, 4, &Quadrature::default())?;
    let target = PI * PI / 4.0;
    let value = order_2n2_value(&inst, &forms)?;
    let value_err = (value - target).abs() / target;
    let c4 = fit(&inst, &f)?.coefficient(4);
    let c4_err = (c4 - value).abs() / value;

    // N = 4 on mean-zero random directions
    let inst = n4();
    let (mut c6_min, mut c6_err) = (f64::INFINITY, 0.0f64);
    for i in 0..6u64 {
        let f = random_direction(400 + i, 64, 2.0 * PI, true, 1.0)?;
        let forms = dyson_forms_converged(&inst.system, &f, 6, &Quadrature::default())?;
        let analytic = differential(&inst, &forms, 6)?;
        let c6 = fit(&inst, &f)?.coefficient(6);
        c6_min = c6_min.min(c6);
        c6_err = c6_err.max((c6 - analytic).abs() / analytic.abs());
    }
    let ok = value_err <= 1e-3 && c4_err <= 1e-2 && c6_min >= -1e-8 && c6_err <= 5e-2;
    Ok((
        ok,
        format!(
            "N=3 (M={segments}) value rel err {value_err:.1e} (<= 1e-3), fitted c4 rel err {c4_err:.1e} (<= 1e-2); \
             N=4 min c6 = {c6_min:.3e} (>= -1e-8), c6 rel err {c6_err:.1e} (<= 5e-2)"
        ),
    ))
}

fn kernel_consistency() -> Outcome {
    let (mut brute_gap, mut forms_gap) = (0.0f64, 0.0f64);
    for inst in [n3(), n4()] {
        let m = inst.levels() - 1;
        for i in 0..10u64 {
            let f = random_direction(500 + i, 32, 2.0 * PI, true, 1.0)?;
            let reduced = kernel_form_a1n(&inst.system, &f)?;
            brute_gap = brute_gap.max((reduced - kernel_bruteforce_a1n(&inst.system, &f)?).norm());
            let forms = dyson_forms_converged(&inst.system, &f, m, &Quadrature::default())?;
            forms_gap = forms_gap.max((reduced - forms.get(m, 1)).norm());
        }
    }
    let ok = brute_gap <= 1e-8 && forms_gap <= 1e-6;
    Ok((ok, format!("N=3,4 x 10 controls, M=32: |form - brute| = {brute_gap:.1e} (<= 1e-8), |form - dyson| = {forms_gap:.1e} (<= 1e-6)")))
}

fn resummation() -> Outcome {
    let sys = n4().system;
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    let mut worst_defect = 0.0f64;
    for i in 0..5u64 {
        let f = random_direction(600 + i, 64, 2.0 * PI, i % 2 == 1, 0.05)?;
        let defect = dyson_resum_defect(&sys, &f, 8, &Quadrature::default())?;
        let bound = remainder_bound(&sys, &f, 8)? + 1e-10;
        ok &= defect <= bound;
        worst_margin = worst_margin.min(bound - defect);
        worst_defect = worst_defect.max(defect);
    }
    Ok((ok, format!("5 controls at amplitude 0.05: max defect {worst_defect:.1e}, min slack to bound {worst_margin:.1e}")))
}

fn controllability() -> Outcome {
    let mut dims = Vec::new();
    let mut ok = true;
    for levels in 3..=6 {
        let sys = SystemSpec::new(levels, 1.0, 0.0, vec![1.0; levels - 1], 1.0)?;
        let lie = lie_rank(&sys, 1e-10, 12);
        ok &= lie.saturated && lie.dimension >= levels * levels - 1;
        dims.push(format!("N={levels}: {}/{}", lie.dimension, levels * levels - 1));
    }
    Ok((ok, format!("depth 12: {}", dims.join(", "))))
}

fn certify_with(manifest: &Path, cfg: &str, out: &Path, threads: Option<&str>) -> Result<(i32, Vec<u8>), Box<dyn std::error::Error>> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trapscope"));
    cmd.current_dir(manifest).arg("certify").arg(cfg).arg("--out").arg(out);
    match threads {
        Some(t) => cmd.env("TRAPSCOPE_THREADS", t),
        None => cmd.env_remove("TRAPSCOPE_THREADS"),
    };
    let status = cmd.output()?.status;
    Ok((status.code().unwrap_or(-1), std::fs::read(out)?))
}

fn end_to_end() -> Outcome {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir()?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (cfg, order) in [("examples/n3.cfg", 3u64), ("examples/n4.cfg", 5)] {
        let mut reports = Vec::new();
        for (k, threads) in [None, None, Some("1"), Some("4")].into_iter().enumerate() {
            let (code, bytes) = certify_with(&manifest, cfg, &dir.path().join(format!("r{k}.json")), threads)?;
            ok &= code == 0;
            reports.push(bytes);
        }
        let json: serde_json::Value = serde_json::from_slice(&reports[0])?;
        let claimed = json["claimed_order"].as_u64();
        let identical = reports.iter().all(|r| *r == reports[0]);
        ok &= claimed == Some(order) && identical;
        notes.push(format!("{cfg}: claimed_order {claimed:?}, byte-identical x4: {identical}"));
    }
    Ok((ok, notes.join("; ")))
}

fn witness() -> Outcome {
    let inst = n3();
    let mut best = f64::NEG_INFINITY;
    for (k, horizon) in [2.0 * PI, 4.0 * PI].into_iter().enumerate() {
        let r = witness_search(&inst.with_horizon(horizon)?, 1000 + k as u64, 500, (0.1, 2.0), 64)?;
        best = best.max(r.value);
    }
    Ok((best > 0.02, format!("budget 500, T in {{2pi, 4pi}}: best J = {best:.4} (> 0.02)")))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "stationarity", budget: Duration::from_secs(10), soft: false, run: stationarity },
        Criterion { id: 2, name: "second-order descent", budget: Duration::from_secs(20), soft: false, run: descent },
        Criterion { id: 3, name: "flatness window", budget: Duration::from_secs(60), soft: false, run: flatness },
        Criterion { id: 4, name: "leading positive order", budget: Duration::from_secs(120), soft: false, run: leading_order },
        Criterion { id: 5, name: "kernel triple consistency", budget: Duration::from_secs(60), soft: false, run: kernel_consistency },
        Criterion { id: 6, name: "dyson resummation", budget: Duration::from_secs(30), soft: false, run: resummation },
        Criterion { id: 7, name: "controllability rank", budget: Duration::from_secs(30), soft: false, run: controllability },
        Criterion { id: 8, name: "certificate end-to-end", budget: Duration::from_secs(300), soft: false, run: end_to_end },
        Criterion { id: 9, name: "non-optimality witness (soft)", budget: Duration::from_secs(300), soft: true, run: witness },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let (passed, detail) = match (c.run)() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let verdict = match (passed && in_time, c.soft) {
            (true, _) => "PASS",
            (false, true) => "FLAG",
            (false, false) => "FAIL",
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!(
            "{verdict} criterion {} {}: {detail} [{:.2}s of {}s]",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
