// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Recover Taylor coefficients numerically from `J(t f)` and compare with the analytic ones.
//
// ```bash
// cargo run --example taylor_fit
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::controls::PiecewiseControl;
use trapscope::dynamics::{dyson_forms_converged, Quadrature};
use trapscope::landscape::{differential, taylor_fit};
use trapscope::model::{Observable, ProblemInstance, SystemSpec};
use trapscope::numerics::hermitian_spectral_norm;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // ω = 2 and f = cos: c_2 = 0 and c_4 = λ_1 (π/2)² = π²/4.
    let sys = SystemSpec::new(3, 2.0, 0.0, vec![1.0, 1.0], 2.0 * PI)?;
    let inst = ProblemInstance::new(sys.clone(), Observable::new(vec![1.0, -1.0, 0.0], true)?)?;
    let f = PiecewiseControl::from_fn_midpoint(2.0 * PI, 256, f64::cos)?;

    let radius = 1.0 / (hermitian_spectral_norm(&sys.v())? * f.abs_integral());
    let fit = taylor_fit(&inst, &f, 6, radius, 20)?;
    let forms = dyson_forms_converged(&sys, &f, 6, &Quadrature::default())?;
    println!("fit radius {:.4}, residual {:.1e}, condition {:.1}", fit.t_grid_radius, fit.residual, fit.condition);
    for n in 1..=6 {
        println!("  c_{n}: fitted {:+.6e}  analytic {:+.6e}", fit.coefficient(n), differential(&inst, &forms, n)?);
    }
    let target = PI * PI / 4.0;
    println!("c_4 relative error vs pi^2/4: {:.1e}", (fit.coefficient(4) - target).abs() / target);
    assert!((fit.coefficient(4) - target).abs() < 1e-2 * target);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
