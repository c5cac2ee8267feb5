// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// The top form `A^{N−1}_{1N}` computed three independent ways.
//
// The ODE-integrated forms, the one-dimensional max reduction and a
// brute-force walk over all `M^{N−1}` segment tuples must agree.
//
// ```bash
// cargo run --example kernel
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::controls::{random_direction, PiecewiseControl};
use trapscope::dynamics::{dyson_forms_converged, kernel_bruteforce_a1n, kernel_form_a1n, Quadrature};
use trapscope::model::SystemSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for levels in [3, 4] {
        let sys = SystemSpec::new(levels, 1.0, 0.0, vec![1.0; levels - 1], 2.0 * PI)?;
        let m = levels - 1;
        for seed in 0..3 {
            let f = random_direction(seed, 32, sys.horizon(), true, 1.0)?;
            let forms = dyson_forms_converged(&sys, &f, m, &Quadrature::default())?.get(m, 1);
            let reduced = kernel_form_a1n(&sys, &f)?;
            let brute = kernel_bruteforce_a1n(&sys, &f)?;
            let spread = (forms - reduced).norm().max((reduced - brute).norm());
            println!("N = {levels}, seed {seed}: A = {reduced:.6}, max disagreement {spread:.1e}");
            assert!(spread <= 1e-8 * (1.0 + brute.norm()));
        }
    }

    // Fourier picture: with ω = 2 and f = cos, A^2_{13} = iπ/2.
    let sys = SystemSpec::new(3, 2.0, 0.0, vec![1.0, 1.0], 2.0 * PI)?;
    let f = PiecewiseControl::from_fn_midpoint(2.0 * PI, 256, f64::cos)?;
    let a = kernel_form_a1n(&sys, &f)?;
    println!("omega = 2, f = cos: A^2_13 = {a:.6} (expected {:.6}i)", PI / 2.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
