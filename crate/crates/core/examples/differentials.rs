// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Taylor coefficients `(1/n!) J^{(n)}(0)(f, …, f)` of the objective at the zero control.
//
// Odd orders vanish; order 2 is `λ_{N−1} v_{N−1}² (∫f)²`; on mean-zero
// directions everything below `2N − 2` vanishes and order `2N − 2` equals
// `λ_1 |A^{N−1}_{1N}|² ≥ 0`.
//
// ```bash
// cargo run --example differentials
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::controls::random_direction;
use trapscope::dynamics::{dyson_forms_converged, Quadrature};
use trapscope::landscape::differential;
use trapscope::model::{Observable, ProblemInstance, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = SystemSpec::new(4, 1.0, 0.0, vec![1.0, 1.0, 1.0], 2.0 * PI)?;
    let inst = ProblemInstance::new(sys.clone(), Observable::new(vec![1.0, -0.5, -1.0, 0.0], true)?)?;
    for (seed, mean_zero) in [(1, false), (2, true)] {
        let f = random_direction(seed, 64, sys.horizon(), mean_zero, 1.0)?;
        let forms = dyson_forms_converged(&sys, &f, 6, &Quadrature::default())?;
        println!("direction seed {seed}, mean-zero {mean_zero}, integral {:+.3e}", f.integral());
        for n in 1..=6 {
            println!("  c_{n} = {:+.6e}", differential(&inst, &forms, n)?);
        }
        if mean_zero {
            assert!(differential(&inst, &forms, 6)? >= -1e-8);
        } else {
            let expected = -f.integral().powi(2);
            assert!((differential(&inst, &forms, 2)? - expected).abs() < 1e-9);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
