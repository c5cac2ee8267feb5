// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Seeded search for a control that beats `J = λ_N`, showing the trap is not a global optimum.
//
// ```bash
// cargo run --example witness
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::landscape::witness_search;
use trapscope::model::{Observable, ProblemInstance, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 2.0 * PI)?;
    let inst = ProblemInstance::new(sys, Observable::new(vec![1.0, -1.0, 0.0], true)?)?;
    let result = witness_search(&inst, 11, 300, (0.1, 2.0), 64)?;
    println!(
        "T = {:.4}: best J = {:.6} after {} evaluations (threshold {:.3}, found {})",
        result.horizon, result.value, result.evaluations, result.threshold, result.success
    );
    println!("kinematic maximum is lambda_1 - lambda_N = {}", inst.observable.max());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
