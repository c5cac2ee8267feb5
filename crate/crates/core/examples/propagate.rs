// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Propagate a piecewise-constant control and evaluate the objective.
//
// ```bash
// cargo run --example propagate
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::controls::{random_direction, PiecewiseControl};
use trapscope::dynamics::{objective, propagate};
use trapscope::model::{Observable, ProblemInstance, SystemSpec};
use trapscope::numerics::unitarity_defect;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 2.0 * PI)?;
    let inst = ProblemInstance::new(sys.clone(), Observable::new(vec![1.0, -1.0, 0.0], true)?)?;

    // At f ≡ 0 the population stays in |N⟩, so J = λ_N = 0 after normalization.
    let zero = PiecewiseControl::zeros(sys.horizon(), 64)?;
    let u0 = propagate(&sys, &zero)?;
    let j0 = objective(&u0, &inst)?;
    println!("J(0) = {j0:.3e}");
    assert!(j0.abs() < 1e-12);

    // Random controls: U stays unitary and J stays within [λ_min, λ_max].
    for seed in 0..5 {
        let f = random_direction(seed, 64, sys.horizon(), false, 2.0)?;
        let u = propagate(&sys, &f)?;
        let j = objective(&u, &inst)?;
        let defect = unitarity_defect(&u);
        println!("seed {seed}: ||f|| = {:.3}, J = {j:+.6}, ||U*U - I|| = {defect:.1e}", f.norm());
        assert!(defect < 1e-10);
        assert!((inst.observable.min() - 1e-9..=inst.observable.max() + 1e-9).contains(&j));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
