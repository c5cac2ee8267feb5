// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Dimension of the dynamical Lie algebra generated by `iH0` and `iV`.
//
// ```bash
// cargo run --example controllability
// ```

use std::error::Error;

use trapscope::landscape::lie_rank;
use trapscope::model::SystemSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for levels in 3..=6 {
        let sys = SystemSpec::new(levels, 1.0, 0.0, vec![1.0; levels - 1], 1.0)?;
        let lie = lie_rank(&sys, 1e-10, 12);
        println!(
            "N = {levels}: dimension {} of {} (saturated {}, depth {})",
            lie.dimension,
            levels * levels - 1,
            lie.saturated,
            lie.depth_reached
        );
        assert!(lie.saturated);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
