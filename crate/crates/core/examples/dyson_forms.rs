// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

// Chronological forms `A^n_{lN}` of the interaction-picture expansion.
//
// Compares low orders with their closed forms and checks that the truncated
// series reproduces the propagator within the tail bound.
//
// ```bash
// cargo run --example dyson_forms
// ```

use std::error::Error;
use std::f64::consts::PI;

use trapscope::controls::random_direction;
use trapscope::dynamics::{closed_form_aln, dyson_forms_converged, dyson_resum_defect, remainder_bound, Quadrature};
use trapscope::model::SystemSpec;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let sys = SystemSpec::new(4, 1.0, 0.0, vec![1.0, 0.8, 1.2], 2.0 * PI)?;
    let f = random_direction(7, 64, sys.horizon(), false, 1.0)?;
    let quad = Quadrature::default();
    let forms = dyson_forms_converged(&sys, &f, 6, &quad)?;
    println!("substeps after refinement: {}", forms.substeps());

    // Parity: A^n_{lN} vanishes unless n ≡ N − l (mod 2).
    for n in 0..=6 {
        let row: Vec<String> = (1..=4).map(|l| format!("{:9.2e}", forms.get(n, l).norm())).collect();
        println!("|A^{n}_(l,4)| for l = 1..4: {}", row.join(" "));
    }

    // Closed forms exist for the first rungs of the ladder.
    for (l, n) in [(4, 0), (3, 1), (4, 2)] {
        let exact = closed_form_aln(&sys, &f, l, n)?;
        let diff = (forms.get(n, l) - exact).norm();
        println!("A^{n}_({l},4): forms vs closed form differ by {diff:.1e}");
        assert!(diff < 1e-9);
    }

    // Small controls: Σ_{n ≤ 8} A^n reproduces e^{iH0 T} U(T) up to the tail bound.
    let small = random_direction(3, 64, sys.horizon(), false, 0.05)?;
    let defect = dyson_resum_defect(&sys, &small, 8, &quad)?;
    let bound = remainder_bound(&sys, &small, 8)?;
    println!("resummation defect {defect:.2e} vs tail bound {bound:.2e}");
    assert!(defect <= bound + 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
