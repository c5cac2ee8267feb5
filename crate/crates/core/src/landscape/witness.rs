// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Best-effort search for a control that beats the zero control.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::controls::{random_direction, PiecewiseControl};
use crate::dynamics::objective_at;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;

/// Rounds of coordinate-wise refinement.
pub const GREEDY_ROUNDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessResult {
    pub horizon: f64,
    #[serde(skip)]
    pub control: PiecewiseControl,
    /// Best normalized objective found.
    pub value: f64,
    /// `J(0) + 0.01 (λ_1 − λ_N)`.
    pub threshold: f64,
    pub success: bool,
    pub evaluations: usize,
}

/// Random sampling followed by greedy refinement of the best sample.
///
/// Sample `i` draws an amplitude uniformly from `amplitude_range` and a
/// control seed from a ChaCha8 stream seeded with `seed`. Refinement scans
/// segments in index order, accepting the first improving `±step`; a round
/// without improvement halves the step.
pub fn witness_search(
    inst: &ProblemInstance,
    seed: u64,
    budget: usize,
    amplitude_range: (f64, f64),
    segments: usize,
) -> Result<WitnessResult> {
    if budget < 1 {
        return Err(Error::InvalidArgument("witness budget must be at least 1".into()));
    }
    let (lo, hi) = amplitude_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad amplitude range ({lo}, {hi})")));
    }
    let horizon = inst.system.horizon();
    let zero = PiecewiseControl::zeros(horizon, segments)?;
    let base = objective_at(inst, &zero)?;
    let threshold = base + 0.01 * (inst.observable.lambda(1) - inst.observable.lambda(inst.levels()));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = zero;
    let mut best_value = base;
    let mut evaluations = 1;
    for _ in 0..budget {
        let amplitude = lo + (hi - lo) * rng.random::<f64>();
        let f = random_direction(rng.next_u64(), segments, horizon, false, amplitude)?;
        let value = objective_at(inst, &f)?;
        evaluations += 1;
        if value > best_value {
            best_value = value;
            best = f;
        }
    }

    let mut values = best.values().to_vec();
    let mut step = 0.5 * hi;
    for _ in 0..GREEDY_ROUNDS {
        let mut improved = false;
        for j in 0..segments {
            for delta in [step, -step] {
                values[j] += delta;
                let value = objective_at(inst, &PiecewiseControl::new(horizon, values.clone())?)?;
                evaluations += 1;
                if value > best_value {
                    best_value = value;
                    improved = true;
                    break;
                }
                values[j] -= delta;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(WitnessResult {
        horizon,
        control: PiecewiseControl::new(horizon, values)?,
        value: best_value,
        threshold,
        success: best_value > threshold,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Observable, SystemSpec};
    use std::f64::consts::PI;

    fn instance() -> ProblemInstance {
        let sys = SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 2.0 * PI).unwrap();
        ProblemInstance::new(sys, Observable::new(vec![1.0, -1.0, 0.0], true).unwrap()).unwrap()
    }

    #[test]
    fn respects_kinematic_bound_and_is_deterministic() {
        let inst = instance();
        let a = witness_search(&inst, 3, 20, (0.2, 1.5), 16).unwrap();
        let b = witness_search(&inst, 3, 20, (0.2, 1.5), 16).unwrap();
        assert_eq!(a, b);
        assert!(a.value <= inst.observable.lambda(1) + 1e-12);
        assert!(a.value >= 0.0);
        // each coordinate visit costs one or two evaluations
        assert!(a.evaluations >= 1 + 20 + GREEDY_ROUNDS * 16);
        assert!(a.evaluations <= 1 + 20 + GREEDY_ROUNDS * 16 * 2);
    }

    #[test]
    fn rejects_zero_budget() {
        assert!(witness_search(&instance(), 1, 0, (0.1, 1.0), 8).is_err());
        assert!(witness_search(&instance(), 1, 5, (0.0, 1.0), 8).is_err());
    }
}
