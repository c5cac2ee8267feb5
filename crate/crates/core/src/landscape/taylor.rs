// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Least-squares extraction of the Taylor coefficients of `g(t) = J(t f) − J(0)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::controls::PiecewiseControl;
use crate::dynamics::objective_at;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;

/// Largest accepted condition number of the (radius-scaled) design matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Number of times the radius may be halved.
pub const MAX_SHRINKS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorFit {
    #[serde(skip)]
    pub direction: PiecewiseControl,
    pub max_order: usize,
    /// `coefficients[k − 1] = c_k`.
    pub coefficients: Vec<f64>,
    /// Largest absolute deviation between the fitted polynomial and the samples.
    pub residual: f64,
    /// Radius of the sampling grid actually used.
    pub t_grid_radius: f64,
    /// Whether the residual criterion was met before the shrink floor.
    pub accepted: bool,
    pub condition: f64,
}

impl TaylorFit {
    /// `c_k`, 1-based; zero beyond `max_order`.
    pub fn coefficient(&self, k: usize) -> f64 {
        if k == 0 || k > self.max_order { 0.0 } else { self.coefficients[k - 1] }
    }

    /// `Σ_{k=lo}^{hi} c_k t^k`.
    pub fn partial_sum(&self, lo: usize, hi: usize, t: f64) -> f64 {
        (lo..=hi.min(self.max_order)).map(|k| self.coefficient(k) * t.powi(k as i32)).sum()
    }
}

/// Fits `Σ_{k=1}^{max_order} c_k t^k` to `g` on `t = ±radius·{1/points, …, 1}`.
///
/// The radius is halved (at most [`MAX_SHRINKS`] times) until the residual is
/// at most `1e-3·|c_max|·radius^max`; the fit at the last radius tried is
/// returned when the floor is reached.
pub fn taylor_fit(inst: &ProblemInstance, f: &PiecewiseControl, max_order: usize, radius: f64, points: usize) -> Result<TaylorFit> {
    if max_order < 1 {
        return Err(Error::InvalidArgument("max_order must be at least 1".into()));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if points < 2 * max_order + 4 {
        return Err(Error::InvalidArgument(format!("need at least {} points for order {max_order}, got {points}", 2 * max_order + 4)));
    }
    let zero = PiecewiseControl::zeros(f.horizon(), f.segments())?;
    let g0 = objective_at(inst, &zero)?;

    // scaled abscissae s = t / radius are the same at every radius
    let s: Vec<f64> = (1..=points)
        .flat_map(|k| {
            let x = k as f64 / points as f64;
            [-x, x]
        })
        .collect();
    let design = DMatrix::from_fn(s.len(), max_order, |r, c| s[r].powi(c as i32 + 1));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { cond: condition });
    }

    let mut r = radius;
    let mut attempt = 0;
    loop {
        let g: Vec<f64> = s
            .iter()
            .map(|&sk| objective_at(inst, &f.scaled(sk * r)).map(|j| j - g0))
            .collect::<Result<_>>()?;
        let rhs = DVector::from_vec(g.clone());
        let scaled = svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let fitted = &design * &scaled;
        let residual = fitted.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let coefficients: Vec<f64> = scaled.iter().enumerate().map(|(k, d)| d / r.powi(k as i32 + 1)).collect();
        let top = coefficients[max_order - 1].abs() * r.powi(max_order as i32);
        let accepted = residual <= 1e-3 * top;
        if accepted || attempt == MAX_SHRINKS {
            return Ok(TaylorFit {
                direction: f.clone(),
                max_order,
                coefficients,
                residual,
                t_grid_radius: r,
                accepted,
                condition,
            });
        }
        r *= 0.5;
        attempt += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Observable, SystemSpec};
    use std::f64::consts::PI;

    fn instance(a: f64) -> ProblemInstance {
        let sys = SystemSpec::new(3, a, 0.0, vec![1.0, 1.0], 2.0 * PI).unwrap();
        ProblemInstance::new(sys, Observable::new(vec![1.0, -1.0, 0.0], true).unwrap()).unwrap()
    }

    #[test]
    fn zero_direction_gives_zero_coefficients() {
        let f = PiecewiseControl::zeros(2.0 * PI, 16).unwrap();
        let fit = taylor_fit(&instance(1.0), &f, 6, 1.0, 20).unwrap();
        assert!(fit.coefficients.iter().all(|c| *c == 0.0));
        assert_eq!(fit.residual, 0.0);
        assert_eq!(fit.coefficient(0), 0.0);
        assert_eq!(fit.coefficient(7), 0.0);
    }

    #[test]
    fn constant_direction_second_order() {
        // ∫f = √(2π): c_2 = λ_2 v_2² (∫f)² = −2π
        let f = PiecewiseControl::constant(2.0 * PI, 64, 1.0 / (2.0 * PI).sqrt()).unwrap();
        let radius = 1.0 / (2.0f64.sqrt() * f.abs_integral());
        let fit = taylor_fit(&instance(1.0), &f, 6, radius, 24).unwrap();
        assert!((fit.coefficient(2) + 2.0 * PI).abs() < 1e-3 * 2.0 * PI, "{}", fit.coefficient(2));
        assert!(fit.coefficient(1).abs() < 1e-6);
    }

    #[test]
    fn cosine_direction_fourth_order() {
        let f = PiecewiseControl::from_fn_midpoint(2.0 * PI, 256, f64::cos).unwrap();
        let radius = 1.0 / (2.0f64.sqrt() * f.abs_integral());
        let fit = taylor_fit(&instance(2.0), &f, 6, radius, 24).unwrap();
        let target = PI * PI / 4.0;
        assert!((fit.coefficient(4) - target).abs() < 1e-2 * target, "{}", fit.coefficient(4));
        // orders above max_order leak into c_2 at the 1e-5 level on this radius
        assert!(fit.coefficient(2).abs() < 1e-4);
        assert!(fit.accepted);
    }

    #[test]
    fn partial_sums() {
        let fit = TaylorFit {
            direction: PiecewiseControl::zeros(1.0, 8).unwrap(),
            max_order: 3,
            coefficients: vec![1.0, 2.0, 3.0],
            residual: 0.0,
            t_grid_radius: 1.0,
            accepted: true,
            condition: 1.0,
        };
        assert_eq!(fit.partial_sum(1, 3, 2.0), 2.0 + 8.0 + 24.0);
        assert_eq!(fit.partial_sum(2, 10, 1.0), 5.0);
    }

    #[test]
    fn argument_checks() {
        let f = PiecewiseControl::zeros(2.0 * PI, 8).unwrap();
        let inst = instance(1.0);
        assert!(taylor_fit(&inst, &f, 0, 1.0, 20).is_err());
        assert!(taylor_fit(&inst, &f, 4, -1.0, 20).is_err());
        assert!(taylor_fit(&inst, &f, 4, 1.0, 11).is_err());
    }
}
