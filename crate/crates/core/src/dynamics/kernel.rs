// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Two independent evaluations of `A^{N−1}_{1N}⟨f⟩ = ∫_{[0,T]^m} K f(t_1)…f(t_m)`,
//! `m = N − 1`, with `K = v_1⋯v_m / m! · e^{iω max(t_1,…,t_m)}`.
//!
//! * [`kernel_form_a1n`] uses the reduction
//!   `∫_{[0,T]^m} e^{iω max t} Π f(t_i) dt = m ∫_0^T e^{iωs} f(s) F(s)^{m−1} ds`,
//!   `F(s) = ∫_0^s f`, obtained by splitting the cube according to which
//!   coordinate is largest. On each segment `F` is linear, so the integral is
//!   a finite sum of moments `∫_0^h u^k e^{iωu} du` evaluated in closed form.
//! * [`kernel_bruteforce_a1n`] walks all `M^m` tuples of control segments. A
//!   cell whose top segment `J` is hit by `r` coordinates contributes
//!   `h^{m−r} e^{iω s_J} · r ∫_0^h u^{r−1} e^{iωu} du` (the law of the max of `r`
//!   uniforms), with that one-dimensional integral done by Gauss–Legendre.
//!
//! Both are exact for piecewise-constant controls up to roundoff.

use num_complex::Complex64;

use super::check_horizon;
use crate::controls::PiecewiseControl;
use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::numerics::gauss_legendre;

pub const BRUTEFORCE_MAX_LEVELS: usize = 5;
pub const BRUTEFORCE_MAX_SEGMENTS: usize = 64;

/// `μ_k = ∫_0^h u^k e^{iωu} du` for `k = 0..=k_max`, closed form.
fn phase_moments(omega: f64, h: f64, k_max: usize) -> Vec<Complex64> {
    let x = omega * h;
    if x.abs() < 1.0 {
        // h^{k+1} Σ_p (iωh)^p / (p! (k+p+1))
        (0..=k_max)
            .map(|k| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut term = Complex64::new(1.0, 0.0);
                for p in 0..60 {
                    let contrib = term / (k + p + 1) as f64;
                    sum += contrib;
                    if contrib.norm() < 1e-18 * sum.norm() {
                        break;
                    }
                    term *= Complex64::new(0.0, x) / (p + 1) as f64;
                }
                sum * h.powi(k as i32 + 1)
            })
            .collect()
    } else {
        let i_omega = Complex64::new(0.0, omega);
        let end = Complex64::from_polar(1.0, x);
        let mut out = Vec::with_capacity(k_max + 1);
        out.push((end - 1.0) / i_omega);
        for k in 1..=k_max {
            let prev = out[k - 1];
            out.push((end * h.powi(k as i32) - prev * k as f64) / i_omega);
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `A^{N−1}_{1N}⟨f⟩` via the one-dimensional max reduction; `O(M·N)`.
pub fn kernel_form_a1n(sys: &SystemSpec, f: &PiecewiseControl) -> Result<Complex64> {
    check_horizon(sys, f)?;
    let m = sys.levels() - 1;
    let h = f.step();
    let omega = sys.omega();
    let mu = phase_moments(omega, h, m - 1);
    let binom: Vec<f64> = (0..m).map(|k| binomial(m - 1, k)).collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut big_f: f64 = 0.0;
    for (j, &fj) in f.values().iter().enumerate() {
        if fj != 0.0 {
            // ∫_0^h e^{iω(s_j+u)} f_j (F_j + f_j u)^{m−1} du
            let mut seg = Complex64::new(0.0, 0.0);
            for k in 0..m {
                seg += mu[k] * (binom[k] * big_f.powi((m - 1 - k) as i32) * fj.powi(k as i32));
            }
            total += seg * Complex64::from_polar(fj, omega * f.segment_start(j));
        }
        big_f += fj * h;
    }
    let inv_factorial: f64 = (1..m).fold(1.0, |acc, k| acc / k as f64);
    Ok(total * (sys.coupling_product() * inv_factorial))
}

/// Brute-force `M^{N−1}` enumeration of the kernel integral; test oracle only.
pub fn kernel_bruteforce_a1n(sys: &SystemSpec, f: &PiecewiseControl) -> Result<Complex64> {
    check_horizon(sys, f)?;
    if sys.levels() > BRUTEFORCE_MAX_LEVELS || f.segments() > BRUTEFORCE_MAX_SEGMENTS {
        return Err(Error::TooExpensive(format!(
            "brute force needs N <= {BRUTEFORCE_MAX_LEVELS} and M <= {BRUTEFORCE_MAX_SEGMENTS}, got N = {}, M = {}",
            sys.levels(),
            f.segments()
        )));
    }
    let m = sys.levels() - 1;
    let segs = f.segments();
    let h = f.step();
    let omega = sys.omega();

    // tie[r] = r ∫_0^h u^{r−1} e^{iωu} du, composite Gauss–Legendre
    let (nodes, weights) = gauss_legendre(20);
    let panels = ((omega.abs() * h).ceil() as usize).max(1);
    let pw = h / panels as f64;
    let tie: Vec<Complex64> = (0..=m)
        .map(|r| {
            if r == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..panels {
                let lo = p as f64 * pw;
                for (x, w) in nodes.iter().zip(&weights) {
                    let u = lo + 0.5 * pw * (x + 1.0);
                    acc += Complex64::from_polar(0.5 * pw * w * u.powi(r as i32 - 1), omega * u);
                }
            }
            acc * r as f64
        })
        .collect();
    let h_pow: Vec<f64> = (0..=m).map(|p| h.powi(p as i32)).collect();
    let phase: Vec<Complex64> = (0..segs).map(|j| Complex64::from_polar(1.0, omega * f.segment_start(j))).collect();

    let values = f.values();
    let mut idx = vec![0usize; m];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let top = *idx.iter().max().unwrap();
        let r = idx.iter().filter(|&&j| j == top).count();
        let prod: f64 = idx.iter().map(|&j| values[j]).product();
        if prod != 0.0 {
            total += phase[top] * tie[r] * (prod * h_pow[m - r]);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == m {
                let factorial: f64 = (1..=m).map(|k| k as f64).product();
                return Ok(total * (sys.coupling_product() / factorial));
            }
            idx[pos] += 1;
            if idx[pos] < segs {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
