// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Chronological forms `A^n(t) = ∫_{t>t_1>…>t_n>0} f(t_1)…f(t_n) V_{t_1}…V_{t_n}`.
//!
//! They satisfy the triangular linear system `A^0 = I`,
//! `dA^n/dt = f(t) V_t A^{n−1}(t)`, `A^n(0) = 0`, which is integrated here with
//! classical RK4. The control is constant on each segment, so steps never
//! straddle a jump; the only discretization error comes from the phase
//! `e^{iωt}` carried by the elements of `V_t` that touch level 1.

use num_complex::Complex64;
use serde::Serialize;

use super::check_horizon;
use crate::controls::PiecewiseControl;
use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::numerics::{hermitian_spectral_norm, ComplexMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Step-size policy for the RK4 recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    /// Initial RK4 steps per control segment; `0` picks [`default_substeps`].
    pub substeps: usize,
    /// Required relative change between `s` and `2s` substeps. `None` runs once at `substeps`.
    pub convergence_tol: Option<f64>,
    pub max_substeps: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { substeps: 0, convergence_tol: Some(1e-9), max_substeps: 1 << 14 }
    }
}

impl Quadrature {
    pub fn fixed(substeps: usize) -> Self {
        Self { substeps, convergence_tol: None, max_substeps: substeps.max(1) }
    }
}

/// Final-time column `N` of `A^0 … A^{n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DysonForms {
    n_max: usize,
    levels: usize,
    table: Vec<Vec<Complex64>>,
    substeps: usize,
    relative_change: Option<f64>,
}

impl DysonForms {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `A^n_{lN}⟨f⟩`, `l` 1-based.
    pub fn get(&self, n: usize, l: usize) -> Complex64 {
        self.table[n][l - 1]
    }

    /// RK4 steps per control segment used for the returned values.
    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Relative change measured by the last doubling, when a convergence test ran.
    pub fn relative_change(&self) -> Option<f64> {
        self.relative_change
    }
}

/// Smallest substep count with `|ω|·T/(M·substeps) ≤ 0.1`.
pub fn default_substeps(sys: &SystemSpec, f: &PiecewiseControl) -> usize {
    ((sys.omega().abs() * f.step() / 0.1).ceil() as usize).max(1)
}

/// Column-major `N × k` blocks, one per order `0..=n_max`.
type Blocks = Vec<Vec<Complex64>>;

/// `out = V_t · x` for a column-major block with `cols` columns.
fn apply_vt(sys: &SystemSpec, phase: Complex64, x: &[Complex64], out: &mut [Complex64]) {
    let n = sys.levels();
    let v = sys.couplings();
    for (xc, oc) in x.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
        for l in 0..n {
            let mut acc = ZERO;
            if l > 0 {
                // ⟨l|V_t|l−1⟩; only the (2,1) element carries a phase
                let e = if l == 1 { phase.conj() * v[0] } else { Complex64::new(v[l - 1], 0.0) };
                acc += e * xc[l - 1];
            }
            if l + 1 < n {
                let e = if l == 0 { phase * v[0] } else { Complex64::new(v[l], 0.0) };
                acc += e * xc[l + 1];
            }
            oc[l] = acc;
        }
    }
}

fn integrate_blocks(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize, seed_cols: &[usize], substeps: usize) -> Blocks {
    let n = sys.levels();
    let width = n * seed_cols.len();
    let mut seed = vec![ZERO; width];
    for (c, &col) in seed_cols.iter().enumerate() {
        seed[c * n + col] = Complex64::new(1.0, 0.0);
    }
    let mut y: Blocks = vec![vec![ZERO; width]; n_max + 1];
    y[0] = seed;

    let omega = sys.omega();
    let h = f.step() / substeps as f64;
    let mut k: [Blocks; 4] = std::array::from_fn(|_| vec![vec![ZERO; width]; n_max + 1]);
    let mut arg = vec![ZERO; width];

    for (j, &fj) in f.values().iter().enumerate() {
        if fj == 0.0 {
            continue;
        }
        let t0 = f.segment_start(j);
        for s in 0..substeps {
            let t = t0 + s as f64 * h;
            let stage_time = [t, t + 0.5 * h, t + 0.5 * h, t + h];
            let stage_weight = [0.0, 0.5 * h, 0.5 * h, h];
            for stage in 0..4 {
                let phase = Complex64::from_polar(1.0, omega * stage_time[stage]);
                for order in 1..=n_max {
                    // argument state at this stage, order − 1
                    if stage == 0 || order == 1 {
                        arg.copy_from_slice(&y[order - 1]);
                    } else {
                        let prev = &k[stage - 1][order - 1];
                        for ((a, yv), kv) in arg.iter_mut().zip(&y[order - 1]).zip(prev) {
                            *a = yv + kv * stage_weight[stage];
                        }
                    }
                    let out = &mut k[stage][order];
                    apply_vt(sys, phase, &arg, out);
                    for z in out.iter_mut() {
                        *z *= fj;
                    }
                }
            }
            for order in 1..=n_max {
                let yo = &mut y[order];
                for i in 0..width {
                    yo[i] += (k[0][order][i] + 2.0 * k[1][order][i] + 2.0 * k[2][order][i] + k[3][order][i]) * (h / 6.0);
                }
            }
        }
    }
    y
}

/// Worst per-order relative difference between two runs.
///
/// Order `n` is measured against `max(max |A^n|, 1e-6·xⁿ/n!)` with
/// `x = ‖V‖∫|f|`, so orders that vanish identically compare in absolute terms
/// at their natural scale instead of amplifying roundoff. A rounding
/// allowance `16 ε xⁿ/n! √steps` (random-walk accumulation over `steps` RK4
/// steps) is subtracted first, so a change at the roundoff floor counts as
/// converged rather than forcing further doubling.
fn relative_change(coarse: &Blocks, fine: &Blocks, x: f64, steps: usize) -> f64 {
    let rounding = 16.0 * f64::EPSILON * (steps as f64).sqrt();
    let mut natural = 1.0;
    coarse
        .iter()
        .zip(fine)
        .enumerate()
        .skip(1)
        .map(|(n, (c, f))| {
            natural *= x / n as f64;
            let scale = f.iter().map(|z| z.norm()).fold(1e-6 * natural, f64::max);
            let diff = c.iter().zip(f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let diff = (diff - rounding * natural).max(0.0);
            if scale == 0.0 {
                if diff == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                diff / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Gershgorin bound on `‖V‖₂` times `∫|f|`.
fn natural_scale(sys: &SystemSpec, f: &PiecewiseControl) -> f64 {
    let v = sys.couplings();
    let row_max = (0..sys.levels())
        .map(|l| {
            let below = if l > 0 { v[l - 1].abs() } else { 0.0 };
            let above = if l < v.len() { v[l].abs() } else { 0.0 };
            below + above
        })
        .fold(0.0, f64::max);
    row_max * f.abs_integral()
}

fn converged_blocks(
    sys: &SystemSpec,
    f: &PiecewiseControl,
    n_max: usize,
    seed_cols: &[usize],
    quad: &Quadrature,
) -> Result<(Blocks, usize, Option<f64>)> {
    check_horizon(sys, f)?;
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut s = if quad.substeps == 0 { default_substeps(sys, f) } else { quad.substeps };
    let Some(tol) = quad.convergence_tol else {
        return Ok((integrate_blocks(sys, f, n_max, seed_cols, s), s, None));
    };
    let x = natural_scale(sys, f);
    let mut coarse = integrate_blocks(sys, f, n_max, seed_cols, s);
    loop {
        let fine = integrate_blocks(sys, f, n_max, seed_cols, 2 * s);
        let change = relative_change(&coarse, &fine, x, 2 * s * f.segments());
        if change < tol {
            return Ok((fine, 2 * s, Some(change)));
        }
        if 2 * s >= quad.max_substeps {
            return Err(Error::NonConvergence { change, substeps: 2 * s, tol });
        }
        s *= 2;
        coarse = fine;
    }
}

/// Forms at a fixed number of RK4 substeps per segment, no convergence test.
pub fn dyson_forms(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize, substeps: usize) -> Result<DysonForms> {
    if substeps < 1 {
        return Err(Error::InvalidArgument("substeps must be at least 1".into()));
    }
    dyson_forms_converged(sys, f, n_max, &Quadrature::fixed(substeps))
}

/// Forms with substep doubling until the relative change drops below the tolerance.
pub fn dyson_forms_converged(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize, quad: &Quadrature) -> Result<DysonForms> {
    let last = sys.levels() - 1;
    let (table, substeps, relative_change) = converged_blocks(sys, f, n_max, &[last], quad)?;
    Ok(DysonForms { n_max, levels: sys.levels(), table, substeps, relative_change })
}

/// Full matrices `A^0(T) … A^{n_max}(T)`.
pub fn dyson_matrices(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize, quad: &Quadrature) -> Result<Vec<ComplexMatrix>> {
    let n = sys.levels();
    let cols: Vec<usize> = (0..n).collect();
    let (blocks, _, _) = converged_blocks(sys, f, n_max, &cols, quad)?;
    // blocks are column-major; ComplexMatrix is row-major
    Ok(blocks
        .into_iter()
        .map(|b| ComplexMatrix::from_fn(n, |r, c| b[c * n + r]))
        .collect())
}

/// `A^n_{lN}⟨f⟩ = ⟨l|Vⁿ|N⟩/n! · (∫f)ⁿ`, valid for `l > 1` and `n ≤ N − 1`.
pub fn closed_form_aln(sys: &SystemSpec, f: &PiecewiseControl, l: usize, n: usize) -> Result<Complex64> {
    let big_n = sys.levels();
    if l <= 1 || l > big_n {
        return Err(Error::DomainError(format!("closed form needs 1 < l <= {big_n}, got l = {l}")));
    }
    if n > big_n - 1 {
        return Err(Error::DomainError(format!("closed form needs n <= {}, got n = {n}", big_n - 1)));
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let value = sys.v_power_element(l, n) / factorial * f.integral().powi(n as i32);
    Ok(Complex64::new(value, 0.0))
}

/// `(‖V‖₂ ∫|f|)^{n_max+1} / (n_max+1)!`, the tail bound of the truncated series.
pub fn remainder_bound(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize) -> Result<f64> {
    let x = hermitian_spectral_norm(&sys.v())? * f.abs_integral();
    Ok((1..=n_max + 1).fold(1.0, |acc, k| acc * x / k as f64))
}

/// `‖Σ_{n≤n_max} (−i)ⁿ Aⁿ(T) − e^{iTH0} U_T‖_F`.
pub fn dyson_resum_defect(sys: &SystemSpec, f: &PiecewiseControl, n_max: usize, quad: &Quadrature) -> Result<f64> {
    let forms = dyson_matrices(sys, f, n_max, quad)?;
    let mut series = ComplexMatrix::zeros(sys.levels());
    let mut coeff = Complex64::new(1.0, 0.0);
    for a in &forms {
        series = &series + &a.scale(coeff);
        coeff *= Complex64::new(0.0, -1.0);
    }
    let u = super::propagate(sys, f)?;
    let interaction = &crate::numerics::expm_mih(&sys.h0(), -sys.horizon())? * &u;
    Ok((&series - &interaction).frobenius_norm())
}
