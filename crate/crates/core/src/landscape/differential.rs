// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Taylor coefficients of `t ↦ J_O(t f)` at the zero control, from the forms `A^n_{lN}`.

use num_complex::Complex64;

use crate::dynamics::DysonForms;
use crate::error::{Error, Result};
use crate::model::ProblemInstance;

/// Relative bound on the imaginary residue of the differential sum.
pub const NON_REAL_TOL: f64 = 1e-10;

/// `(1/n!) J^{(n)}_O(0)(f, …, f)`.
///
/// Evaluates `Σ_{j=0}^{n} Σ_{l<N} (−1)^{n−j} iⁿ λ_l A^j_{lN} conj(A^{n−j}_{lN})`;
/// `λ_N = 0` after normalization drops the `l = N` row. For this family
/// `A^j_{lN}` vanishes unless `j ≡ N − l (mod 2)`, so every odd order is
/// identically zero and the sign convention only matters for even `n`.
pub fn differential(inst: &ProblemInstance, forms: &DysonForms, n: usize) -> Result<f64> {
    if forms.n_max() < n {
        return Err(Error::InsufficientOrder { requested: n, available: forms.n_max() });
    }
    check_instance(inst, forms)?;
    let big_n = inst.levels();
    let i_pow = Complex64::new(0.0, 1.0).powi(n as i32);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for l in 1..big_n {
        let lambda = inst.observable.lambda(l);
        if lambda == 0.0 {
            continue;
        }
        for j in 0..=n {
            let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let term = i_pow * forms.get(j, l) * forms.get(n - j, l).conj() * (sign * lambda);
            magnitude += term.norm();
            sum += term;
        }
    }
    if sum.im.abs() > NON_REAL_TOL * magnitude {
        return Err(Error::NonRealResult { imag: sum.im, magnitude });
    }
    Ok(sum.re)
}

/// `λ_1 |A^{N−1}_{1N}|²`, the order-`2N−2` coefficient on mean-zero controls.
pub fn order_2n2_value(inst: &ProblemInstance, forms: &DysonForms) -> Result<f64> {
    let m = inst.levels() - 1;
    if forms.n_max() < m {
        return Err(Error::InsufficientOrder { requested: m, available: forms.n_max() });
    }
    check_instance(inst, forms)?;
    Ok(inst.observable.lambda(1) * forms.get(m, 1).norm_sqr())
}

fn check_instance(inst: &ProblemInstance, forms: &DysonForms) -> Result<()> {
    if forms.levels() != inst.levels() {
        return Err(Error::BadDimension(format!(
            "forms for {} levels used with a {}-level instance",
            forms.levels(),
            inst.levels()
        )));
    }
    if inst.initial_level() != inst.levels() {
        return Err(Error::DomainError("differentials at f = 0 need the initial state |N><N|".into()));
    }
    Ok(())
}
