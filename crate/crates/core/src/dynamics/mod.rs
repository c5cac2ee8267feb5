// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Controlled dynamics `i dU/dt = (H0 + f(t) V) U`, the Mayer objective, and
//! the chronological forms `A^n_{lN}` with their independent evaluations.

mod dyson;
mod kernel;

pub use dyson::{
    closed_form_aln, default_substeps, dyson_forms, dyson_forms_converged, dyson_matrices, dyson_resum_defect,
    remainder_bound, DysonForms, Quadrature,
};
pub use kernel::{kernel_bruteforce_a1n, kernel_form_a1n, BRUTEFORCE_MAX_LEVELS, BRUTEFORCE_MAX_SEGMENTS};

use crate::controls::PiecewiseControl;
use crate::error::{Error, Result};
use crate::model::{ProblemInstance, SystemSpec};
use crate::numerics::{expm_mih, unitarity_defect, ComplexMatrix};

/// Tolerance on `‖U†U − I‖_F` accepted by [`objective`].
pub const UNITARY_TOL: f64 = 1e-8;

pub(crate) fn check_horizon(sys: &SystemSpec, f: &PiecewiseControl) -> Result<()> {
    let (t_sys, t_f) = (sys.horizon(), f.horizon());
    if (t_sys - t_f).abs() > 1e-12 * t_sys.max(1.0) {
        return Err(Error::GridMismatch(format!("control horizon {t_f} differs from system horizon {t_sys}")));
    }
    Ok(())
}

/// `U_T` for a piecewise-constant control: the ordered product of exact
/// segment exponentials `exp(−i (H0 + f_j V) T/M)`.
pub fn propagate(sys: &SystemSpec, f: &PiecewiseControl) -> Result<ComplexMatrix> {
    check_horizon(sys, f)?;
    let h0 = sys.h0();
    let v = sys.v();
    let dt = f.step();
    let mut u = ComplexMatrix::identity(sys.levels());
    for &fj in f.values() {
        let h = &h0 + &v.scale_real(fj);
        u = &expm_mih(&h, dt)? * &u;
    }
    Ok(u)
}

/// `J_O = Tr(O U ρ0 U†) = Σ_l λ_l |⟨l|U|k0⟩|²` with normalized eigenvalues.
///
/// Add `inst.observable.shift()` for the unnormalized value.
pub fn objective(u: &ComplexMatrix, inst: &ProblemInstance) -> Result<f64> {
    if u.dim() != inst.levels() {
        return Err(Error::BadDimension(format!("{}x{} propagator for a {}-level instance", u.dim(), u.dim(), inst.levels())));
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect, tol: UNITARY_TOL });
    }
    let k0 = inst.initial_level() - 1;
    Ok((0..inst.levels())
        .map(|l| inst.observable.normalized()[l] * u[(l, k0)].norm_sqr())
        .sum())
}

/// Convenience: `J_O` evaluated at control `f`.
pub fn objective_at(inst: &ProblemInstance, f: &PiecewiseControl) -> Result<f64> {
    objective(&propagate(&inst.system, f)?, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controls::random_direction;
    use crate::model::Observable;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn instance(t: f64) -> ProblemInstance {
        let sys = SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], t).unwrap();
        ProblemInstance::new(sys, Observable::new(vec![1.0, -1.0, 0.0], true).unwrap()).unwrap()
    }

    #[test]
    fn free_evolution() {
        let inst = instance(2.0 * PI);
        let u = propagate(&inst.system, &PiecewiseControl::zeros(2.0 * PI, 16).unwrap()).unwrap();
        let expect = ComplexMatrix::from_fn(3, |r, c| match (r, c) {
            (0, 0) => Complex64::from_polar(1.0, -2.0 * PI),
            (r, c) if r == c => Complex64::new(1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
        assert!(u.max_abs_diff(&expect) < 1e-13);
        assert_eq!(objective(&u, &inst).unwrap(), 0.0);
    }

    #[test]
    fn tiny_horizon_is_near_identity() {
        let sys = SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 1e-6).unwrap();
        let u = propagate(&sys, &PiecewiseControl::constant(1e-6, 1, 1.0).unwrap()).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-5);
    }

    #[test]
    fn initial_state_stays_put_without_control() {
        let inst = instance(PI);
        let u = propagate(&inst.system, &PiecewiseControl::zeros(PI, 4).unwrap()).unwrap();
        assert!((u[(2, 2)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn objective_identity_and_bounds() {
        let inst = instance(2.0 * PI);
        assert_eq!(objective(&ComplexMatrix::identity(3), &inst).unwrap(), 0.0);
        for seed in 0..1000 {
            let f = random_direction(seed, 16, 2.0 * PI, seed % 2 == 0, 2.0).unwrap();
            let u = propagate(&inst.system, &f).unwrap();
            assert!(unitarity_defect(&u) <= 1e-10 * 3.0 * 16.0);
            let j = objective(&u, &inst).unwrap();
            assert!(j >= inst.observable.min() - 1e-12 && j <= inst.observable.max() + 1e-12);
        }
    }

    #[test]
    fn objective_rejects_non_unitary() {
        let inst = instance(1.0);
        let u = ComplexMatrix::identity(3).scale_real(1.1);
        assert!(matches!(objective(&u, &inst), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn propagate_rejects_wrong_horizon() {
        let inst = instance(1.0);
        let f = PiecewiseControl::zeros(2.0, 4).unwrap();
        assert!(matches!(propagate(&inst.system, &f), Err(Error::GridMismatch(_))));
    }
}
