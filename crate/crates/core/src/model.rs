// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! The degenerate ladder family: `H0 = a|1⟩⟨1| + b Σ_{k≥2} |k⟩⟨k|` with a real
//! nearest-neighbour coupling `V`, a diagonal target observable, and the
//! initial state `|N⟩⟨N|`.
//!
//! Level indices are 1-based everywhere in this module's public API.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Validated `(H0, V)` pair together with the control horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    levels: usize,
    a: f64,
    b: f64,
    couplings: Vec<f64>,
    horizon: f64,
}

impl SystemSpec {
    /// Validates and builds a system with `levels` levels.
    pub fn new(levels: usize, a: f64, b: f64, couplings: Vec<f64>, horizon: f64) -> Result<Self> {
        if levels < 3 {
            return Err(Error::BadDimension(format!("need at least 3 levels, got {levels}")));
        }
        if couplings.len() != levels - 1 {
            return Err(Error::BadDimension(format!(
                "{levels} levels need {} couplings, got {}",
                levels - 1,
                couplings.len()
            )));
        }
        if !a.is_finite() || !b.is_finite() || couplings.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("energies and couplings must be finite".into()));
        }
        if (a - b).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()) {
            return Err(Error::DegenerateSpectrum { a, b });
        }
        if let Some(k) = couplings.iter().position(|&v| v == 0.0) {
            return Err(Error::ZeroCoupling { index: k + 1 });
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        Ok(Self { levels, a, b, couplings, horizon })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Transition frequency `ω = a − b`; the only energy scale the interaction picture sees.
    pub fn omega(&self) -> f64 {
        self.a - self.b
    }

    /// Couplings `v_1 … v_{N−1}`.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Coupling `v_k` between levels `k` and `k+1`, 1-based.
    pub fn coupling(&self, k: usize) -> f64 {
        self.couplings[k - 1]
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Same system with a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.levels, self.a, self.b, self.couplings.clone(), horizon)
    }

    /// Same system with every coupling multiplied by `factor`.
    pub fn with_scaled_couplings(&self, factor: f64) -> Result<Self> {
        let couplings = self.couplings.iter().map(|v| v * factor).collect();
        Self::new(self.levels, self.a, self.b, couplings, self.horizon)
    }

    /// Energy of level `l` (1-based).
    pub fn energy(&self, l: usize) -> f64 {
        if l == 1 { self.a } else { self.b }
    }

    /// `H0 = diag(a, b, …, b)`.
    pub fn h0(&self) -> ComplexMatrix {
        let diag: Vec<f64> = (1..=self.levels).map(|l| self.energy(l)).collect();
        ComplexMatrix::from_real_diagonal(&diag)
    }

    /// Tridiagonal `V` with `V_{k,k+1} = V_{k+1,k} = v_k`.
    pub fn v(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.levels);
        for (k, &vk) in self.couplings.iter().enumerate() {
            m[(k, k + 1)] = Complex64::new(vk, 0.0);
            m[(k + 1, k)] = Complex64::new(vk, 0.0);
        }
        m
    }

    /// Bare matrix element `⟨l|V|k⟩`, 1-based.
    pub fn v_element(&self, l: usize, k: usize) -> f64 {
        match l.abs_diff(k) {
            1 => self.couplings[l.min(k) - 1],
            _ => 0.0,
        }
    }

    /// `⟨l|V_t|k⟩` with `V_t = e^{itH0} V e^{−itH0}`.
    ///
    /// Only elements touching level 1 pick up the phase `e^{±iωt}`.
    pub fn interaction_element(&self, l: usize, k: usize, t: f64) -> Complex64 {
        assert!((1..=self.levels).contains(&l) && (1..=self.levels).contains(&k), "level out of range");
        let v = self.v_element(l, k);
        if v == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(v, t * (self.energy(l) - self.energy(k)))
    }

    /// `⟨l|Vⁿ|N⟩`, by repeated tridiagonal products.
    pub fn v_power_element(&self, l: usize, n: usize) -> f64 {
        assert!((1..=self.levels).contains(&l), "level out of range");
        let big_n = self.levels;
        let mut x = vec![0.0; big_n];
        x[big_n - 1] = 1.0;
        for _ in 0..n {
            let mut next = vec![0.0; big_n];
            for (i, slot) in next.iter_mut().enumerate() {
                let below = if i > 0 { self.couplings[i - 1] * x[i - 1] } else { 0.0 };
                let above = if i + 1 < big_n { self.couplings[i] * x[i + 1] } else { 0.0 };
                *slot = match (below == 0.0, above == 0.0) {
                    (true, true) => 0.0,
                    (true, false) => above,
                    (false, true) => below,
                    (false, false) => below + above,
                };
            }
            x = next;
        }
        x[l - 1]
    }

    /// `⟨1|V^{N−1}|N⟩ = v_1 ⋯ v_{N−1}`.
    pub fn coupling_product(&self) -> f64 {
        self.couplings.iter().rev().fold(1.0, |acc, v| v * acc)
    }
}

/// Diagonal target operator `O = Σ λ_k |k⟩⟨k|`, stored shifted so that `λ_N = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observable {
    raw: Vec<f64>,
    normalized: Vec<f64>,
    shift: f64,
    theorem_mode: bool,
}

impl Observable {
    /// Normalizes `λ` by subtracting `λ_N`. In theorem mode also requires `λ_1 > λ_N > λ_{N−1}`.
    pub fn new(eigenvalues: Vec<f64>, theorem_mode: bool) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(Error::BadDimension("observable needs at least 2 eigenvalues".into()));
        }
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("observable eigenvalues must be finite".into()));
        }
        let n = eigenvalues.len();
        let (first, prev, last) = (eigenvalues[0], eigenvalues[n - 2], eigenvalues[n - 1]);
        if theorem_mode && !(first > last && last > prev) {
            return Err(Error::OrderingViolation(format!(
                "need lambda_1 > lambda_N > lambda_(N-1), got {first} , {last} , {prev}"
            )));
        }
        let shift = last;
        let normalized = eigenvalues.iter().map(|x| x - shift).collect();
        Ok(Self { raw: eigenvalues, normalized, shift, theorem_mode })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Normalized `λ_l` (1-based), with `λ_N = 0`.
    pub fn lambda(&self, l: usize) -> f64 {
        self.normalized[l - 1]
    }

    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// The amount subtracted from every eigenvalue; raw J = normalized J + shift.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn theorem_mode(&self) -> bool {
        self.theorem_mode
    }

    pub fn min(&self) -> f64 {
        self.normalized.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.normalized.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A system, a target and the initially populated level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub system: SystemSpec,
    pub observable: Observable,
    initial_level: usize,
}

impl ProblemInstance {
    /// Instance with `ρ0 = |N⟩⟨N|`.
    pub fn new(system: SystemSpec, observable: Observable) -> Result<Self> {
        let n = system.levels();
        Self::with_initial_level(system, observable, n)
    }

    pub fn with_initial_level(system: SystemSpec, observable: Observable, initial_level: usize) -> Result<Self> {
        if observable.len() != system.levels() {
            return Err(Error::BadDimension(format!(
                "observable has {} eigenvalues for a {}-level system",
                observable.len(),
                system.levels()
            )));
        }
        if !(1..=system.levels()).contains(&initial_level) {
            return Err(Error::BadDimension(format!("initial level {initial_level} out of range")));
        }
        Ok(Self { system, observable, initial_level })
    }

    pub fn initial_level(&self) -> usize {
        self.initial_level
    }

    pub fn levels(&self) -> usize {
        self.system.levels()
    }

    /// Same instance on a different horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::with_initial_level(self.system.with_horizon(horizon)?, self.observable.clone(), self.initial_level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::expm_mih;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn reference() -> SystemSpec {
        SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 2.0 * PI).unwrap()
    }

    #[test]
    fn builds_reference_matrices() {
        let sys = reference();
        assert_eq!(sys.h0(), ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]));
        let v = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(sys.v(), v);
        assert_eq!(sys.omega(), 1.0);
    }

    #[test]
    fn rejects_invalid_systems() {
        assert!(matches!(
            SystemSpec::new(3, 1.0, 1.0, vec![1.0, 1.0], 1.0),
            Err(Error::DegenerateSpectrum { .. })
        ));
        assert!(matches!(
            SystemSpec::new(3, 1.0, 0.0, vec![1.0, 0.0], 1.0),
            Err(Error::ZeroCoupling { index: 2 })
        ));
        assert!(matches!(SystemSpec::new(2, 1.0, 0.0, vec![1.0], 1.0), Err(Error::BadDimension(_))));
        assert!(matches!(SystemSpec::new(4, 1.0, 0.0, vec![1.0, 1.0], 1.0), Err(Error::BadDimension(_))));
        assert!(SystemSpec::new(3, 1.0, 0.0, vec![1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn four_level_transcription() {
        let sys = SystemSpec::new(4, 2.0, -1.0, vec![1.0, 2.0, 3.0], 5.0).unwrap();
        assert_eq!(sys.v()[(2, 3)], Complex64::new(3.0, 0.0));
        assert_eq!(sys.v()[(3, 2)], Complex64::new(3.0, 0.0));
        assert_eq!(sys.v_element(3, 4), 3.0);
        let v = sys.v();
        assert_eq!(v.hermitian_defect(), 0.0);
        assert_eq!(sys.h0().hermitian_defect(), 0.0);
    }

    #[test]
    fn observable_normalization() {
        let o = Observable::new(vec![1.0, -1.0, 0.0], true).unwrap();
        assert_eq!(o.normalized(), &[1.0, -1.0, 0.0]);
        assert_eq!(o.shift(), 0.0);

        let o = Observable::new(vec![2.0, 0.0, 1.0], true).unwrap();
        assert_eq!(o.normalized(), &[1.0, -1.0, 0.0]);
        assert_eq!(o.shift(), 1.0);
        assert_eq!(o.raw(), &[2.0, 0.0, 1.0]);

        assert!(matches!(Observable::new(vec![0.0, 1.0, 0.0], true), Err(Error::OrderingViolation(_))));
        // ordering is only enforced in theorem mode
        assert!(Observable::new(vec![0.0, 1.0, 0.0], false).is_ok());
    }

    #[test]
    fn instance_checks_sizes() {
        let o = Observable::new(vec![1.0, -1.0, -0.5, 0.0], true).unwrap();
        assert!(matches!(ProblemInstance::new(reference(), o), Err(Error::BadDimension(_))));
        let o = Observable::new(vec![1.0, -1.0, 0.0], true).unwrap();
        assert!(ProblemInstance::with_initial_level(reference(), o.clone(), 4).is_err());
        assert_eq!(ProblemInstance::new(reference(), o).unwrap().initial_level(), 3);
    }

    fn brute_interaction(sys: &SystemSpec, t: f64) -> ComplexMatrix {
        let h0 = sys.h0();
        let forward = expm_mih(&h0, -t).unwrap();
        let back = expm_mih(&h0, t).unwrap();
        &(&forward * &sys.v()) * &back
    }

    #[test]
    fn interaction_element_examples() {
        let sys = reference();
        for l in 1..=3 {
            for k in 1..=3 {
                assert_eq!(sys.interaction_element(l, k, 0.0).re, sys.v_element(l, k));
            }
        }
        let z = sys.interaction_element(1, 2, PI);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        let oracle = brute_interaction(&sys, PI);
        assert!((oracle[(0, 1)] - z).norm() < 1e-12);
        for t in [0.0, 0.7, 3.0, -2.2] {
            assert_eq!(sys.interaction_element(2, 3, t), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn interaction_element_matches_brute_force() {
        let sys = SystemSpec::new(5, 0.8, -0.35, vec![1.0, -0.5, 2.0, 0.3], 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let l = rng.random_range(1..=5);
            let k = rng.random_range(1..=5);
            let t = rng.random_range(-10.0..10.0);
            let oracle = brute_interaction(&sys, t);
            let z = sys.interaction_element(l, k, t);
            assert!((oracle[(l - 1, k - 1)] - z).norm() < 1e-12);
            assert!((z.norm() - sys.v_element(l, k).abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn v_power_examples() {
        let sys = reference();
        assert_eq!(sys.v_power_element(3, 0), 1.0);
        assert_eq!(sys.v_power_element(1, 0), 0.0);
        assert_eq!(sys.v_power_element(1, 2), 1.0);
        assert_eq!(sys.v_power_element(1, 1), 0.0);
    }

    #[test]
    fn v_power_reach_and_product() {
        let sys = SystemSpec::new(6, 1.0, 0.0, vec![2.0, -3.0, 0.5, 7.0, -1.25], 1.0).unwrap();
        for l in 1..=6 {
            for n in 0..(6 - l) {
                assert_eq!(sys.v_power_element(l, n), 0.0, "l={l} n={n}");
            }
        }
        assert_eq!(sys.v_power_element(1, 5), 2.0 * -3.0 * 0.5 * 7.0 * -1.25);
        assert_eq!(sys.v_power_element(1, 5), sys.coupling_product());
        // cross-check against dense powers
        let v = sys.v();
        let mut p = ComplexMatrix::identity(6);
        for n in 0..8 {
            for l in 1..=6 {
                assert!((p[(l - 1, 5)].re - sys.v_power_element(l, n)).abs() < 1e-9);
            }
            p = &p * &v;
        }
    }
}
