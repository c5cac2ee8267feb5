// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant controls on a uniform grid over `[0, T]`.
//!
//! A control equals `values[j]` on `[jT/M, (j+1)T/M)`. All the L² operations
//! below are exact for this class of functions.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of control segments.
pub const DEFAULT_SEGMENTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseControl {
    horizon: f64,
    values: Vec<f64>,
}

impl PiecewiseControl {
    pub fn new(horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("a control needs at least one segment".into()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("control values must be finite".into()));
        }
        Ok(Self { horizon, values })
    }

    pub fn zeros(horizon: f64, segments: usize) -> Result<Self> {
        Self::new(horizon, vec![0.0; segments])
    }

    pub fn constant(horizon: f64, segments: usize, value: f64) -> Result<Self> {
        Self::new(horizon, vec![value; segments])
    }

    /// Samples `f` at segment midpoints.
    pub fn from_fn_midpoint(horizon: f64, segments: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = horizon / segments as f64;
        Self::new(horizon, (0..segments).map(|j| f((j as f64 + 0.5) * h)).collect())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn segments(&self) -> usize {
        self.values.len()
    }

    /// Segment width `T/M`.
    pub fn step(&self) -> f64 {
        self.horizon / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Left endpoint of segment `j`.
    pub fn segment_start(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// `∫_0^T f dt`.
    pub fn integral(&self) -> f64 {
        self.step() * self.values.iter().sum::<f64>()
    }

    /// `∫_0^T |f| dt`.
    pub fn abs_integral(&self) -> f64 {
        self.step() * self.values.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// L² inner product; both controls must share a grid.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self.step() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn norm(&self) -> f64 {
        (self.step() * self.values.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// `t · f`.
    pub fn scaled(&self, t: f64) -> Self {
        Self { horizon: self.horizon, values: self.values.iter().map(|x| t * x).collect() }
    }

    /// Orthogonal projection onto the mean-zero subspace: `f − (1/T)∫f`.
    pub fn project_mean_zero(&self) -> Self {
        let mean = self.values.iter().sum::<f64>() / self.values.len() as f64;
        Self { horizon: self.horizon, values: self.values.iter().map(|x| x - mean).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.values.len() != other.values.len() || self.horizon != other.horizon {
            return Err(Error::GridMismatch(format!(
                "(T={}, M={}) vs (T={}, M={})",
                self.horizon,
                self.values.len(),
                other.horizon,
                other.values.len()
            )));
        }
        Ok(())
    }

    /// Serializes to the control text format with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "T {}", format_real(self.horizon)).unwrap();
        writeln!(s, "M {}", self.values.len()).unwrap();
        for x in &self.values {
            writeln!(s, "{}", format_real(*x)).unwrap();
        }
        s
    }

    /// Strict parser for the control text format.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let (ln, line) = lines.next().ok_or_else(|| err(1, "missing 'T <real>' header".into()))?;
        let horizon = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["T", x] => parse_real(x).ok_or_else(|| err(ln, format!("invalid horizon '{x}'")))?,
            _ => return Err(err(ln, format!("expected 'T <real>', got '{line}'"))),
        };
        let (ln, line) = lines.next().ok_or_else(|| err(2, "missing 'M <integer>' header".into()))?;
        let segments: usize = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["M", m] => m.parse().map_err(|_| err(ln, format!("invalid segment count '{m}'")))?,
            _ => return Err(err(ln, format!("expected 'M <integer>', got '{line}'"))),
        };
        if segments == 0 {
            return Err(err(ln, "segment count must be positive".into()));
        }

        let mut values = Vec::with_capacity(segments);
        for (ln, line) in lines {
            let token = line.trim();
            if values.len() == segments {
                return Err(err(ln, format!("unexpected content after {segments} values: '{line}'")));
            }
            values.push(parse_real(token).ok_or_else(|| err(ln, format!("invalid value '{token}'")))?);
        }
        if values.len() != segments {
            return Err(err(values.len() + 3, format!("expected {segments} values, found {}", values.len())));
        }
        Self::new(horizon, values).map_err(|e| err(1, e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Seeded random direction with i.i.d. uniform values on `[−amplitude, amplitude]`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64`, which is portable
/// across platforms. With `mean_zero` the sample is projected onto the
/// mean-zero subspace and rescaled to L² norm `amplitude·√T`.
pub fn random_direction(seed: u64, segments: usize, horizon: f64, mean_zero: bool, amplitude: f64) -> Result<PiecewiseControl> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!("amplitude must be positive, got {amplitude}")));
    }
    if segments == 0 {
        return Err(Error::InvalidArgument("a control needs at least one segment".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..segments).map(|_| rng.random_range(-amplitude..=amplitude)).collect();
    let f = PiecewiseControl::new(horizon, values)?;
    if !mean_zero {
        return Ok(f);
    }
    let p = f.project_mean_zero();
    let norm = p.norm();
    if norm == 0.0 {
        // only possible for a single segment
        return Ok(p);
    }
    Ok(p.scaled(amplitude * horizon.sqrt() / norm))
}

/// 17 significant digits, which round-trips every `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn integral_examples() {
        assert_eq!(PiecewiseControl::zeros(1.0, 8).unwrap().integral(), 0.0);
        for m in [1, 7, 64] {
            let f = PiecewiseControl::constant(2.0 * PI, m, 1.0).unwrap();
            assert!((f.integral() - 2.0 * PI).abs() < 1e-14);
        }
        let f = PiecewiseControl::from_fn_midpoint(2.0 * PI, 64, f64::cos).unwrap();
        assert!(f.integral().abs() < 1e-12);
    }

    #[test]
    fn inner_examples() {
        let f = random_direction(1, 16, 3.0, false, 1.0).unwrap();
        let zero = PiecewiseControl::zeros(3.0, 16).unwrap();
        assert_eq!(f.inner(&zero).unwrap(), 0.0);
        let one = PiecewiseControl::constant(3.0, 16, 1.0).unwrap();
        assert!((one.inner(&one).unwrap() - 3.0).abs() < 1e-14);
        let g = random_direction(2, 16, 3.0, false, 1.0).unwrap();
        assert_eq!(f.inner(&g).unwrap(), g.inner(&f).unwrap());
        let other_grid = PiecewiseControl::zeros(3.0, 8).unwrap();
        assert!(matches!(f.inner(&other_grid), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn projection_examples() {
        let c = PiecewiseControl::constant(2.0, 5, 3.5).unwrap().project_mean_zero();
        assert!(c.values().iter().all(|x| x.abs() < 1e-15));
        let f = PiecewiseControl::new(1.0, vec![2.0, 0.0]).unwrap();
        assert_eq!(f.project_mean_zero().values(), &[1.0, -1.0]);
        let g = PiecewiseControl::new(1.0, vec![1.0, -1.0]).unwrap();
        assert_eq!(g.project_mean_zero(), g);
    }

    #[test]
    fn random_direction_contract() {
        let a = random_direction(42, 64, 2.0 * PI, false, 0.5).unwrap();
        let b = random_direction(42, 64, 2.0 * PI, false, 0.5).unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|x| x.abs() <= 0.5));
        let c = random_direction(43, 64, 2.0 * PI, false, 0.5).unwrap();
        assert_ne!(a, c);

        let z = random_direction(42, 64, 2.0 * PI, true, 0.5).unwrap();
        assert!(z.integral().abs() < 1e-12);
        assert!((z.norm() - 0.5 * (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!(random_direction(1, 4, 1.0, false, 0.0).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let f = random_direction(9, 33, 2.0 * PI, true, 1.7).unwrap();
        let back = PiecewiseControl::parse(&f.to_text()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn parse_is_strict() {
        let ok = "T 1.0\nM 2\n0.5\n-0.5\n";
        assert_eq!(PiecewiseControl::parse(ok).unwrap().values(), &[0.5, -0.5]);
        let cases = [
            ("", 1),
            ("T x\nM 1\n0\n", 1),
            ("T 1.0\nN 1\n0\n", 2),
            ("T 1.0\nM 0\n", 2),
            ("T 1.0\nM 2\n0.5\n", 4),
            ("T 1.0\nM 1\n0.5\n0.5\n", 4),
            ("T 1.0\nM 2\n0.5\nabc\n", 4),
            ("T 1.0\nM 1\nNaN\n", 3),
        ];
        for (text, line) in cases {
            match PiecewiseControl::parse(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn projection_is_orthogonal_and_idempotent(
            fv in prop::collection::vec(-3.0f64..3.0, 12),
            gv in prop::collection::vec(-3.0f64..3.0, 12),
        ) {
            let f = PiecewiseControl::new(2.5, fv).unwrap();
            let g = PiecewiseControl::new(2.5, gv).unwrap().project_mean_zero();
            let pf = f.project_mean_zero();
            prop_assert!(pf.integral().abs() <= 1e-14 * f.norm() * 2.5f64.sqrt() * 12.0);
            let pp = pf.project_mean_zero();
            for (x, y) in pp.values().iter().zip(pf.values()) {
                prop_assert!((x - y).abs() < 1e-14);
            }
            let residual = PiecewiseControl::new(2.5, f.values().iter().zip(pf.values()).map(|(a, b)| a - b).collect()).unwrap();
            prop_assert!(residual.inner(&g).unwrap().abs() < 1e-10);
            // norm² splits across f = Pf + (∫f/T)·1
            let mean_part = f.integral().powi(2) / 2.5;
            let total = f.norm().powi(2);
            prop_assert!((pf.norm().powi(2) + mean_part - total).abs() <= 1e-10 * (1.0 + total));
        }

        #[test]
        fn scaling_laws(fv in prop::collection::vec(-3.0f64..3.0, 1..20), k in -4i32..4) {
            let t = 2f64.powi(k);
            let f = PiecewiseControl::new(1.5, fv).unwrap();
            prop_assert_eq!(f.scaled(t).integral(), t * f.integral());
            prop_assert_eq!(f.scaled(t).norm(), t.abs() * f.norm());
        }
    }
}
