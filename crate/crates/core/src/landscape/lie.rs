// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical rank of the dynamical Lie algebra generated by `iH0` and `iV`.

use num_complex::Complex64;
use serde::Serialize;

use crate::model::SystemSpec;
use crate::numerics::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieAlgebraResult {
    pub dimension: usize,
    /// `dimension ≥ N² − 1`: all of `su(N)` up to the global phase.
    pub saturated: bool,
    /// Deepest bracket level that still added a new direction.
    pub depth_reached: usize,
    pub tolerance: f64,
}

/// Orthonormal basis of a real subspace of `u(N)`, each element kept both as
/// a matrix and as its real coordinate vector of length `2N²`.
struct Span {
    matrices: Vec<ComplexMatrix>,
    vectors: Vec<Vec<f64>>,
    tol: f64,
}

fn as_real(m: &ComplexMatrix) -> Vec<f64> {
    m.entries().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Span {
    /// Adds `m` if it leaves the span by more than `tol` relative; returns the new basis element.
    fn try_add(&mut self, m: &ComplexMatrix) -> Option<ComplexMatrix> {
        let mut v = as_real(m);
        let norm0 = dot(&v, &v).sqrt();
        if norm0 == 0.0 {
            return None;
        }
        let mut coeffs = vec![0.0; self.vectors.len()];
        // two Gram–Schmidt passes
        for _ in 0..2 {
            for (c, b) in coeffs.iter_mut().zip(&self.vectors) {
                let p = dot(&v, b);
                *c += p;
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm <= self.tol * norm0 {
            return None;
        }
        let mut q = m.clone();
        for (c, b) in coeffs.iter().zip(&self.matrices) {
            q = &q - &b.scale_real(*c);
        }
        let q = q.scale_real(1.0 / norm);
        self.vectors.push(v.iter().map(|x| x / norm).collect());
        self.matrices.push(q.clone());
        Some(q)
    }
}

/// Breadth-first closure of `generators` under commutators.
///
/// Level 1 is the span of the generators; level `k + 1` brackets every
/// generator with the directions first found at level `k`. Stops when a level
/// adds nothing, the span reaches `dim²`, or `max_depth` levels were built.
pub fn lie_rank_of(generators: &[ComplexMatrix], tol: f64, max_depth: usize) -> LieAlgebraResult {
    assert!(!generators.is_empty(), "need at least one generator");
    let n = generators[0].dim();
    let full = n * n;
    let mut span = Span { matrices: Vec::new(), vectors: Vec::new(), tol };
    let mut frontier: Vec<ComplexMatrix> = generators.iter().filter_map(|g| span.try_add(g)).collect();
    let gens: Vec<ComplexMatrix> = span.matrices.clone();
    let mut depth_reached = if frontier.is_empty() { 0 } else { 1 };

    let mut depth = 1;
    while depth < max_depth && !frontier.is_empty() && span.matrices.len() < full {
        depth += 1;
        let mut next = Vec::new();
        'outer: for x in &frontier {
            for g in &gens {
                if let Some(q) = span.try_add(&g.commutator(x)) {
                    next.push(q);
                    if span.matrices.len() == full {
                        break 'outer;
                    }
                }
            }
        }
        if !next.is_empty() {
            depth_reached = depth;
        }
        frontier = next;
    }

    let dimension = span.matrices.len();
    LieAlgebraResult { dimension, saturated: dimension + 1 >= full, depth_reached, tolerance: tol }
}

/// Lie rank of the pair `(iH0, iV)` of a system.
pub fn lie_rank(sys: &SystemSpec, tol: f64, max_depth: usize) -> LieAlgebraResult {
    let i = Complex64::new(0.0, 1.0);
    lie_rank_of(&[sys.h0().scale(i), sys.v().scale(i)], tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(levels: usize, scale: f64) -> SystemSpec {
        SystemSpec::new(levels, 1.0, 0.0, vec![scale; levels - 1], 1.0).unwrap()
    }

    #[test]
    fn ladder_family_is_full_rank() {
        for levels in 3..=6 {
            let r = lie_rank(&chain(levels, 1.0), 1e-10, 12);
            assert!(r.saturated, "N={levels}: {r:?}");
            assert!(r.dimension >= levels * levels - 1);
            assert!(r.depth_reached <= 12);
        }
    }

    #[test]
    fn abelian_pair_has_dimension_one() {
        let ii = ComplexMatrix::identity(3).scale(Complex64::new(0.0, 1.0));
        let r = lie_rank_of(&[ii.clone(), ii], 1e-10, 12);
        assert_eq!(r.dimension, 1);
        assert!(!r.saturated);
        assert_eq!(r.depth_reached, 1);
    }

    #[test]
    fn rank_is_invariant_under_coupling_scale() {
        let base = lie_rank(&chain(4, 1.0), 1e-10, 12).dimension;
        for c in [-3.0, 0.1, 7.5] {
            assert_eq!(lie_rank(&chain(4, c), 1e-10, 12).dimension, base);
        }
    }

    #[test]
    fn depth_limit_is_respected() {
        let r = lie_rank(&chain(5, 1.0), 1e-10, 2);
        assert!(!r.saturated);
        assert_eq!(r.depth_reached, 2);
        assert_eq!(r.dimension, 3);
    }
}
