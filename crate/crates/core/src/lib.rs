// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical certification of higher-order traps at the zero control for
//! the degenerate ladder family `H0 = diag(a, b, …, b)` with nearest-neighbour
//! real couplings, initial state `|N⟩⟨N|` and a diagonal target observable.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense complex matrices, Hermitian eigensolver, `exp(−isH)`.
//! * [`model`]: the system family, observable and problem instance.
//! * [`controls`]: piecewise-constant controls and their L² geometry.
//! * [`dynamics`]: propagator, objective and the chronological forms `A^n_{lN}`.
//! * [`landscape`]: Taylor coefficients at `f ≡ 0`, Lie rank, witness search, certificate.
//! * [`config`], [`report`], [`cli`]: the `trapscope` command-line front end.

pub mod cli;
pub mod config;
pub mod controls;
pub mod dynamics;
pub mod error;
pub mod landscape;
pub mod model;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
