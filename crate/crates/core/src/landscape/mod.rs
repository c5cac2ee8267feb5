// Copyright 2026 trapscope contributors
// SPDX-License-Identifier: Apache-2.0

//! Local landscape of `J_O` around the zero control.

mod certificate;
mod differential;
mod lie;
mod taylor;
mod witness;

pub use differential::{differential, order_2n2_value, NON_REAL_TOL};
pub use taylor::{taylor_fit, TaylorFit, MAX_CONDITION, MAX_SHRINKS};
pub use lie::{lie_rank, lie_rank_of, LieAlgebraResult};
pub use witness::{witness_search, WitnessResult, GREEDY_ROUNDS};
pub use certificate::{
    trap_certificate, CertificateConfig, CertificateFailure, Check, DirectionRecord, InstanceSummary, Measurement, Tolerances, TrapReport,
    SCHEMA,
};
