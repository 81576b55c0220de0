// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{what} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { what: &'static str, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The generator norm vanishes, so no finite bound exists.
    #[error("zero denominator: target unreachable under drift and dissipation alone")]
    ZeroDenominator,

    /// The analytic single-qubit bound diverges (ω = γ = 0).
    #[error("bound diverges: preparation time goes to infinity")]
    Divergent,

    #[error("dynamics do not relax to within {delta} of the target before t = {horizon}")]
    NoRelaxation { delta: f64, horizon: f64 },

    #[error("upper bracket T = {time} is infeasible (distance {distance:.6e} > {delta})")]
    InfeasibleUpperBracket { time: f64, distance: f64, delta: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
