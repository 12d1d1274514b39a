// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("propagation cache was built without per-step derivatives")]
    MissingDerivatives,

    #[error("state set is not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("projector has rank zero")]
    EmptyProjector,

    #[error("dispersive regime violated: transmon {0} is resonant with the cavity")]
    DispersiveBreakdown(usize),

    #[error("search direction is not a descent direction (slope {0:.3e})")]
    NotDescent(f64),
}
