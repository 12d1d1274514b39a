// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum optimal control of piecewise-constant pulses (GRAPE) with exact
//! analytical gradients *and* Hessians of the gate infidelity.
//!
//! The crate is organized bottom-up:
//!
//! - [`propagation`]: single-step propagators `exp(-i H dt)` and their exact
//!   first and second derivatives with respect to the control amplitudes,
//!   via eigendecomposition (exchange integrals) or a truncated Taylor series.
//! - [`objective`]: the full-horizon infidelity, gradient and Hessian for gate
//!   synthesis, plus the state-transfer variant, built on cumulative
//!   left/right propagator products.
//! - [`optimize`]: a box-constrained optimizer suite (log-barrier Newton with
//!   the exact Hessian, BFGS, fixed-step gradient descent, quadratic penalty)
//!   and a paired multistart harness.
//! - [`models`]: built-in physical problems, the effective two-transmon
//!   cross-resonance system with its CNOT target and a two-level toy problem.
//!
//! ```
//! use hessgrape::models::two_level_example;
//! use hessgrape::objective::{ControlPulse, Evaluator};
//!
//! let problem = two_level_example(std::f64::consts::FRAC_PI_2, 2).unwrap();
//! let pulse = ControlPulse::zeros(2, 1, problem.dt);
//! let eval = Evaluator::new(&problem.system).evaluate(&pulse, true).unwrap();
//! assert!(eval.infidelity < 1e-12);
//! ```

pub mod error;
pub mod linalg;
pub mod models;
pub mod objective;
pub mod optimize;
pub mod propagation;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
