// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;
use thiserror::Error;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchParams {
    /// Armijo sufficient-decrease constant `c1`.
    pub armijo_c1: f64,
    /// Backtracking factor `rho`.
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearchParams {
    fn default() -> Self {
        Self { armijo_c1: 1e-4, backtrack: 0.5, max_backtracks: 60 }
    }
}

impl LineSearchParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 1.0) || !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidConfig("line search needs 0 < c1 < 1 and 0 < rho < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineStep {
    pub alpha: f64,
    /// `f(x + alpha p)`.
    pub value: f64,
    /// Number of `f` evaluations spent.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineSearchError {
    #[error("direction is not a descent direction (slope {0:.3e})")]
    Uphill(f64),
    #[error("no step satisfied the sufficient-decrease condition after {evaluations} trials")]
    Exhausted { evaluations: usize },
    #[error(transparent)]
    Objective(#[from] Error),
}

/// Backtracking Armijo search: the first `alpha = alpha0 rho^m` with
/// `f(x + alpha p) <= f0 + c1 alpha g^T p`. Non-finite trial values count as
/// rejections.
pub fn line_search<F>(
    mut f: F,
    x: &DVector<f64>,
    p: &DVector<f64>,
    g: &DVector<f64>,
    f0: f64,
    alpha0: f64,
    params: &LineSearchParams,
) -> std::result::Result<LineStep, LineSearchError>
where
    F: FnMut(&DVector<f64>) -> Result<f64>,
{
    let slope = g.dot(p);
    if !(slope < 0.0) {
        return Err(LineSearchError::Uphill(slope));
    }
    let mut alpha = alpha0;
    for m in 0..=params.max_backtracks {
        let trial = x + p * alpha;
        let value = f(&trial)?;
        if value.is_finite() && value <= f0 + params.armijo_c1 * alpha * slope {
            return Ok(LineStep { alpha, value, evaluations: m + 1 });
        }
        alpha *= params.backtrack;
    }
    Err(LineSearchError::Exhausted { evaluations: params.max_backtracks + 1 })
}
