// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsUpdate {
    pub matrix: DMatrix<f64>,
    /// False when the curvature condition failed and `B` was kept.
    pub applied: bool,
}

/// `B + y y^T / (y^T s) - B s s^T B / (s^T B s)`.
///
/// Skipped (returns `B` unchanged) when `y^T s <= tol |s| |y|`, which keeps
/// `B` positive definite.
pub fn bfgs_update(b: &DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>, curvature_skip_tol: f64) -> Result<BfgsUpdate> {
    let n = b.nrows();
    if b.ncols() != n || s.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch { context: "bfgs update", expected: n, found: s.len().max(y.len()) });
    }
    let ys = y.dot(s);
    let bs = b * s;
    let sbs = s.dot(&bs);
    if ys <= curvature_skip_tol * s.norm() * y.norm() || sbs <= 0.0 {
        return Ok(BfgsUpdate { matrix: b.clone(), applied: false });
    }
    let mut out = b + (y * y.transpose()) / ys - (&bs * bs.transpose()) / sbs;
    // Symmetrize away rounding.
    out = (&out + out.transpose()) * 0.5;
    Ok(BfgsUpdate { matrix: out, applied: true })
}
