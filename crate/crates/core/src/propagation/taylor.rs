// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Taylor propagator `sum_{l<=L} X^l / l!` with `X = -i H dt`, and
//! the exact derivatives of that polynomial.
//!
//! The polynomial is evaluated by Horner's rule,
//! `S_L = 1`, `S_m = 1 + X S_{m+1} / (m + 1)`, `U = S_0`, and the product rule
//! is carried through the recursion:
//!
//! ```text
//! dS_m   = (A_k S_{m+1} + X dS_{m+1}) / (m + 1)
//! d2S_m  = (A_k dS_{m+1}^{(k')} + A_k' dS_{m+1}^{(k)} + X d2S_{m+1}) / (m + 1)
//! ```
//!
//! with `A_k = -i H_k dt`. These are the derivatives of the truncation, not of
//! the exact exponential, so a fixed order keeps gradient and Hessian
//! consistent with the cost being optimized.

use num_complex::Complex64;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::linalg::{matmul, CMatrix, I};

/// Truncated propagator of one step with all first and second derivatives.
#[derive(Debug, Clone)]
pub struct TaylorStep {
    pub unitary: CMatrix,
    /// `first[k] = dU/dc_k`.
    pub first: Vec<CMatrix>,
    /// `second[k][k2] = d2U/(dc_k dc_k2)`, symmetric in `(k, k2)`.
    pub second: Vec<Vec<CMatrix>>,
}

pub fn taylor_step_derivatives(
    drift: &HermitianMatrix,
    controls: &[HermitianMatrix],
    amplitudes: &[f64],
    dt: f64,
    order: usize,
) -> Result<TaylorStep> {
    if order == 0 {
        return Err(Error::InvalidConfig("Taylor truncation order must be >= 1".into()));
    }
    if amplitudes.len() != controls.len() {
        return Err(Error::DimensionMismatch {
            context: "taylor amplitudes vs controls",
            expected: controls.len(),
            found: amplitudes.len(),
        });
    }
    let n = drift.dim();
    if let Some(bad) = controls.iter().find(|h| h.dim() != n) {
        return Err(Error::DimensionMismatch {
            context: "taylor control hamiltonian",
            expected: n,
            found: bad.dim(),
        });
    }
    if amplitudes.iter().any(|c| !c.is_finite()) || !dt.is_finite() {
        return Err(Error::NonFinite("taylor step amplitudes"));
    }

    let m = controls.len();
    let scale = -I * dt;
    let x = HermitianMatrix::combination(drift, controls, amplitudes).into_matrix() * scale;
    let a: Vec<CMatrix> = controls.iter().map(|h| h.matrix() * scale).collect();

    let id = CMatrix::identity(n, n);
    let mut s = id.clone();
    let mut ds = vec![CMatrix::zeros(n, n); m];
    let mut d2s = vec![vec![CMatrix::zeros(n, n); m]; m];

    for level in (0..order).rev() {
        let inv = Complex64::new(1.0 / (level as f64 + 1.0), 0.0);
        let mut next_d2 = vec![vec![CMatrix::zeros(n, n); m]; m];
        for k in 0..m {
            for k2 in k..m {
                let v = (matmul(&a[k], &ds[k2]) + matmul(&a[k2], &ds[k]) + matmul(&x, &d2s[k][k2])) * inv;
                next_d2[k][k2] = v;
            }
        }
        for k in 0..m {
            for k2 in 0..k {
                next_d2[k][k2] = next_d2[k2][k].clone();
            }
        }
        let next_d: Vec<CMatrix> = (0..m)
            .map(|k| (matmul(&a[k], &s) + matmul(&x, &ds[k])) * inv)
            .collect();
        s = &id + matmul(&x, &s) * inv;
        ds = next_d;
        d2s = next_d2;
    }

    Ok(TaylorStep { unitary: s, first: ds, second: d2s })
}
