// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix helpers and operation counters.
//!
//! Every matrix-matrix product and every trace contraction `Tr[A B]` issued by
//! the objective code goes through [`matmul`] / [`trace_product`], which bump
//! thread-local counters. The counters back the cost-scaling checks: gradient
//! cost must grow linearly with the number of time steps and Hessian cost at
//! most quadratically.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

thread_local! {
    static MATMULS: Cell<u64> = const { Cell::new(0) };
    static CONTRACTIONS: Cell<u64> = const { Cell::new(0) };
}

/// Snapshot of the per-thread operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Dense matrix-matrix products.
    pub matmuls: u64,
    /// Trace contractions `Tr[A B]` (cost `O(dim^2)`, no product formed).
    pub contractions: u64,
}

impl OpCounts {
    /// Total number of pairwise matrix operations.
    pub fn total(&self) -> u64 {
        self.matmuls + self.contractions
    }
}

pub fn reset_op_counts() {
    MATMULS.with(|c| c.set(0));
    CONTRACTIONS.with(|c| c.set(0));
}

pub fn op_counts() -> OpCounts {
    OpCounts {
        matmuls: MATMULS.with(Cell::get),
        contractions: CONTRACTIONS.with(Cell::get),
    }
}

/// Counted matrix product `a * b`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    MATMULS.with(|c| c.set(c.get() + 1));
    a * b
}

/// Counted `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    CONTRACTIONS.with(|c| c.set(c.get() + 1));
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// `max |A A^dagger - 1|`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    max_abs(&(a * a.adjoint() - CMatrix::identity(n, n)))
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Build a complex matrix from a real one.
pub fn complexify(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

/// Pauli matrices in the standard basis.
pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
}
