// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Single-step propagators `U_j = exp(-i H_j dt)` and their exact control
//! derivatives.
//!
//! With `H_j = R diag(E) R^dagger` (columns of `R` are eigenvectors), the
//! derivative along a control Hamiltonian `H_k` is
//!
//! ```text
//! dU_j/dc_k = R ((R^dagger H_k R) ⊙ I) R^dagger
//! ```
//!
//! where `I(m, n)` is the first divided difference of `E -> exp(-i E dt)`
//! over the eigenenergies ([`first_exchange`]). Second derivatives use the
//! second divided difference ([`second_exchange`]) and a sum over an
//! intermediate eigenstate.

mod exchange;
mod taylor;

pub use exchange::{
    first_exchange, second_exchange, DegeneracyTolerance, FirstExchangeMatrix,
    SecondExchangeTensor,
};
pub use taylor::{taylor_step_derivatives, TaylorStep};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, matmul, CMatrix, ZERO};

/// Relative tolerance for accepting a matrix as Hermitian.
const HERMITICITY_TOL: f64 = 1e-12;

/// A Hermitian matrix, stored symmetrized as `(H + H^dagger) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validate and symmetrize. Rejects non-square, non-finite, or
    /// non-Hermitian input (beyond `1e-12` of the largest entry).
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                context: "hermitian matrix (square)",
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if !linalg::is_finite(&m) {
            return Err(Error::NonFinite("hermitian matrix"));
        }
        let scale = linalg::max_abs(&m).max(1.0);
        let defect = linalg::max_abs(&(&m - m.adjoint()));
        if defect > HERMITICITY_TOL * scale {
            return Err(Error::InvalidConfig(format!(
                "matrix is not Hermitian (|H - H^dagger| = {defect:.3e})"
            )));
        }
        Ok(Self::symmetrized(m))
    }

    pub fn from_real(m: nalgebra::DMatrix<f64>) -> Result<Self> {
        Self::new(linalg::complexify(&m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        Self((m + adj) * Complex64::new(0.5, 0.0))
    }

    /// `H0 + sum_k c_k H_k`.
    pub fn combination(drift: &Self, controls: &[Self], coefficients: &[f64]) -> Self {
        let mut h = drift.0.clone();
        for (hk, &c) in controls.iter().zip(coefficients) {
            if c != 0.0 {
                h.zip_apply(&hk.0, |a, b| *a += b * c);
            }
        }
        Self(h)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Eigendecomposition of one step Hamiltonian together with the step length.
#[derive(Debug, Clone)]
pub struct StepEigensystem {
    /// Ascending eigenenergies (angular frequency, hbar = 1).
    pub energies: DVector<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub basis: CMatrix,
    pub dt: f64,
}

impl StepEigensystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `R^dagger A R`.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        matmul(&self.basis.adjoint(), &matmul(a, &self.basis))
    }

    /// `R A R^dagger`.
    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        matmul(&matmul(&self.basis, a), &self.basis.adjoint())
    }

    /// `exp(-i E_n dt)` for every eigenenergy.
    pub fn phases(&self) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * self.dt))
            .collect()
    }
}

/// Diagonalize `h`, returning ascending energies and eigenvector columns.
pub fn eig_hermitian(h: &HermitianMatrix, dt: f64) -> Result<StepEigensystem> {
    if !linalg::is_finite(h.matrix()) {
        return Err(Error::NonFinite("hamiltonian"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("step duration must be > 0, got {dt}")));
    }
    let eig = SymmetricEigen::new(h.matrix().clone());
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut basis = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(StepEigensystem { energies, basis, dt })
}

/// `U = R diag(exp(-i E dt)) R^dagger`.
pub fn step_propagator(es: &StepEigensystem) -> CMatrix {
    let phases = es.phases();
    let mut scaled = es.basis.clone();
    for (mut col, p) in scaled.column_iter_mut().zip(&phases) {
        col *= *p;
    }
    matmul(&scaled, &es.basis.adjoint())
}

fn check_dim(es: &StepEigensystem, h: &HermitianMatrix) -> Result<()> {
    if h.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            context: "control hamiltonian vs step eigensystem",
            expected: es.dim(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// First derivative in the eigenbasis: `(R^dagger H_k R) ⊙ I`.
pub fn step_first_derivative_eigen(control_eigen: &CMatrix, exchange: &FirstExchangeMatrix) -> CMatrix {
    control_eigen.component_mul(exchange.matrix())
}

/// `dU_j / dc_{j,k} = R ((R^dagger H_k R) ⊙ I) R^dagger`.
pub fn step_first_derivative(
    es: &StepEigensystem,
    exchange: &FirstExchangeMatrix,
    control: &HermitianMatrix,
) -> Result<CMatrix> {
    check_dim(es, control)?;
    let rotated = es.to_eigenbasis(control.matrix());
    Ok(es.from_eigenbasis(&step_first_derivative_eigen(&rotated, exchange)))
}

/// Second derivative in the eigenbasis, given both control Hamiltonians
/// already rotated into it. Element `(m, n)` is
/// `sum_p (A_mp B_pn + B_mp A_pn) * I2(n, p, m)`.
pub fn step_second_derivative_eigen(
    tensor: &SecondExchangeTensor<'_>,
    a: &CMatrix,
    b: &CMatrix,
) -> CMatrix {
    let n = a.nrows();
    let mut out = CMatrix::from_element(n, n, ZERO);
    for m in 0..n {
        for col in 0..n {
            let mut acc = ZERO;
            for p in 0..n {
                let w = a[(m, p)] * b[(p, col)] + b[(m, p)] * a[(p, col)];
                if w != ZERO {
                    acc += w * tensor.get(col, p, m);
                }
            }
            out[(m, col)] = acc;
        }
    }
    out
}

/// `d^2 U_j / (dc_{j,k'} dc_{j,k})`, symmetric under exchanging the two
/// controls.
pub fn step_second_derivative(
    es: &StepEigensystem,
    tensor: &SecondExchangeTensor<'_>,
    control: &HermitianMatrix,
    control_other: &HermitianMatrix,
) -> Result<CMatrix> {
    check_dim(es, control)?;
    check_dim(es, control_other)?;
    let a = es.to_eigenbasis(control_other.matrix());
    let b = es.to_eigenbasis(control.matrix());
    Ok(es.from_eigenbasis(&step_second_derivative_eigen(tensor, &a, &b)))
}
