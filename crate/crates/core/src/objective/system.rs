// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::propagation::HermitianMatrix;

const UNITARY_TOL: f64 = 1e-10;

/// `H(t_j) = H0 + sum_k c_{j,k} H_k` together with the gate-synthesis goal:
/// reach `target` (up to a global phase) on the subspace selected by the
/// diagonal projector, starting from `initial`.
#[derive(Debug, Clone)]
pub struct BilinearSystem {
    drift: HermitianMatrix,
    controls: Vec<HermitianMatrix>,
    subspace: Vec<usize>,
    target: CMatrix,
    initial: CMatrix,
    /// `P V^dagger P`, so that `Tr[P U P V^dagger] = Tr[U W]`.
    weighted_target: CMatrix,
}

impl BilinearSystem {
    /// `subspace` lists the basis indices on which the projector is one.
    pub fn new(
        drift: HermitianMatrix,
        controls: Vec<HermitianMatrix>,
        subspace: Vec<usize>,
        target: CMatrix,
    ) -> Result<Self> {
        let n = drift.dim();
        if controls.is_empty() {
            return Err(Error::InvalidConfig("at least one control hamiltonian is required".into()));
        }
        for h in &controls {
            if h.dim() != n {
                return Err(Error::DimensionMismatch { context: "control hamiltonian", expected: n, found: h.dim() });
            }
        }
        if target.nrows() != n || target.ncols() != n {
            return Err(Error::DimensionMismatch { context: "target unitary", expected: n, found: target.nrows() });
        }
        if !linalg::is_finite(&target) {
            return Err(Error::NonFinite("target unitary"));
        }
        if subspace.is_empty() {
            return Err(Error::EmptyProjector);
        }
        let mut subspace = subspace;
        subspace.sort_unstable();
        subspace.dedup();
        if let Some(&bad) = subspace.iter().find(|&&i| i >= n) {
            return Err(Error::DimensionMismatch { context: "projector index", expected: n, found: bad });
        }
        let defect = linalg::unitarity_defect(&target);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidConfig(format!("target is not unitary (defect {defect:.3e})")));
        }
        let projector = projector_matrix(n, &subspace);
        let weighted_target = &projector * target.adjoint() * &projector;
        Ok(Self {
            drift,
            controls,
            subspace,
            target,
            initial: CMatrix::identity(n, n),
            weighted_target,
        })
    }

    /// Replace the initial propagator `U_0` (identity by default).
    pub fn with_initial(mut self, initial: CMatrix) -> Result<Self> {
        let n = self.dim();
        if initial.nrows() != n || initial.ncols() != n {
            return Err(Error::DimensionMismatch { context: "initial unitary", expected: n, found: initial.nrows() });
        }
        let defect = linalg::unitarity_defect(&initial);
        if !defect.is_finite() || defect > UNITARY_TOL {
            return Err(Error::InvalidConfig(format!("initial propagator is not unitary (defect {defect:.3e})")));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    /// Rank of the projector.
    pub fn subspace_dim(&self) -> usize {
        self.subspace.len()
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn drift(&self) -> &HermitianMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[HermitianMatrix] {
        &self.controls
    }

    pub fn subspace(&self) -> &[usize] {
        &self.subspace
    }

    pub fn projector(&self) -> CMatrix {
        projector_matrix(self.dim(), &self.subspace)
    }

    pub fn target(&self) -> &CMatrix {
        &self.target
    }

    pub fn initial(&self) -> &CMatrix {
        &self.initial
    }

    pub(crate) fn weighted_target(&self) -> &CMatrix {
        &self.weighted_target
    }

    /// Same system with the target multiplied by a scalar (used for global
    /// phase checks).
    pub fn with_target(mut self, target: CMatrix) -> Result<Self> {
        let rebuilt = Self::new(self.drift.clone(), self.controls.clone(), self.subspace.clone(), target)?;
        self.weighted_target = rebuilt.weighted_target;
        self.target = rebuilt.target;
        Ok(self)
    }
}

pub(crate) fn projector_matrix(n: usize, subspace: &[usize]) -> CMatrix {
    let mut p = CMatrix::from_element(n, n, ZERO);
    for &i in subspace {
        p[(i, i)] = ONE;
    }
    p
}
