// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::linalg::{matmul, CMatrix};
use crate::propagation::{
    eig_hermitian, first_exchange, second_exchange, step_first_derivative_eigen,
    step_propagator, step_second_derivative_eigen, taylor_step_derivatives, DegeneracyTolerance,
    FirstExchangeMatrix, HermitianMatrix, StepEigensystem,
};

use super::{BilinearSystem, ControlPulse};

/// How single-step propagators and their derivatives are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagator {
    /// Eigendecomposition with exact exchange integrals.
    Exact(DegeneracyTolerance),
    /// Truncated Taylor series of fixed order (>= 1).
    Taylor { order: usize },
}

impl Default for Propagator {
    fn default() -> Self {
        Self::Exact(DegeneracyTolerance::Auto)
    }
}

#[derive(Debug, Clone)]
enum StepKind {
    Exact {
        eig: StepEigensystem,
        exchange: FirstExchangeMatrix,
        tolerance: DegeneracyTolerance,
        /// `R^dagger H_k R` for every control.
        controls_eigen: Vec<CMatrix>,
    },
    Taylor {
        second: Vec<Vec<CMatrix>>,
    },
}

/// Propagator of one time step with its control derivatives.
#[derive(Debug, Clone)]
pub struct StepData {
    pub unitary: CMatrix,
    /// `dU_j / dc_{j,k}`; empty when built without derivatives.
    pub first: Vec<CMatrix>,
    kind: Option<StepKind>,
}

impl StepData {
    /// `d2U_j / (dc_{j,k} dc_{j,k2})`.
    pub fn second(&self, k: usize, k2: usize) -> Result<CMatrix> {
        match &self.kind {
            None => Err(Error::MissingDerivatives),
            Some(StepKind::Taylor { second }) => Ok(second[k][k2].clone()),
            Some(StepKind::Exact { eig, exchange, tolerance, controls_eigen }) => {
                let tensor = second_exchange(eig, exchange, *tolerance);
                let inner = step_second_derivative_eigen(&tensor, &controls_eigen[k2], &controls_eigen[k]);
                Ok(eig.from_eigenbasis(&inner))
            }
        }
    }

    pub fn eigensystem(&self) -> Option<&StepEigensystem> {
        match &self.kind {
            Some(StepKind::Exact { eig, .. }) => Some(eig),
            _ => None,
        }
    }
}

pub(crate) fn check_pulse(system: &BilinearSystem, pulse: &ControlPulse) -> Result<()> {
    if pulse.controls() != system.num_controls() {
        return Err(Error::DimensionMismatch {
            context: "pulse controls vs system controls",
            expected: system.num_controls(),
            found: pulse.controls(),
        });
    }
    if pulse.amplitudes().iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite("pulse amplitudes"));
    }
    Ok(())
}

pub(crate) fn compute_step(
    system: &BilinearSystem,
    amplitudes: &[f64],
    dt: f64,
    backend: Propagator,
    with_derivatives: bool,
) -> Result<StepData> {
    match backend {
        Propagator::Exact(tolerance) => {
            let h = HermitianMatrix::combination(system.drift(), system.controls(), amplitudes);
            let eig = eig_hermitian(&h, dt)?;
            let unitary = step_propagator(&eig);
            if !with_derivatives {
                return Ok(StepData { unitary, first: Vec::new(), kind: None });
            }
            let exchange = first_exchange(&eig, tolerance);
            let controls_eigen: Vec<CMatrix> =
                system.controls().iter().map(|hk| eig.to_eigenbasis(hk.matrix())).collect();
            let first = controls_eigen
                .iter()
                .map(|a| eig.from_eigenbasis(&step_first_derivative_eigen(a, &exchange)))
                .collect();
            Ok(StepData {
                unitary,
                first,
                kind: Some(StepKind::Exact { eig, exchange, tolerance, controls_eigen }),
            })
        }
        Propagator::Taylor { order } => {
            let t = taylor_step_derivatives(system.drift(), system.controls(), amplitudes, dt, order)?;
            if !with_derivatives {
                return Ok(StepData { unitary: t.unitary, first: Vec::new(), kind: None });
            }
            Ok(StepData { unitary: t.unitary, first: t.first, kind: Some(StepKind::Taylor { second: t.second }) })
        }
    }
}

pub(crate) fn compute_steps(
    system: &BilinearSystem,
    pulse: &ControlPulse,
    backend: Propagator,
    with_derivatives: bool,
) -> Result<Vec<StepData>> {
    check_pulse(system, pulse)?;
    (0..pulse.steps())
        .map(|s| compute_step(system, &pulse.row(s), pulse.dt(), backend, with_derivatives))
        .collect()
}

/// Per-step propagators and cumulative products for one pulse.
///
/// With steps `s = 0..N` (step `s` is `U_{s+1}` in one-based notation):
///
/// - `forward[0] = U_0`, `forward[s + 1] = U_s forward[s]` (right products),
/// - `backward[N] = 1`, `backward[s] = backward[s + 1] U_s` (left products),
///
/// so `backward[s + 1] U_s forward[s]` is the total propagator for every `s`.
#[derive(Debug, Clone)]
pub struct PropagationCache {
    pulse_hash: u64,
    pub(crate) steps: Vec<StepData>,
    pub(crate) forward: Vec<CMatrix>,
    pub(crate) backward: Vec<CMatrix>,
    with_derivatives: bool,
}

impl PropagationCache {
    pub fn pulse_hash(&self) -> u64 {
        self.pulse_hash
    }

    /// Whether this cache was built from exactly this pulse.
    pub fn matches(&self, pulse: &ControlPulse) -> bool {
        self.pulse_hash == pulse.content_hash()
    }

    pub fn has_derivatives(&self) -> bool {
        self.with_derivatives
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, s: usize) -> &StepData {
        &self.steps[s]
    }

    /// Total propagator `U_N ... U_1 U_0`.
    pub fn total(&self) -> &CMatrix {
        &self.forward[self.steps.len()]
    }

    /// `U_s ... U_1 U_0` for `s` in `0..=N` (`s = 0` is the initial unitary).
    pub fn right(&self, s: usize) -> &CMatrix {
        &self.forward[s]
    }

    /// `U_N ... U_s` for `s` in `1..=N+1` (`s = N + 1` is the identity).
    pub fn left(&self, s: usize) -> &CMatrix {
        &self.backward[s - 1]
    }
}

/// Propagate a pulse, optionally keeping per-step derivatives.
/// Costs `2N` matrix products for the cumulative chains.
pub fn build_cache(
    system: &BilinearSystem,
    pulse: &ControlPulse,
    backend: Propagator,
    with_derivatives: bool,
) -> Result<PropagationCache> {
    let steps = compute_steps(system, pulse, backend, with_derivatives)?;
    let n = steps.len();
    let mut forward = Vec::with_capacity(n + 1);
    forward.push(system.initial().clone());
    for (s, step) in steps.iter().enumerate() {
        let next = matmul(&step.unitary, &forward[s]);
        forward.push(next);
    }
    let dim = system.dim();
    let mut backward = vec![CMatrix::identity(dim, dim); n + 1];
    for s in (0..n).rev() {
        backward[s] = matmul(&backward[s + 1], &steps[s].unitary);
    }
    Ok(PropagationCache { pulse_hash: pulse.content_hash(), steps, forward, backward, with_derivatives })
}
