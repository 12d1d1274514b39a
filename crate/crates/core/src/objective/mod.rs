// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate infidelity `J = 1 - |Tr[P U P V^dagger] / dim|^2` of a piecewise
//! constant pulse, with its exact gradient and Hessian.
//!
//! All derivatives are of `J` (not of the fidelity). With
//! `g = Tr[U W] / dim` and `W = P V^dagger P`:
//!
//! ```text
//! dJ/dc_a        = -2 Re[ conj(g) dg_a ]
//! d2J/dc_a dc_b  = -2 Re[ conj(g) d2g_ab + dg_a conj(dg_b) ]
//! ```
//!
//! The derivative of the total propagator with respect to step `j` is
//! `U^L_{j+1} dU_j U^R_{j-1}`; for two different steps `i < j` the middle
//! product `U_{j-1} ... U_{i+1}` is `U^R_{j-1} (U^R_i)^dagger`. Every trace is
//! split into a product of two precomputed factors so that the Hessian costs
//! `O(N)` matrix products plus `O(N^2)` trace contractions.

mod cache;
mod pulse;
mod state;
mod system;

pub use cache::{build_cache, PropagationCache, Propagator, StepData};
pub use pulse::{ControlBound, ControlPulse};
pub use state::state_transfer_objective;
pub use system::BilinearSystem;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matmul, trace_product, CMatrix};

/// Infidelity with its gradient and (optionally) Hessian. Parameters are
/// ordered control-major, matching [`ControlPulse::to_flat`].
#[derive(Debug, Clone)]
pub struct GradHessResult {
    pub infidelity: f64,
    pub gradient: DVector<f64>,
    pub hessian: Option<DMatrix<f64>>,
}

fn overlap(cache: &PropagationCache, system: &BilinearSystem) -> Complex64 {
    trace_product(cache.total(), system.weighted_target()) / system.subspace_dim() as f64
}

fn infidelity_from_overlap(g: Complex64) -> f64 {
    (1.0 - g.norm_sqr()).clamp(0.0, 1.0)
}

/// `J = 1 - |Tr[P U P V^dagger] / dim|^2`, invariant under a global phase
/// of the target.
pub fn infidelity(cache: &PropagationCache, system: &BilinearSystem) -> f64 {
    infidelity_from_overlap(overlap(cache, system))
}

/// Infidelity of a given total propagator `u` (dimension-checked by the caller).
pub fn infidelity_of_unitary(system: &BilinearSystem, u: &CMatrix) -> f64 {
    infidelity_from_overlap(trace_product(u, system.weighted_target()) / system.subspace_dim() as f64)
}

/// `Q_s = U^R_{s-1} W U^L_{s+1}` so that `Tr[W U^L dU U^R] = Tr[dU Q_s]`.
fn gradient_factors(cache: &PropagationCache, system: &BilinearSystem) -> Vec<CMatrix> {
    let w = system.weighted_target();
    (0..cache.num_steps())
        .map(|s| matmul(&matmul(&cache.forward[s], w), &cache.backward[s + 1]))
        .collect()
}

/// `dg` for every parameter, control-major.
fn overlap_derivatives(cache: &PropagationCache, system: &BilinearSystem, q: &[CMatrix]) -> Vec<Complex64> {
    let n = cache.num_steps();
    let m = system.num_controls();
    let norm = system.subspace_dim() as f64;
    let mut dg = vec![Complex64::new(0.0, 0.0); n * m];
    for (s, qs) in q.iter().enumerate() {
        for k in 0..m {
            dg[k * n + s] = trace_product(&cache.steps[s].first[k], qs) / norm;
        }
    }
    dg
}

fn require_derivatives(cache: &PropagationCache) -> Result<()> {
    if cache.has_derivatives() {
        Ok(())
    } else {
        Err(Error::MissingDerivatives)
    }
}

/// Gradient of `J`; `O(N)` matrix products beyond the cache.
pub fn gradient(cache: &PropagationCache, system: &BilinearSystem) -> Result<DVector<f64>> {
    require_derivatives(cache)?;
    let g = overlap(cache, system);
    let q = gradient_factors(cache, system);
    let dg = overlap_derivatives(cache, system, &q);
    Ok(DVector::from_iterator(dg.len(), dg.iter().map(|d| -2.0 * (g.conj() * d).re)))
}

/// Hessian of `J`, exactly symmetric.
pub fn hessian(cache: &PropagationCache, system: &BilinearSystem) -> Result<DMatrix<f64>> {
    require_derivatives(cache)?;
    let g = overlap(cache, system);
    let q = gradient_factors(cache, system);
    let dg = overlap_derivatives(cache, system, &q);
    Ok(assemble_hessian(cache, system, g, &q, &dg)?)
}

fn assemble_hessian(
    cache: &PropagationCache,
    system: &BilinearSystem,
    g: Complex64,
    q: &[CMatrix],
    dg: &[Complex64],
) -> Result<DMatrix<f64>> {
    let n = cache.num_steps();
    let m = system.num_controls();
    let norm = system.subspace_dim() as f64;
    let w = system.weighted_target();

    // Later-step factor G_{s,k} = W U^L_{s+1} dU_{s,k} U^R_{s-1} and
    // earlier-step factor K_{s,k} = (U^R_s)^dagger dU_{s,k} U^R_{s-1}.
    let mut later = Vec::with_capacity(n);
    let mut earlier = Vec::with_capacity(n);
    for s in 0..n {
        let wl = matmul(w, &cache.backward[s + 1]);
        let right_adj = cache.forward[s + 1].adjoint();
        let step = &cache.steps[s];
        later.push(
            (0..m).map(|k| matmul(&matmul(&wl, &step.first[k]), &cache.forward[s])).collect::<Vec<_>>(),
        );
        earlier.push(
            (0..m).map(|k| matmul(&matmul(&right_adj, &step.first[k]), &cache.forward[s])).collect::<Vec<_>>(),
        );
    }

    let mut hess = DMatrix::zeros(n * m, n * m);
    let mut put = |a: usize, b: usize, d2g: Complex64| {
        let v = -2.0 * (g.conj() * d2g + dg[a] * dg[b].conj()).re;
        hess[(a, b)] = v;
        hess[(b, a)] = v;
    };

    for j in 0..n {
        // Same step.
        for k in 0..m {
            for k2 in k..m {
                let second = cache.steps[j].second(k, k2)?;
                put(k * n + j, k2 * n + j, trace_product(&second, &q[j]) / norm);
            }
        }
        // Earlier steps i < j.
        for i in 0..j {
            for k in 0..m {
                for k2 in 0..m {
                    let d2g = trace_product(&later[j][k], &earlier[i][k2]) / norm;
                    put(k * n + j, k2 * n + i, d2g);
                }
            }
        }
    }
    Ok(hess)
}

/// Convenience front end: propagate, then evaluate `J` and its derivatives.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    system: &'a BilinearSystem,
    backend: Propagator,
}

impl<'a> Evaluator<'a> {
    pub fn new(system: &'a BilinearSystem) -> Self {
        Self { system, backend: Propagator::default() }
    }

    pub fn with_backend(mut self, backend: Propagator) -> Self {
        self.backend = backend;
        self
    }

    pub fn system(&self) -> &BilinearSystem {
        self.system
    }

    pub fn backend(&self) -> Propagator {
        self.backend
    }

    pub fn infidelity(&self, pulse: &ControlPulse) -> Result<f64> {
        let cache = build_cache(self.system, pulse, self.backend, false)?;
        Ok(infidelity(&cache, self.system))
    }

    pub fn evaluate(&self, pulse: &ControlPulse, with_hessian: bool) -> Result<GradHessResult> {
        let cache = build_cache(self.system, pulse, self.backend, true)?;
        let g = overlap(&cache, self.system);
        let q = gradient_factors(&cache, self.system);
        let dg = overlap_derivatives(&cache, self.system, &q);
        let gradient = DVector::from_iterator(dg.len(), dg.iter().map(|d| -2.0 * (g.conj() * d).re));
        let hessian = if with_hessian { Some(assemble_hessian(&cache, self.system, g, &q, &dg)?) } else { None };
        Ok(GradHessResult { infidelity: infidelity_from_overlap(g), gradient, hessian })
    }
}

/// A GRAPE problem as a function of the flat parameter vector, for use with
/// [`crate::optimize`].
#[derive(Debug, Clone)]
pub struct GrapeObjective {
    system: BilinearSystem,
    steps: usize,
    dt: f64,
    backend: Propagator,
}

impl GrapeObjective {
    pub fn new(system: BilinearSystem, steps: usize, dt: f64) -> Result<Self> {
        if steps == 0 || !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidConfig(format!("need steps >= 1 and dt > 0 (got {steps}, {dt})")));
        }
        Ok(Self { system, steps, dt, backend: Propagator::default() })
    }

    pub fn with_backend(mut self, backend: Propagator) -> Self {
        self.backend = backend;
        self
    }

    pub fn system(&self) -> &BilinearSystem {
        &self.system
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn pulse(&self, x: &DVector<f64>) -> Result<ControlPulse> {
        ControlPulse::from_flat(self.steps, self.system.num_controls(), self.dt, x.as_slice())
    }
}

impl crate::optimize::Objective for GrapeObjective {
    fn num_params(&self) -> usize {
        self.steps * self.system.num_controls()
    }

    fn evaluate(&self, x: &DVector<f64>, order: crate::optimize::Order) -> Result<crate::optimize::Evaluation> {
        use crate::optimize::{Evaluation, Order};
        let pulse = self.pulse(x)?;
        let eval = Evaluator::new(&self.system).with_backend(self.backend);
        Ok(match order {
            Order::Value => Evaluation::value(eval.infidelity(&pulse)?),
            Order::Gradient | Order::Hessian => {
                let r = eval.evaluate(&pulse, order == Order::Hessian)?;
                Evaluation { value: r.infidelity, gradient: Some(r.gradient), hessian: r.hessian }
            }
        })
    }
}
