// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! State-transfer form of the objective,
//! `F = |sum_k <psi_k| V^dagger U |psi_k> / dim|^2`.
//!
//! Only the per-step propagators and their derivatives are matrices; all
//! propagation is matrix-vector. Right states `|r_s> = U^R_s |psi>`, left
//! states `<l_s| = <psi| V^dagger U^L_s`, and for the Hessian the
//! first-derivative states `dU_i |r_{i-1}>` are carried forward one step at a
//! time, giving `O(N^2)` matrix-vector products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::cache::compute_steps;
use super::{BilinearSystem, ControlPulse, GradHessResult, Propagator};
use crate::error::{Error, Result};
use crate::linalg::{CVector, ZERO};

const ORTHONORMAL_TOL: f64 = 1e-10;

fn check_orthonormal(states: &[CVector], dim: usize) -> Result<()> {
    if states.is_empty() {
        return Err(Error::EmptyProjector);
    }
    let mut worst = 0.0_f64;
    for (a, sa) in states.iter().enumerate() {
        if sa.len() != dim {
            return Err(Error::DimensionMismatch { context: "state vector", expected: dim, found: sa.len() });
        }
        for (b, sb) in states.iter().enumerate() {
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((sa.dotc(sb) - Complex64::new(expect, 0.0)).norm());
        }
    }
    if worst > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(worst));
    }
    Ok(())
}

/// Infidelity, gradient and (optionally) Hessian of transferring each
/// `states[k]` to `V states[k]` with a common phase. `system.target()` is
/// `V`; `system.initial()` is applied before the first step. The projector
/// of `system` is not used; normalization is by the number of states.
pub fn state_transfer_objective(
    system: &BilinearSystem,
    states: &[CVector],
    pulse: &ControlPulse,
    backend: Propagator,
    with_hessian: bool,
) -> Result<GradHessResult> {
    check_orthonormal(states, system.dim())?;
    let steps = compute_steps(system, pulse, backend, true)?;
    let n = steps.len();
    let m = system.num_controls();
    let norm = states.len() as f64;

    let mut g = ZERO;
    let mut dg = vec![ZERO; n * m];
    let mut d2g = DMatrix::from_element(n * m, n * m, ZERO);

    for psi in states {
        // right[s] is the state before step s; right[n] the final state.
        let mut right = Vec::with_capacity(n + 1);
        right.push(system.initial() * psi);
        for (s, step) in steps.iter().enumerate() {
            let next = &step.unitary * &right[s];
            right.push(next);
        }
        // left[s] = (U^L)^dagger V psi, i.e. <left[s]| = <psi| V^dagger U_{n-1} ... U_s.
        let mut left = vec![CVector::zeros(psi.len()); n + 1];
        left[n] = system.target() * psi;
        for s in (0..n).rev() {
            left[s] = steps[s].unitary.adjoint() * &left[s + 1];
        }

        g += left[n].dotc(&right[n]);
        for (s, step) in steps.iter().enumerate() {
            for k in 0..m {
                dg[k * n + s] += left[s + 1].dotc(&(&step.first[k] * &right[s]));
            }
        }

        if !with_hessian {
            continue;
        }
        for (i, step_i) in steps.iter().enumerate() {
            for k2 in 0..m {
                // Same step.
                for k in k2..m {
                    let second = step_i.second(k, k2)?;
                    let v = left[i + 1].dotc(&(&second * &right[i]));
                    d2g[(k * n + i, k2 * n + i)] += v;
                    if k != k2 {
                        d2g[(k2 * n + i, k * n + i)] += v;
                    }
                }
                // Derivative state after step i, carried to later steps j.
                let mut carried: DVector<Complex64> = &step_i.first[k2] * &right[i];
                for (j, step_j) in steps.iter().enumerate().skip(i + 1) {
                    for k in 0..m {
                        let v = left[j + 1].dotc(&(&step_j.first[k] * &carried));
                        d2g[(k * n + j, k2 * n + i)] += v;
                        d2g[(k2 * n + i, k * n + j)] += v;
                    }
                    carried = &step_j.unitary * carried;
                }
            }
        }
    }

    g /= norm;
    for d in dg.iter_mut() {
        *d /= norm;
    }
    let gradient = DVector::from_iterator(n * m, dg.iter().map(|d| -2.0 * (g.conj() * d).re));
    let hessian = with_hessian.then(|| {
        DMatrix::from_fn(n * m, n * m, |a, b| {
            -2.0 * (g.conj() * d2g[(a, b)] / norm + dg[a] * dg[b].conj()).re
        })
    });
    Ok(GradHessResult { infidelity: (1.0 - g.norm_sqr()).clamp(0.0, 1.0), gradient, hessian })
}
