// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Random instances and finite-difference oracles shared by unit tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CMatrix;
use crate::objective::{BilinearSystem, ControlPulse};
use crate::propagation::{eig_hermitian, step_propagator, HermitianMatrix};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> HermitianMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    });
    HermitianMatrix::symmetrized(m)
}

pub(crate) fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    step_propagator(&eig_hermitian(&random_hermitian(rng, n, 2.0), 1.0).unwrap())
}

/// Random drift and controls; the target is a random unitary on the first
/// `sub` basis states and the identity elsewhere.
pub(crate) fn random_system(rng: &mut impl Rng, dim: usize, controls: usize, sub: usize) -> BilinearSystem {
    let drift = random_hermitian(rng, dim, 1.0);
    let hs = (0..controls).map(|_| random_hermitian(rng, dim, 1.0)).collect();
    let block = random_unitary(rng, sub);
    let mut target = CMatrix::identity(dim, dim);
    target.view_mut((0, 0), (sub, sub)).copy_from(&block);
    BilinearSystem::new(drift, hs, (0..sub).collect(), target).unwrap()
}

pub(crate) fn random_pulse(rng: &mut impl Rng, steps: usize, controls: usize, dt: f64) -> ControlPulse {
    let a = DMatrix::from_fn(steps, controls, |_, _| rng.random_range(-1.0..1.0));
    ControlPulse::new(a, dt).unwrap()
}

/// Central differences of a scalar function.
pub(crate) fn fd_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

/// Central differences of a gradient, column by column.
pub(crate) fn fd_jacobian(g: impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        out.set_column(i, &((g(&xp) - g(&xm)) / (2.0 * h)));
    }
    out
}

/// `max |a - b| / max |b|`.
pub(crate) fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
