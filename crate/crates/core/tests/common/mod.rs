// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Random instances and independent numerical oracles for integration tests.

#![allow(dead_code)]

use hessgrape::linalg::CMatrix;
use hessgrape::objective::{BilinearSystem, ControlPulse};
use hessgrape::propagation::{eig_hermitian, step_propagator, HermitianMatrix};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> HermitianMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    });
    HermitianMatrix::new((&a + a.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    step_propagator(&eig_hermitian(&random_hermitian(rng, n, 2.0), 1.0).unwrap())
}

/// Target: random unitary on the first `sub` states, identity elsewhere.
pub fn random_system(rng: &mut impl Rng, dim: usize, controls: usize, sub: usize) -> BilinearSystem {
    let drift = random_hermitian(rng, dim, 1.0);
    let hs = (0..controls).map(|_| random_hermitian(rng, dim, 1.0)).collect();
    let block = random_unitary(rng, sub);
    let mut target = CMatrix::identity(dim, dim);
    target.view_mut((0, 0), (sub, sub)).copy_from(&block);
    BilinearSystem::new(drift, hs, (0..sub).collect(), target).unwrap()
}

pub fn random_pulse(rng: &mut impl Rng, steps: usize, controls: usize, dt: f64) -> ControlPulse {
    ControlPulse::new(DMatrix::from_fn(steps, controls, |_, _| rng.random_range(-1.0..1.0)), dt).unwrap()
}

pub fn fd_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        (f(&xp) - f(&xm)) / (2.0 * h)
    })
}

pub fn fd_jacobian(g: impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.len(), x.len());
    for i in 0..x.len() {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        out.set_column(i, &((g(&xp) - g(&xm)) / (2.0 * h)));
    }
    out
}

/// `max |a - b| / max |b|`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn cmax(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive Gauss-Kronrod quadrature of a complex integrand to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn rec(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

/// `-i dt * int_0^1 exp(-i dt (a E_m + (1 - a) E_n)) da`.
pub fn first_exchange_quadrature(em: f64, en: f64, dt: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let f = |a: f64| (-i * dt * (a * em + (1.0 - a) * en)).exp();
    -i * dt * integrate(&f, 0.0, 1.0, 1e-14)
}

/// `(-i dt)^2 int_0^1 da a int_0^1 db exp(b a l_m + (1 - b) a l_p + (1 - a) l_n)`
/// with `l = -i E dt`, evaluated as nested one-dimensional quadratures.
pub fn second_exchange_quadrature(en: f64, ep: f64, em: f64, dt: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let (lm, lp, ln) = (-i * em * dt, -i * ep * dt, -i * en * dt);
    let outer = |a: f64| {
        let inner = |b: f64| (lm * (b * a) + lp * ((1.0 - b) * a) + ln * (1.0 - a)).exp();
        integrate(&inner, 0.0, 1.0, 1e-14) * a
    };
    (-i * dt) * (-i * dt) * integrate(&outer, 0.0, 1.0, 1e-13)
}
