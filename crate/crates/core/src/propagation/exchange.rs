// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Exchange integrals: divided differences of `f(E) = exp(-i E dt)`.
//!
//! `I(m, n) = f[E_m, E_n]` and `I2(n1, n2, n3) = f[E_n1, E_n2, E_n3]`. The
//! closed forms divide by energy gaps, which loses all precision once a gap
//! times `dt` is small. Inside [`SERIES_RADIUS`] both are instead summed from
//! the Taylor expansion of the divided difference around the smallest energy;
//! the series and closed forms agree to rounding at the switch-over.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StepEigensystem;
use crate::linalg::{I, ONE, ZERO};

/// Spread `|E_max - E_min| * dt` below which divided differences are summed
/// as a power series.
pub const SERIES_RADIUS: f64 = 0.5;

const SERIES_TERMS: usize = 28;

/// Energies closer than this are treated as exactly degenerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegeneracyTolerance {
    /// `1e-12 * max(1, max|E| dt) / dt`.
    Auto,
    Absolute(f64),
}

impl Default for DegeneracyTolerance {
    fn default() -> Self {
        Self::Auto
    }
}

impl DegeneracyTolerance {
    pub fn resolve(self, es: &StepEigensystem) -> f64 {
        match self {
            Self::Absolute(tol) => tol,
            Self::Auto => {
                let emax = es.energies.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
                1e-12 * (emax * es.dt).max(1.0) / es.dt
            }
        }
    }
}

/// The symmetric matrix `I(m, n)` for one time step.
#[derive(Debug, Clone)]
pub struct FirstExchangeMatrix {
    entries: DMatrix<Complex64>,
    dt: f64,
}

impl FirstExchangeMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// `(e^w - 1) / w`.
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < SERIES_RADIUS {
        // sum_k w^k / (k+1)!
        let mut term = ONE;
        let mut acc = ONE;
        for k in 1..SERIES_TERMS {
            term *= w / (k as f64 + 1.0);
            acc += term;
        }
        acc
    } else {
        (w.exp() - ONE) / w
    }
}

fn first_divided(ea: f64, eb: f64, dt: f64, tol: f64) -> Complex64 {
    let gap = ea - eb;
    if gap.abs() <= tol {
        -I * dt * Complex64::from_polar(1.0, -ea * dt)
    } else if (gap * dt).abs() < SERIES_RADIUS {
        // f[a, b] = -i dt e^{-i E_b dt} phi1(-i (E_a - E_b) dt)
        -I * dt * Complex64::from_polar(1.0, -eb * dt) * phi1(-I * gap * dt)
    } else {
        (Complex64::from_polar(1.0, -ea * dt) - Complex64::from_polar(1.0, -eb * dt)) / gap
    }
}

/// Compute `I(m, n)`: `-i dt e^{-i E_m dt}` for degenerate pairs, otherwise
/// `(e^{-i E_m dt} - e^{-i E_n dt}) / (E_m - E_n)`. The upper triangle is
/// evaluated and mirrored, so the matrix is exactly symmetric.
pub fn first_exchange(es: &StepEigensystem, tolerance: DegeneracyTolerance) -> FirstExchangeMatrix {
    let tol = tolerance.resolve(es);
    let n = es.dim();
    let e = &es.energies;
    let mut entries = DMatrix::from_element(n, n, ZERO);
    for m in 0..n {
        for k in m..n {
            let v = first_divided(e[m], e[k], es.dt, tol);
            entries[(m, k)] = v;
            entries[(k, m)] = v;
        }
    }
    FirstExchangeMatrix { entries, dt: es.dt }
}

/// Lazily evaluated second exchange integral `I2(n1, n2, n3)`.
///
/// Reuses the first-order entries `I(m, n)` of the same step; nothing of size
/// `dim^3` is stored.
#[derive(Debug, Clone)]
pub struct SecondExchangeTensor<'a> {
    energies: &'a [f64],
    first: &'a FirstExchangeMatrix,
    dt: f64,
    tol: f64,
}

/// Build the evaluator for `I2` from the eigensystem and its `I` matrix.
pub fn second_exchange<'a>(
    es: &'a StepEigensystem,
    first: &'a FirstExchangeMatrix,
    tolerance: DegeneracyTolerance,
) -> SecondExchangeTensor<'a> {
    SecondExchangeTensor {
        energies: es.energies.as_slice(),
        first,
        dt: es.dt,
        tol: tolerance.resolve(es),
    }
}

impl SecondExchangeTensor<'_> {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `I2(n1, n2, n3)`, invariant under any permutation of the indices.
    pub fn get(&self, n1: usize, n2: usize, n3: usize) -> Complex64 {
        let e = self.energies;
        // Canonical order by (energy, index) makes the result bitwise
        // independent of the argument order.
        let mut idx = [n1, n2, n3];
        idx.sort_by(|&a, &b| e[a].total_cmp(&e[b]).then(a.cmp(&b)));
        let [a, b, c] = idx;
        let spread = e[c] - e[a];
        let same_ab = e[b] - e[a] <= self.tol;
        let same_bc = e[c] - e[b] <= self.tol;

        if spread <= self.tol || (same_ab && same_bc) {
            // All three degenerate.
            return -I * self.dt / 2.0 * self.first.get(a, a);
        }
        if spread * self.dt < SERIES_RADIUS {
            return self.series(e[a], e[b], e[c]);
        }
        if same_ab {
            // n = c, m = a (repeated): [I(n, m) - I(m, m)] / (E_n - E_m)
            return (self.first.get(c, a) - self.first.get(a, a)) / (e[c] - e[a]);
        }
        if same_bc {
            // n = a, m = c (repeated)
            return (self.first.get(a, c) - self.first.get(c, c)) / (e[a] - e[c]);
        }
        // Distinct: [I(c, b) - I(b, a)] / (E_c - E_a).
        (self.first.get(c, b) - self.first.get(b, a)) / spread
    }

    /// Power series of the second divided difference of `exp(-i E dt)`
    /// centred at `e0`: `(-i dt)^2 e^{-i e0 dt} sum_k h_k(w) / (k+2)!` with
    /// `w_j = -i (E_j - e0) dt` and `h_k` the complete homogeneous symmetric
    /// polynomials.
    fn series(&self, e0: f64, e1: f64, e2: f64) -> Complex64 {
        let w = [ZERO, -I * (e1 - e0) * self.dt, -I * (e2 - e0) * self.dt];
        // h_k over {w0}: w0^k with w0 = 0, so h_0 = 1 and the rest vanish.
        let mut h = [ZERO; SERIES_TERMS];
        h[0] = ONE;
        for wj in &w[1..] {
            for k in 1..SERIES_TERMS {
                let prev = h[k - 1];
                h[k] += wj * prev;
            }
        }
        let mut acc = ZERO;
        let mut inv_fact = 0.5; // 1/2!
        for (k, hk) in h.iter().enumerate() {
            acc += hk * inv_fact;
            inv_fact /= k as f64 + 3.0;
        }
        let pre = -I * self.dt;
        pre * pre * Complex64::from_polar(1.0, -e0 * self.dt) * acc
    }
}
