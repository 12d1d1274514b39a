// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in control problems.
//!
//! Frequencies are angular, in rad/ns, so that `dt` is in ns. Use
//! [`TransmonParams::from_ghz`] to enter values as `f = omega / 2 pi` in GHz.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{pauli, CMatrix, ONE, ZERO};
use crate::objective::{BilinearSystem, ControlBound, GrapeObjective};
use crate::optimize::Bounds;
use crate::propagation::HermitianMatrix;

/// A system together with the time grid and control bounds it is meant for.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: BilinearSystem,
    /// One entry per control.
    pub bounds: Vec<ControlBound>,
    pub dt: f64,
    pub steps: usize,
}

impl Problem {
    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn objective(&self) -> Result<GrapeObjective> {
        GrapeObjective::new(self.system.clone(), self.steps, self.dt)
    }

    /// Flat bounds in the control-major parameter order.
    pub fn optimizer_bounds(&self) -> Bounds {
        Bounds::from_controls(&self.bounds, self.steps)
    }

    pub fn with_bounds(mut self, bounds: Vec<ControlBound>) -> Result<Self> {
        if bounds.len() != self.system.num_controls() {
            return Err(Error::DimensionMismatch {
                context: "control bounds",
                expected: self.system.num_controls(),
                found: bounds.len(),
            });
        }
        self.bounds = bounds;
        Ok(self)
    }
}

/// Number of steps for `duration / dt`, which must be a positive integer up to rounding.
pub fn steps_for(duration: f64, dt: f64) -> Result<usize> {
    if !(duration.is_finite() && dt.is_finite() && duration > 0.0 && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("duration {duration} and dt {dt} must be positive")));
    }
    let n = (duration / dt).round();
    if n < 1.0 || (n * dt - duration).abs() > 1e-9 * duration {
        return Err(Error::InvalidConfig(format!("dt {dt} does not divide duration {duration}")));
    }
    Ok(n as usize)
}

/// Two transmons dispersively coupled through a cavity, driven on the first one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Anharmonicities.
    pub delta1: f64,
    pub delta2: f64,
    pub omega_r: f64,
    pub g1: f64,
    pub g2: f64,
    /// Drive amplitude limit, `|Omega| <= drive_max`.
    pub drive_max: f64,
    /// Levels kept per transmon.
    pub levels: usize,
}

impl Default for TransmonParams {
    /// 5.0 and 5.5 GHz transmons, -350 MHz anharmonicity, 7.5 GHz cavity,
    /// 100 MHz couplings, 200 MHz drive limit, three levels each.
    fn default() -> Self {
        Self::from_ghz(5.0, 5.5, -0.35, -0.35, 7.5, 0.1, 0.1, 0.2, 3)
    }
}

/// Couplings of the effective transmon-transmon Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplings {
    pub coupling: f64,
    pub dressed1: f64,
    pub dressed2: f64,
    /// `dressed1 - dressed2`, the drift of transmon 1 in the frame of transmon 2.
    pub detuning: f64,
}

impl TransmonParams {
    /// All arguments except `levels` in GHz (ordinary frequency).
    #[allow(clippy::too_many_arguments)]
    pub fn from_ghz(
        f1: f64,
        f2: f64,
        anharm1: f64,
        anharm2: f64,
        f_r: f64,
        g1: f64,
        g2: f64,
        drive_max: f64,
        levels: usize,
    ) -> Self {
        Self {
            omega1: TAU * f1,
            omega2: TAU * f2,
            delta1: TAU * anharm1,
            delta2: TAU * anharm2,
            omega_r: TAU * f_r,
            g1: TAU * g1,
            g2: TAU * g2,
            drive_max: TAU * drive_max,
            levels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega1, self.omega2, self.delta1, self.delta2, self.omega_r, self.g1, self.g2, self.drive_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("transmon parameters"));
        }
        if self.levels < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 levels per transmon, got {}", self.levels)));
        }
        if !(self.drive_max > 0.0) {
            return Err(Error::InvalidConfig("drive limit must be positive".into()));
        }
        for (j, w) in [(1, self.omega1), (2, self.omega2)] {
            if w == self.omega_r {
                return Err(Error::DispersiveBreakdown(j));
            }
        }
        Ok(())
    }

    /// Cavity detunings `omega_j - omega_r`.
    pub fn detunings(&self) -> (f64, f64) {
        (self.omega1 - self.omega_r, self.omega2 - self.omega_r)
    }

    /// Second-order dispersive couplings after eliminating the cavity.
    pub fn derived(&self) -> Result<DerivedCouplings> {
        self.validate()?;
        let (d1, d2) = self.detunings();
        let dressed1 = self.omega1 + self.g1 * self.g1 / d1;
        let dressed2 = self.omega2 + self.g2 * self.g2 / d2;
        Ok(DerivedCouplings {
            coupling: self.g1 * self.g2 * (d1 + d2) / (d1 * d2),
            dressed1,
            dressed2,
            detuning: dressed1 - dressed2,
        })
    }

    pub fn dim(&self) -> usize {
        self.levels * self.levels
    }

    /// Index of `|n1 n2>`, with `n2` running fastest.
    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.levels + n2
    }

    /// Indices of `|00>, |01>, |10>, |11>`.
    pub fn qubit_subspace(&self) -> Vec<usize> {
        vec![self.index(0, 0), self.index(0, 1), self.index(1, 0), self.index(1, 1)]
    }
}

fn annihilation(levels: usize) -> DMatrix<f64> {
    DMatrix::from_fn(levels, levels, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Effective two-transmon system in the frame of the second dressed transmon,
/// with the single control `b1^dagger + b1` and a CNOT target on the qubit subspace.
pub fn transmon_effective_system(p: &TransmonParams) -> Result<BilinearSystem> {
    let c = p.derived()?;
    let l = p.levels;
    let a = annihilation(l);
    let id = DMatrix::<f64>::identity(l, l);
    let b1 = kron(&a, &id);
    let b2 = kron(&id, &a);
    let n1 = b1.transpose() * &b1;
    let n2 = b2.transpose() * &b2;
    let eye = DMatrix::<f64>::identity(l * l, l * l);
    let anharm = |n: &DMatrix<f64>, delta: f64| n * (n - &eye) * (delta / 2.0);
    let exchange = b1.transpose() * &b2 + b2.transpose() * &b1;
    let drift = &n1 * c.detuning + anharm(&n1, p.delta1) + anharm(&n2, p.delta2) + exchange * c.coupling;
    let control = b1.transpose() + &b1;
    BilinearSystem::new(
        HermitianMatrix::from_real(drift)?,
        vec![HermitianMatrix::from_real(control)?],
        p.qubit_subspace(),
        cnot_target(p.levels),
    )
}

/// CNOT with the first transmon as control, embedded as identity outside the qubit subspace.
pub fn cnot_target(levels: usize) -> CMatrix {
    let n = levels * levels;
    let mut v = CMatrix::identity(n, n);
    let (a, b) = (levels, levels + 1);
    v[(a, a)] = ZERO;
    v[(b, b)] = ZERO;
    v[(a, b)] = ONE;
    v[(b, a)] = ONE;
    v
}

/// The transmon CNOT problem on a uniform grid; `duration` and `dt` in ns.
pub fn transmon_problem(p: &TransmonParams, duration: f64, dt: f64) -> Result<Problem> {
    let steps = steps_for(duration, dt)?;
    Ok(Problem {
        system: transmon_effective_system(p)?,
        bounds: vec![ControlBound::symmetric(p.drive_max)?],
        dt,
        steps,
    })
}

/// `H = sigma_x + c(t) sigma_z` with target `sigma_x`, on `steps` equal steps
/// of total length `duration`. Controls are unbounded.
pub fn two_level_example(duration: f64, steps: usize) -> Result<Problem> {
    if steps == 0 {
        return Err(Error::InvalidConfig("at least one time step is required".into()));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidConfig(format!("duration must be positive, got {duration}")));
    }
    let system = BilinearSystem::new(
        HermitianMatrix::new(pauli::x())?,
        vec![HermitianMatrix::new(pauli::z())?],
        vec![0, 1],
        pauli::x(),
    )?;
    Ok(Problem { system, bounds: vec![ControlBound::UNBOUNDED], dt: duration / steps as f64, steps })
}

/// Amplitude bound used by the two-level trap demonstration.
pub const TWO_LEVEL_DEMO_BOUND: f64 = 2.5;

/// Start point of the two-level trap demonstration at `T = 3 pi / 2`, `N = 2`.
pub const TWO_LEVEL_DEMO_START: [f64; 2] = [-0.915, 2.251];

/// Local (non-global) optimum of the demonstration, to three decimals.
pub const TWO_LEVEL_TRAP: [f64; 2] = [0.0, 2.285];
