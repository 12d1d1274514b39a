// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Closed amplitude interval for one control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBound {
    pub min: f64,
    pub max: f64,
}

impl ControlBound {
    pub const UNBOUNDED: Self = Self { min: f64::NEG_INFINITY, max: f64::INFINITY };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if min.is_nan() || max.is_nan() || min >= max {
            return Err(Error::InvalidConfig(format!("invalid control bound [{min}, {max}]")));
        }
        Ok(Self { min, max })
    }

    /// Symmetric interval `[-limit, limit]`.
    pub fn symmetric(limit: f64) -> Result<Self> {
        Self::new(-limit, limit)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// Piecewise-constant control amplitudes `c_{j,k}`: `N` time steps of equal
/// duration `dt`, `M` controls.
///
/// The flat parameter vector is control-major: all `N` steps of control 0,
/// then all steps of control 1, and so on. Index of `(step j, control k)` is
/// `k * N + j`. This is also the column-major layout of [`Self::amplitudes`].
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPulse {
    amplitudes: DMatrix<f64>,
    dt: f64,
    bounds: Vec<ControlBound>,
}

impl ControlPulse {
    pub fn new(amplitudes: DMatrix<f64>, dt: f64) -> Result<Self> {
        if amplitudes.nrows() == 0 || amplitudes.ncols() == 0 {
            return Err(Error::InvalidConfig("pulse needs at least one step and one control".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidConfig(format!("step duration must be > 0, got {dt}")));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("pulse amplitudes"));
        }
        let m = amplitudes.ncols();
        Ok(Self { amplitudes, dt, bounds: vec![ControlBound::UNBOUNDED; m] })
    }

    /// All-zero pulse; panics on zero sizes or a non-positive `dt`.
    pub fn zeros(steps: usize, controls: usize, dt: f64) -> Self {
        Self::new(DMatrix::zeros(steps, controls), dt).expect("valid pulse shape")
    }

    /// Rebuild from a flat control-major vector.
    pub fn from_flat(steps: usize, controls: usize, dt: f64, flat: &[f64]) -> Result<Self> {
        if flat.len() != steps * controls {
            return Err(Error::DimensionMismatch {
                context: "flat pulse vector",
                expected: steps * controls,
                found: flat.len(),
            });
        }
        Self::new(DMatrix::from_column_slice(steps, controls, flat), dt)
    }

    pub fn with_bounds(mut self, bounds: Vec<ControlBound>) -> Result<Self> {
        if bounds.len() != self.controls() {
            return Err(Error::DimensionMismatch {
                context: "control bounds",
                expected: self.controls(),
                found: bounds.len(),
            });
        }
        self.bounds = bounds;
        Ok(self)
    }

    pub fn steps(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn controls(&self) -> usize {
        self.amplitudes.ncols()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn bounds(&self) -> &[ControlBound] {
        &self.bounds
    }

    pub fn amplitudes(&self) -> &DMatrix<f64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, step: usize, control: usize) -> f64 {
        self.amplitudes[(step, control)]
    }

    /// Amplitudes of all controls at one step.
    pub fn row(&self, step: usize) -> Vec<f64> {
        self.amplitudes.row(step).iter().copied().collect()
    }

    pub fn to_flat(&self) -> DVector<f64> {
        DVector::from_column_slice(self.amplitudes.as_slice())
    }

    pub fn within_bounds(&self) -> bool {
        self.amplitudes
            .column_iter()
            .zip(&self.bounds)
            .all(|(col, b)| col.iter().all(|&x| b.contains(x)))
    }

    /// Hash of the exact bit patterns of amplitudes and `dt`.
    pub fn content_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.steps().hash(&mut h);
        self.controls().hash(&mut h);
        self.dt.to_bits().hash(&mut h);
        for a in self.amplitudes.iter() {
            a.to_bits().hash(&mut h);
        }
        h.finish()
    }
}
