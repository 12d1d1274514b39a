// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DVector;

use super::{Bounds, Evaluation, Objective, Order};
use crate::error::{Error, Result};

/// `J(x) + sigma * sum_i v_i(x)^2`, where `v_i` is how far `x_i` lies outside its bounds.
#[derive(Debug, Clone)]
pub struct PenaltyObjective<'a, O: ?Sized> {
    inner: &'a O,
    bounds: Bounds,
    sigma: f64,
}

impl<'a, O: Objective + ?Sized> PenaltyObjective<'a, O> {
    pub fn new(inner: &'a O, bounds: Bounds, sigma: f64) -> Result<Self> {
        if bounds.len() != inner.num_params() {
            return Err(Error::DimensionMismatch {
                context: "penalty bounds",
                expected: inner.num_params(),
                found: bounds.len(),
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!("penalty weight must be positive, got {sigma}")));
        }
        Ok(Self { inner, bounds, sigma })
    }

    /// Signed violation per coordinate: negative below, positive above, zero inside.
    fn violation(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| {
            if x[i] < self.bounds.lower[i] {
                x[i] - self.bounds.lower[i]
            } else if x[i] > self.bounds.upper[i] {
                x[i] - self.bounds.upper[i]
            } else {
                0.0
            }
        })
    }
}

impl<O: Objective + ?Sized> Objective for PenaltyObjective<'_, O> {
    fn num_params(&self) -> usize {
        self.inner.num_params()
    }

    fn evaluate(&self, x: &DVector<f64>, order: Order) -> Result<Evaluation> {
        let mut e = self.inner.evaluate(x, order)?;
        let v = self.violation(x);
        e.value += self.sigma * v.norm_squared();
        if let Some(g) = e.gradient.as_mut() {
            *g += &v * (2.0 * self.sigma);
        }
        if let Some(h) = e.hessian.as_mut() {
            for i in 0..v.len() {
                if v[i] != 0.0 {
                    h[(i, i)] += 2.0 * self.sigma;
                }
            }
        }
        Ok(e)
    }
}
