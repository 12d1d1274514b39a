// Copyright 2026 The hessgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! User-supplied systems read from JSON.
//!
//! ```json
//! {
//!   "drift": [[0, 1], [1, 0]],
//!   "controls": [{"re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]}],
//!   "subspace": [0, 1],
//!   "target": [[0, 1], [1, 0]],
//!   "bounds": [[-2.5, 2.5]]
//! }
//! ```
//!
//! A matrix is either a real row-major array or an object with `re` and
//! `im` arrays. `bounds` holds one `[min, max]` pair per control; `initial`
//! (the unitary applied before the first step) is optional.

use std::path::Path;

use hessgrape::linalg::CMatrix;
use hessgrape::models::{steps_for, Problem};
use hessgrape::objective::{BilinearSystem, ControlBound};
use hessgrape::propagation::HermitianMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Real(Vec<Vec<f64>>),
    Complex { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl MatrixSpec {
    fn to_matrix(&self, what: &str) -> Result<CMatrix, CliError> {
        let bad = |msg: String| CliError::Invalid { path: what.to_string(), message: msg };
        let square = |rows: &Vec<Vec<f64>>| -> Result<usize, CliError> {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(bad(format!("expected a non-empty square matrix, got {n} rows")));
            }
            Ok(n)
        };
        match self {
            Self::Real(rows) => {
                let n = square(rows)?;
                Ok(CMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c], 0.0)))
            }
            Self::Complex { re, im } => {
                let n = square(re)?;
                if square(im)? != n {
                    return Err(bad("re and im parts differ in size".into()));
                }
                Ok(CMatrix::from_fn(n, n, |r, c| Complex64::new(re[r][c], im[r][c])))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSystem {
    pub drift: MatrixSpec,
    pub controls: Vec<MatrixSpec>,
    pub subspace: Vec<usize>,
    pub target: MatrixSpec,
    pub bounds: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<MatrixSpec>,
}

impl CustomSystem {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e.to_string()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let sys: Self = serde_path_to_error::deserialize(de).map_err(|e| CliError::Invalid {
            path: format!("custom:{}", e.path()),
            message: e.inner().to_string(),
        })?;
        sys.system()?;
        Ok(sys)
    }

    pub fn system(&self) -> Result<BilinearSystem, CliError> {
        let herm = |m: &MatrixSpec, what: &str| -> Result<HermitianMatrix, CliError> {
            HermitianMatrix::new(m.to_matrix(what)?)
                .map_err(|e| CliError::Invalid { path: what.to_string(), message: e.to_string() })
        };
        let drift = herm(&self.drift, "custom:drift")?;
        let controls = self
            .controls
            .iter()
            .enumerate()
            .map(|(k, m)| herm(m, &format!("custom:controls[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if self.bounds.len() != controls.len() {
            return Err(CliError::Invalid {
                path: "custom:bounds".into(),
                message: format!("{} bounds for {} controls", self.bounds.len(), controls.len()),
            });
        }
        let mut system =
            BilinearSystem::new(drift, controls, self.subspace.clone(), self.target.to_matrix("custom:target")?)?;
        if let Some(u0) = &self.initial {
            system = system.with_initial(u0.to_matrix("custom:initial")?)?;
        }
        Ok(system)
    }

    pub fn problem(&self, duration: f64, dt: f64) -> Result<Problem, CliError> {
        let bounds = self
            .bounds
            .iter()
            .map(|&[lo, hi]| ControlBound::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Problem { system: self.system()?, bounds, dt, steps: steps_for(duration, dt)? })
    }
}
