//! JSON instance files.
//!
//! ```json
//! {
//!   "objective": "sphere",
//!   "dimension": 2,
//!   "bounds": {"lower": [-5, -5], "upper": [5, 5]},
//!   "constraints": [{"kind": "linear", "coeffs": [1, -2], "b": -0.5}],
//!   "meta": {"seed": 7}
//! }
//! ```
//!
//! `meta` is free-form and preserved as-is.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{contract, Result};
use crate::problem::{Bounds, Constraint, Objective, Problem};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InstanceFile<T> {
    pub objective: Objective,
    pub dimension: usize,
    pub bounds: Bounds<T>,
    pub constraints: Vec<Constraint<T>>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl<T: Scalar> InstanceFile<T> {
    pub fn from_problem(problem: &Problem<T>, meta: Map<String, Value>) -> Self {
        Self {
            objective: problem.objective(),
            dimension: problem.dimension(),
            bounds: problem.bounds().clone(),
            constraints: problem.constraints().to_vec(),
            meta,
        }
    }

    pub fn to_problem(&self) -> Result<Problem<T>> {
        if self.dimension != self.bounds.dimension() {
            return Err(contract(format!(
                "instance declares dimension {} but bounds have {}",
                self.dimension,
                self.bounds.dimension()
            )));
        }
        Problem::new(
            self.objective,
            self.bounds.clone(),
            self.constraints.clone(),
        )
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> std::result::Result<Self, InstanceError> {
        let file: Self = serde_json::from_str(text)?;
        // Bounds and constraints deserialize without their constructors' checks.
        let bounds = Bounds::new(file.bounds.lower().to_vec(), file.bounds.upper().to_vec())?;
        let constraints = file
            .constraints
            .iter()
            .map(|c| Constraint::new(c.kind(), c.coeffs().to_vec(), c.offset()))
            .collect::<Result<Vec<_>>>()?;
        let file = Self {
            bounds,
            constraints,
            ..file
        };
        file.to_problem()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("instance serialization is infallible");
        s.push('\n');
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(#[from] crate::error::Error),
}
