use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, FourierStar};
use crate::spectral::{BoundaryTreatment, LinearSolver};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative Rayleigh-quotient tolerance of every eigen solve.
    pub eigen_tol: f64,
    /// Absolute tolerance on |perimeter − L| after projection.
    pub constraint_tol: f64,
    /// Relative λ₁ gain below which an iteration counts as stalled.
    pub stall_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen_tol: 1e-9,
            constraint_tol: 1e-6,
            stall_tol: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizeConfig {
    /// Perimeter budget L.
    #[serde(rename = "L")]
    pub budget: f64,
    /// Fourier truncation order.
    pub k_max: usize,
    /// Initial step in coefficient space (length units).
    pub step0: f64,
    pub max_iters: usize,
    /// Grid spacing of the eigen solves.
    pub h: f64,
    pub tolerances: Tolerances,
    /// Single seed; when absent the default seed family is used.
    pub init: Option<FourierStar>,
    /// Explicit seed list, overriding `init` and the defaults.
    pub seeds: Option<Vec<FourierStar>>,
    pub allow_center_motion: bool,
    pub treatment: BoundaryTreatment,
    pub solver: LinearSolver,
    /// θ-samples for gradients and the optimality residual.
    pub n_samples: usize,
    /// Certify the final obstacle with the grid Minkowski estimator.
    pub certify: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            budget: 0.0,
            k_max: 6,
            step0: 0.02,
            max_iters: 40,
            h: 1.0 / 64.0,
            tolerances: Tolerances::default(),
            init: None,
            seeds: None,
            allow_center_motion: true,
            treatment: BoundaryTreatment::Corrected,
            solver: LinearSolver::Cholesky,
            n_samples: 256,
            certify: true,
        }
    }
}

impl OptimizeConfig {
    pub fn new(budget: f64, h: f64) -> Self {
        Self {
            budget,
            h,
            ..Self::default()
        }
    }

    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let limit = domain.boundary_length();
        if !(self.budget > 0.0 && self.budget < limit) {
            return Err(Error::InfeasibleBudget {
                budget: self.budget,
                limit,
            });
        }
        let t = &self.tolerances;
        if !(t.eigen_tol > 0.0 && t.constraint_tol > 0.0 && t.stall_tol > 0.0) {
            return Err(Error::Precondition("tolerances must be positive".into()));
        }
        if !(self.h > 0.0 && self.step0 > 0.0) {
            return Err(Error::Precondition("h and step0 must be positive".into()));
        }
        if self.n_samples < 64 {
            return Err(Error::Precondition("n_samples must be at least 64".into()));
        }
        Ok(())
    }
}
