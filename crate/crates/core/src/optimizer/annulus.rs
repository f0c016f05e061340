use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::ascent::{maximize_from, ObstacleResult};
use super::config::OptimizeConfig;
use crate::analytic::{annulus_lambda1, half_annulus_lambda1};
use crate::error::{Error, Result};
use crate::geometry::{point, Domain, FourierStar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RadialCandidate {
    /// A radially symmetric obstacle must wrap the hole (perimeter ≥ 4πr₁).
    Empty,
    /// The ring B̄(r₁+h) \ B(r₁) with 2π(2r₁+h) = L.
    Ring { h: f64, lambda1: f64 },
}

impl RadialCandidate {
    pub fn lambda1(&self) -> Option<f64> {
        match self {
            RadialCandidate::Empty => None,
            RadialCandidate::Ring { lambda1, .. } => Some(*lambda1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Radial,
    NonRadial,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusReport {
    pub r1: f64,
    pub r0: f64,
    pub budget: f64,
    pub radial: RadialCandidate,
    /// λ₁ of the half annulus, the value left by a half-ring obstacle.
    pub half_ring_reference: f64,
    pub runs: Vec<ObstacleResult>,
    pub failed_seeds: Vec<(usize, String)>,
    pub best_nonradial: Option<f64>,
    pub winner: Option<Winner>,
    /// best non-radial λ₁ minus the radial one, when both exist.
    pub gap: Option<f64>,
}

/// Circles centered at distance d from the center, overlapping the hole,
/// plus one mode-2 variant.
pub fn glued_seeds(r1: f64) -> Vec<FourierStar> {
    let mut seeds: Vec<FourierStar> = [0.2, 0.4, 0.6]
        .iter()
        .map(|&d| FourierStar::circle(point(d * r1, 0.0), 1.2 * r1))
        .collect();
    seeds.push(FourierStar::new(
        point(0.4 * r1, 0.0),
        1.2 * r1,
        vec![0.0, 0.1 * r1],
        vec![0.0, 0.0],
    ));
    seeds
}

/// Compares the best radial obstacle of budget L in the annulus
/// B(r₀) \ B̄(r₁) against optimizer runs from asymmetric glued seeds.
pub fn annulus_experiment(
    r1: f64,
    r0: f64,
    config: &OptimizeConfig,
    seeds: &[FourierStar],
) -> Result<AnnulusReport> {
    if !(0.0 < r1 && r1 < r0) {
        return Err(Error::InvalidGeometry(format!("need 0 < r1 < r0, got {r1}, {r0}")));
    }
    let budget = config.budget;
    let domain = Domain::annulus(point(0.0, 0.0), r1, r0)?;
    let limit = 2.0 * PI * (r0 + r1);
    if !(budget > 0.0 && budget < limit) {
        return Err(Error::InfeasibleBudget { budget, limit });
    }
    let radial = if budget < 4.0 * PI * r1 {
        RadialCandidate::Empty
    } else {
        let h = budget / (2.0 * PI) - 2.0 * r1;
        RadialCandidate::Ring {
            h,
            lambda1: annulus_lambda1(r1 + h, r0)?,
        }
    };
    let outcomes: Vec<Result<ObstacleResult>> = seeds
        .par_iter()
        .map(|s| maximize_from(&domain, config, s))
        .collect();
    let mut runs = Vec::new();
    let mut failed_seeds = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(mut r) => {
                r.seed = i;
                runs.push(r);
            }
            Err(e) => failed_seeds.push((i, e.to_string())),
        }
    }
    let best_nonradial = runs.iter().map(|r| r.lambda1).reduce(f64::max);
    let (winner, gap) = match (radial.lambda1(), best_nonradial) {
        (Some(a), Some(b)) => (
            Some(if b > a { Winner::NonRadial } else { Winner::Radial }),
            Some(b - a),
        ),
        (None, Some(_)) => (Some(Winner::NonRadial), None),
        (Some(_), None) => (Some(Winner::Radial), None),
        (None, None) => (None, None),
    };
    Ok(AnnulusReport {
        r1,
        r0,
        budget,
        radial,
        half_ring_reference: half_annulus_lambda1(r1, r0)?,
        runs,
        failed_seeds,
        best_nonradial,
        winner,
        gap,
    })
}
