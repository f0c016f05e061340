use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::config::OptimizeConfig;
use super::gradients::{design_coefs, eigen_shape_gradient, perimeter_shape_gradient};
use super::symmetry::{symmetry_metrics, SymmetryMetrics};
use crate::error::{Error, Result};
use crate::geometry::{
    default_eps_schedule, outer_minkowski_content, point, Domain, FourierStar, Obstacle,
    StarObstacle,
};
use crate::spectral::{
    assemble_with, free_boundary_gradient_sq, lagrange_multiplier, smallest_eigenpair_with,
    EigenOptions, EigenResult, WarmStart,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Stall criterion met, or the line search failed at a point whose
    /// projected gradient is small.
    Converged,
    /// max_iters reached, or the line search failed away from stationarity.
    Stalled,
    /// The line search kept leaving Ω̄.
    Touching,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub iter: usize,
    pub lambda1: f64,
    pub perimeter: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certification {
    /// Grid Minkowski estimate of SM¹ for the final obstacle.
    pub content: f64,
    /// |content − perimeter| / perimeter.
    pub relative_gap: f64,
    /// Rellich-identity multiplier, free obstacles only.
    pub mu_rellich: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstacleResult {
    pub obstacle: StarObstacle,
    pub lambda1: f64,
    pub perimeter: f64,
    pub mu: f64,
    pub optimality_residual: f64,
    pub symmetry: SymmetryMetrics,
    /// Distance from the star center to the center of Ω.
    pub center_offset: f64,
    /// Smallest distance from ∂K to the outer boundary.
    pub clearance: f64,
    pub status: RunStatus,
    pub iterations: usize,
    pub history: Vec<HistoryEntry>,
    pub certification: Option<Certification>,
    pub seed: usize,
    #[serde(skip)]
    pub eigen: EigenResult,
}

/// Projected-gradient norm, relative to the eigen gradient, below which a
/// failed line search counts as convergence.
const STATIONARY: f64 = 0.05;

enum Admissible {
    Yes,
    Escape,
    No(String),
}

fn outer_clearance(domain: &Domain, star: &FourierStar) -> f64 {
    star.polyline(star.sample_count())
        .iter()
        .map(|p| -domain.outer.signed_distance(p))
        .fold(f64::INFINITY, f64::min)
}

fn admissible(domain: &Domain, k: &StarObstacle, h: f64) -> Admissible {
    if let Err(e) = k.validate() {
        return Admissible::No(e.to_string());
    }
    if outer_clearance(domain, &k.star) < 3.0 * h {
        return Admissible::Escape;
    }
    for hole in &k.cutouts {
        match k.junctions_with(hole).len() {
            0 => {
                if !k.star.contains(&hole.center()) {
                    return Admissible::No("star swallowed by a hole".into());
                }
            }
            2 => {}
            n => return Admissible::No(format!("{n} junctions with one hole")),
        }
    }
    Admissible::Yes
}

/// Scales the radial profile about the star center until the perimeter of
/// the glued obstacle equals `budget`.
pub fn project_to_budget(
    star: &FourierStar,
    domain: &Domain,
    budget: f64,
    tol: f64,
) -> Result<StarObstacle> {
    star.validate()?;
    let make = |s: f64| StarObstacle::in_domain(star.scaled(s), domain);
    if domain.holes.is_empty() {
        return Ok(make(budget / star.perimeter()));
    }
    let f = |s: f64| make(s).perimeter() - budget;
    let (mut lo, mut hi) = (1.0, 1.0);
    let (mut flo, mut fhi) = (f(1.0), f(1.0));
    let mut tries = 0;
    while flo > 0.0 || fhi < 0.0 {
        tries += 1;
        if tries > 80 {
            return Err(Error::Bracketing("perimeter scale factor".into()));
        }
        if flo > 0.0 {
            hi = lo;
            fhi = flo;
            lo /= 1.25;
            flo = f(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi *= 1.25;
            fhi = f(hi);
        }
    }
    // Illinois false position.
    let mut side = 0i8;
    for _ in 0..200 {
        let s = (lo * fhi - hi * flo) / (fhi - flo);
        let fs = f(s);
        if fs.abs() <= tol || (hi - lo) <= 1e-15 * hi {
            return Ok(make(s));
        }
        if fs < 0.0 {
            lo = s;
            flo = fs;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            fhi = fs;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Bracketing("perimeter scale factor did not converge".into()))
}

struct Runner<'a> {
    domain: &'a Domain,
    config: &'a OptimizeConfig,
    options: EigenOptions,
}

impl Runner<'_> {
    fn solve(&self, k: &StarObstacle, warm: Option<&EigenResult>) -> Result<EigenResult> {
        let obstacle = Obstacle::Star(k.clone());
        let problem =
            assemble_with(self.domain, Some(&obstacle), self.config.h, self.config.treatment)?;
        let warm = warm.map(|e| WarmStart {
            field: &e.u1,
            lambda: e.lambda1,
        });
        smallest_eigenpair_with(&problem, &self.options, warm)
    }

    fn project(&self, star: &FourierStar) -> Result<StarObstacle> {
        project_to_budget(
            star,
            self.domain,
            self.config.budget,
            self.config.tolerances.constraint_tol,
        )
    }
}

/// One projected-ascent run from `seed`.
pub fn maximize_from(domain: &Domain, config: &OptimizeConfig, seed: &FourierStar) -> Result<ObstacleResult> {
    config.validate(domain)?;
    let runner = Runner {
        domain,
        config,
        options: EigenOptions {
            tol: config.tolerances.eigen_tol,
            solver: config.solver,
            ..EigenOptions::default()
        },
    };
    let h = config.h;
    let coefs = design_coefs(config.k_max, config.allow_center_motion);
    let mut k = runner.project(&seed.with_order(config.k_max))?;
    match admissible(domain, &k, h) {
        Admissible::Yes => {}
        Admissible::Escape => {
            return Err(Error::Precondition(
                "seed is not admissible: it comes within 3h of the outer boundary".into(),
            ))
        }
        Admissible::No(why) => {
            return Err(Error::Precondition(format!("seed is not admissible: {why}")))
        }
    }
    let mut eig = runner.solve(&k, None)?;
    let mut history = vec![HistoryEntry {
        iter: 0,
        lambda1: eig.lambda1,
        perimeter: k.perimeter(),
        step: 0.0,
    }];
    let min_step = 1e-3 * h;
    let mut step = config.step0;
    let mut stalls = 0;
    let mut status = RunStatus::Stalled;
    let mut iterations = 0;

    for iter in 1..=config.max_iters {
        let gl = eigen_shape_gradient(domain, &k, &eig, &coefs, config.n_samples)?;
        let gp = perimeter_shape_gradient(&k, &coefs)?;
        let proj = gl.dot(&gp) / gp.dot(&gp);
        let dir: Vec<f64> = gl.values.iter().zip(&gp.values).map(|(a, b)| a - proj * b).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12 * gl.norm()) {
            status = RunStatus::Converged;
            break;
        }

        let mut accepted = None;
        let mut escapes = 0;
        let mut s = step;
        for _ in 0..=20 {
            if s < min_step {
                break;
            }
            let mut star = k.star.clone();
            for (c, d) in coefs.iter().zip(&dir) {
                star.set(*c, star.get(*c) + s * d / norm);
            }
            let candidate = match runner.project(&star) {
                Ok(c) => c,
                Err(e) => {
                    log::trace!("step {s:.3e}: projection failed: {e}");
                    s *= 0.5;
                    continue;
                }
            };
            match admissible(domain, &candidate, h) {
                Admissible::Yes => {}
                Admissible::Escape => {
                    escapes += 1;
                    s *= 0.5;
                    continue;
                }
                Admissible::No(why) => {
                    log::trace!("step {s:.3e}: inadmissible: {why}");
                    s *= 0.5;
                    continue;
                }
            }
            match runner.solve(&candidate, Some(&eig)) {
                Ok(e) if e.lambda1 > eig.lambda1 => {
                    accepted = Some((candidate, e));
                    break;
                }
                Ok(e) => {
                    log::trace!("step {s:.3e}: λ₁ {:.10} does not improve {:.10}", e.lambda1, eig.lambda1);
                    s *= 0.5;
                }
                Err(e) => {
                    log::trace!("step {s:.3e}: eigen solve failed: {e}");
                    s *= 0.5;
                }
            }
        }

        let Some((candidate, e)) = accepted else {
            status = if escapes > 0 {
                RunStatus::Touching
            } else if norm <= STATIONARY * gl.norm() {
                RunStatus::Converged
            } else {
                RunStatus::Stalled
            };
            if escapes > 0 {
                log::warn!("boundary contact — touching regime (iteration {iter})");
            }
            break;
        };
        let gain = (e.lambda1 - eig.lambda1) / eig.lambda1;
        k = candidate;
        eig = e;
        iterations = iter;
        history.push(HistoryEntry {
            iter,
            lambda1: eig.lambda1,
            perimeter: k.perimeter(),
            step: s,
        });
        log::debug!("iter {iter}: λ₁ = {:.8}, step = {s:.3e}", eig.lambda1);
        stalls = if gain < config.tolerances.stall_tol { stalls + 1 } else { 0 };
        if stalls >= 5 {
            status = RunStatus::Converged;
            break;
        }
        step = (2.0 * s).min(4.0 * config.step0);
    }

    finish(domain, config, k, eig, history, status, iterations)
}

fn finish(
    domain: &Domain,
    config: &OptimizeConfig,
    k: StarObstacle,
    eig: EigenResult,
    history: Vec<HistoryEntry>,
    status: RunStatus,
    iterations: usize,
) -> Result<ObstacleResult> {
    let (mu, optimality_residual) = optimality(domain, &k, &eig, config.n_samples)?;
    let perimeter = k.perimeter();
    let certification = if config.certify {
        let obstacle = Obstacle::Star(k.clone());
        let schedule = default_eps_schedule(&obstacle, config.h)?;
        let est = outer_minkowski_content(&obstacle, config.h, &schedule)?;
        let mu_rellich = if k.cutouts.is_empty() {
            Some(lagrange_multiplier(&eig, domain, &obstacle, &est, config.n_samples.max(256))?)
        } else {
            None
        };
        Some(Certification {
            content: est.content,
            relative_gap: (est.content - perimeter).abs() / perimeter,
            mu_rellich,
        })
    } else {
        None
    };
    Ok(ObstacleResult {
        symmetry: symmetry_metrics(&k.star),
        center_offset: (k.star.center - domain.center()).norm(),
        clearance: outer_clearance(domain, &k.star),
        lambda1: eig.lambda1,
        perimeter,
        mu,
        optimality_residual,
        status,
        iterations,
        history,
        certification,
        seed: 0,
        obstacle: k,
        eigen: eig,
    })
}

/// Least-squares μ for |∇u₁|² ≈ μC on the free boundary and the
/// sup-relative misfit, from at least 64 free samples.
pub fn optimality(
    domain: &Domain,
    k: &StarObstacle,
    eig: &EigenResult,
    n_samples: usize,
) -> Result<(f64, f64)> {
    let mut n = n_samples.max(64);
    loop {
        let thetas: Vec<f64> = FourierStar::thetas(n).collect();
        let g = free_boundary_gradient_sq(eig, domain, k, &thetas)?;
        let mut gs = Vec::new();
        let mut cs = Vec::new();
        for (&t, g) in thetas.iter().zip(&g) {
            if let Some(g) = g {
                gs.push(*g);
                cs.push(k.star.curvature(t)?);
            }
        }
        if gs.len() >= 64 {
            return crate::spectral::fit_multiplier(&gs, &cs);
        }
        if n >= 8192 {
            return Err(Error::Precondition(format!(
                "only {} free boundary samples available",
                gs.len()
            )));
        }
        n *= 2;
    }
}

/// Concentric circle, two off-center circles and two mode-2 shapes. Offsets
/// and mode amplitudes are 30% of the gap left between the concentric
/// circle and the outer boundary, counting the perimeter of holes the
/// circle would enclose.
pub fn default_seeds(domain: &Domain, budget: f64) -> Vec<FourierStar> {
    let c = domain.center();
    let inradius = -domain.outer.signed_distance(&c);
    let mut r = budget / (2.0 * PI);
    let enclosed: f64 = domain
        .holes
        .iter()
        .filter(|h| (h.center() - c).norm() < r)
        .map(|h| h.perimeter())
        .sum();
    r = (budget - enclosed) / (2.0 * PI);
    if !(r > 0.0 && r < inradius) {
        r = 0.9 * inradius;
    }
    let d = 0.3 * (inradius - r);
    let mode2 = |a2: f64, b2: f64, offset| FourierStar::new(c + offset, r, vec![0.0, a2], vec![0.0, b2]);
    vec![
        FourierStar::circle(c, r),
        FourierStar::circle(c + point(d, 0.0), r),
        FourierStar::circle(c + point(-0.6 * d, 0.8 * d), r),
        mode2(d, 0.0, point(0.0, 0.5 * d)),
        mode2(0.0, d, point(-0.5 * d, 0.0)),
    ]
}

/// Runs every seed and returns all outcomes in seed order.
pub fn maximize_runs(domain: &Domain, config: &OptimizeConfig) -> Result<Vec<Result<ObstacleResult>>> {
    config.validate(domain)?;
    let seeds = match (&config.seeds, &config.init) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => vec![s.clone()],
        (None, None) => default_seeds(domain, config.budget),
    };
    Ok(seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            maximize_from(domain, config, s).map(|mut r| {
                r.seed = i;
                r
            })
        })
        .collect())
}

/// The best λ₁ over all seeds.
pub fn maximize(domain: &Domain, config: &OptimizeConfig) -> Result<ObstacleResult> {
    let mut best: Option<ObstacleResult> = None;
    let mut last_err = None;
    for run in maximize_runs(domain, config)? {
        match run {
            Ok(r) => {
                if best.as_ref().map_or(true, |b| r.lambda1 > b.lambda1) {
                    best = Some(r);
                }
            }
            Err(e) => {
                log::warn!("seed failed: {e}");
                last_err = Some(e);
            }
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Precondition("no seeds".into())))
}
