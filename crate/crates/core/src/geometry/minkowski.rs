use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::distance::distance_on_grid;
use super::field::{Grid, ScalarField};
use super::obstacle::Obstacle;
use crate::error::{Error, Result};

/// Constant C in the grid tolerance C·h/ε for the monotonicity check,
/// calibrated on disks (see the `calibrate_tol_grid_on_disks` test).
pub const TOL_GRID_CONSTANT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSample {
    pub eps: f64,
    /// L(K^ε \ K).
    pub area: f64,
    /// g(ε) = area/ε − πε.
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiEstimate {
    pub content: f64,
    pub eps_samples: Vec<EpsSample>,
    pub grid_h: f64,
}

/// A pair ε < δ on the schedule with g(δ) > g(ε) + C·h/ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityViolation {
    pub eps: f64,
    pub delta: f64,
    pub excess: f64,
}

impl MinkowskiEstimate {
    /// Pairs violating non-increase of g beyond the grid tolerance.
    pub fn monotonicity_violations(&self, c: f64) -> Vec<MonotonicityViolation> {
        let mut out = Vec::new();
        for small in &self.eps_samples {
            for large in &self.eps_samples {
                if small.eps < large.eps {
                    let tol = c * self.grid_h / small.eps;
                    let excess = large.quotient - small.quotient - tol;
                    if excess > 0.0 {
                        out.push(MonotonicityViolation {
                            eps: small.eps,
                            delta: large.eps,
                            excess,
                        });
                    }
                }
            }
        }
        out
    }

    /// CSV with header `eps,area,quotient`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.eps_samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Area of {x ∈ T : f(x) ≤ eps} for the linear interpolant f on a triangle
/// of area `area` with vertex values `v`.
fn triangle_sublevel_area(mut v: [f64; 3], eps: f64, area: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let [a, b, c] = v;
    if eps <= a {
        0.0
    } else if eps >= c {
        area
    } else if eps <= b {
        area * (eps - a) * (eps - a) / ((b - a) * (c - a))
    } else {
        area * (1.0 - (c - eps) * (c - eps) / ((c - a) * (c - b)))
    }
}

/// L({0 < d(·,K) ≤ ε}) from a distance field: the piecewise-linear
/// sublevel area of the field (two triangles per cell) minus L(K).
pub fn dilation_area(field: &ScalarField, obstacle: &Obstacle, eps: f64) -> Result<f64> {
    let g = &field.grid;
    if eps < 2.0 * g.h {
        return Err(Error::EpsUnderResolved { eps, min: 2.0 * g.h });
    }
    let border_ok = (0..g.nx).all(|i| field.at(i, 0) > eps && field.at(i, g.ny - 1) > eps)
        && (0..g.ny).all(|j| field.at(0, j) > eps && field.at(g.nx - 1, j) > eps);
    if !border_ok {
        return Err(Error::BoxTooSmall { margin: eps });
    }
    let half = 0.5 * g.h * g.h;
    let mut total = 0.0;
    for j in 0..g.ny - 1 {
        let mut row = 0.0;
        for i in 0..g.nx - 1 {
            let v00 = field.at(i, j);
            let v10 = field.at(i + 1, j);
            let v01 = field.at(i, j + 1);
            let v11 = field.at(i + 1, j + 1);
            let lo = v00.min(v10).min(v01).min(v11);
            if lo >= eps {
                continue;
            }
            let hi = v00.max(v10).max(v01).max(v11);
            if hi <= eps {
                row += 2.0 * half;
                continue;
            }
            row += triangle_sublevel_area([v00, v10, v11], eps, half);
            row += triangle_sublevel_area([v00, v11, v01], eps, half);
        }
        total += row;
    }
    Ok(total - obstacle.area())
}

/// Geometric schedule ε₀, ε₀·ratio, ... down to `floor` (inclusive).
pub fn eps_schedule(eps0: f64, ratio: f64, floor: f64) -> Result<Vec<f64>> {
    if !(eps0 > 0.0 && ratio > 0.0 && ratio < 1.0 && floor > 0.0) {
        return Err(Error::Precondition(format!(
            "schedule needs eps0 > 0, 0 < ratio < 1, floor > 0 (got {eps0}, {ratio}, {floor})"
        )));
    }
    let mut out = Vec::new();
    let mut e = eps0;
    while e >= floor * (1.0 - 1e-12) {
        out.push(e);
        e *= ratio;
    }
    if out.is_empty() {
        return Err(Error::EpsUnderResolved { eps: eps0, min: floor });
    }
    Ok(out)
}

/// ε₀ = diam(K)/4 halved down to 2h; a point obstacle uses ε₀ = 64h.
pub fn default_eps_schedule(obstacle: &Obstacle, h: f64) -> Result<Vec<f64>> {
    let diam = obstacle.diameter();
    let eps0 = if diam > 0.0 { diam / 4.0 } else { 64.0 * h };
    eps_schedule(eps0.max(2.0 * h), 0.5, 2.0 * h)
}

/// sup over the schedule of L(K^ε \ K)/ε − πε.
pub fn outer_minkowski_content(
    obstacle: &Obstacle,
    h: f64,
    eps_schedule: &[f64],
) -> Result<MinkowskiEstimate> {
    if eps_schedule.is_empty() {
        return Err(Error::Precondition("empty eps schedule".into()));
    }
    if eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("eps schedule must be strictly descending".into()));
    }
    let smallest = *eps_schedule.last().unwrap();
    if smallest < 2.0 * h {
        return Err(Error::EpsUnderResolved { eps: smallest, min: 2.0 * h });
    }
    obstacle.validate()?;
    let bbox = obstacle.bbox().expand(eps_schedule[0] + 3.0 * h);
    let field = distance_on_grid(obstacle, Grid::covering(&bbox, h)?);
    let mut samples = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let area = dilation_area(&field, obstacle, eps)?;
        samples.push(EpsSample {
            eps,
            area,
            quotient: area / eps - PI * eps,
        });
    }
    let content = samples
        .iter()
        .map(|s| s.quotient)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MinkowskiEstimate {
        content,
        eps_samples: samples,
        grid_h: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::obstacle::AnnulusRegion;
    use crate::geometry::shapes::point;
    use approx::assert_relative_eq;

    fn content(o: &Obstacle, h: f64) -> MinkowskiEstimate {
        let s = default_eps_schedule(o, h).unwrap();
        outer_minkowski_content(o, h, &s).unwrap()
    }

    #[test]
    fn triangle_sublevel_area_is_linear_in_the_middle() {
        // f = x on the triangle (0,0),(1,0),(0,1): area {x ≤ t} = (1 - (1-t)²)/2.
        let a = triangle_sublevel_area([0.0, 1.0, 0.0], 0.3, 0.5);
        assert_relative_eq!(a, 0.5 * (1.0 - 0.49), epsilon = 1e-14);
    }

    #[test]
    fn spec_dilation_examples() {
        let h = 0.01;
        let disk = Obstacle::disk(point(0.0, 0.0), 1.0);
        let f = distance_on_grid(&disk, Grid::covering(&disk.bbox().expand(0.6), h).unwrap());
        let a = dilation_area(&f, &disk, 0.5).unwrap();
        assert_relative_eq!(a, PI * (1.5f64.powi(2) - 1.0), max_relative = 1e-3);
        let seg = Obstacle::segment(point(0.0, 0.0), point(1.0, 0.0));
        let f = distance_on_grid(&seg, Grid::covering(&seg.bbox().expand(0.4), h).unwrap());
        let a = dilation_area(&f, &seg, 0.25).unwrap();
        assert_relative_eq!(a, 2.0 * 0.25 + PI * 0.0625, max_relative = 1e-3);
        let pt = Obstacle::point(point(0.0, 0.0));
        let f = distance_on_grid(&pt, Grid::covering(&pt.bbox().expand(0.4), h).unwrap());
        let a = dilation_area(&f, &pt, 0.25).unwrap();
        assert_relative_eq!(a, PI * 0.0625, max_relative = 2e-3);
        assert!(matches!(dilation_area(&f, &pt, 0.015), Err(Error::EpsUnderResolved { .. })));
        assert!(matches!(dilation_area(&f, &pt, 0.45), Err(Error::BoxTooSmall { .. })));
    }

    #[test]
    fn spec_content_examples() {
        let r = 0.7;
        let h = r / 64.0;
        let disk = content(&Obstacle::disk(point(0.1, -0.2), r), h);
        assert!((disk.content - 2.0 * PI * r).abs() <= 5.0 * h);
        let seg = content(&Obstacle::segment(point(0.0, 0.0), point(1.0, 0.0)), 1.0 / 128.0);
        assert_relative_eq!(seg.content, 2.0, max_relative = 0.01);
        let ann = Obstacle::Annulus(AnnulusRegion {
            center: point(0.0, 0.0),
            inner: 1.0,
            outer: 1.3,
        });
        let est = content(&ann, 1.0 / 128.0);
        assert_relative_eq!(est.content, 2.0 * PI * 2.3, max_relative = 0.01);
        // The content is the maximum of the retained samples.
        let m = est.eps_samples.iter().map(|s| s.quotient).fold(f64::MIN, f64::max);
        assert_eq!(m, est.content);
        assert!(est.eps_samples.iter().all(|s| s.eps >= 2.0 * est.grid_h));
    }

    #[test]
    fn schedule_validation() {
        let o = Obstacle::disk(point(0.0, 0.0), 1.0);
        assert!(outer_minkowski_content(&o, 0.1, &[]).is_err());
        assert!(outer_minkowski_content(&o, 0.1, &[0.2, 0.4]).is_err());
        assert!(matches!(
            outer_minkowski_content(&o, 0.1, &[0.5, 0.1]),
            Err(Error::EpsUnderResolved { .. })
        ));
        let s = eps_schedule(1.0, 0.5, 0.1).unwrap();
        assert_eq!(s, vec![1.0, 0.5, 0.25, 0.125]);
    }

    /// Records the worst normalized monotonicity defect on disks; the
    /// constant must dominate it.
    #[test]
    fn calibrate_tol_grid_on_disks() {
        let mut worst: f64 = 0.0;
        for (r, n) in [(1.0, 50.0), (0.5, 64.0), (2.0, 100.0), (1.3, 80.0)] {
            let h = r / n;
            let est = content(&Obstacle::disk(point(0.013, -0.021), r), h);
            for s in &est.eps_samples {
                for l in &est.eps_samples {
                    if s.eps < l.eps {
                        worst = worst.max((l.quotient - s.quotient) * s.eps / h);
                    }
                }
            }
        }
        assert!(worst < TOL_GRID_CONSTANT, "worst normalized defect {worst}");
    }
}
