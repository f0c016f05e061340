use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FourierStar, Point};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryMetrics {
    /// ‖r − a₀‖∞ / a₀.
    pub radial_deviation: f64,
    /// Axis angle φ ∈ [0, π) minimizing ‖r(θ) − r(2φ − θ)‖∞.
    pub best_axis_angle: f64,
    /// That minimum over a₀.
    pub axial_deviation: f64,
}

const SAMPLES: usize = 512;
const COARSE_AXES: usize = 360;

fn axis_defect(star: &FourierStar, thetas: &[f64], radii: &[f64], phi: f64) -> f64 {
    thetas
        .iter()
        .zip(radii)
        .map(|(&t, &r)| (r - star.radius(2.0 * phi - t)).abs())
        .fold(0.0, f64::max)
}

pub fn symmetry_metrics(star: &FourierStar) -> SymmetryMetrics {
    let thetas: Vec<f64> = FourierStar::thetas(SAMPLES).collect();
    let radii: Vec<f64> = thetas.iter().map(|&t| star.radius(t)).collect();
    let radial = radii.iter().map(|r| (r - star.a0).abs()).fold(0.0, f64::max);

    let f = |phi: f64| axis_defect(star, &thetas, &radii, phi);
    let step = PI / COARSE_AXES as f64;
    let (mut best_phi, mut best) = (0.0, f64::INFINITY);
    for i in 0..COARSE_AXES {
        let phi = i as f64 * step;
        let d = f(phi);
        if d < best {
            best = d;
            best_phi = phi;
        }
    }
    // Golden-section refinement inside the neighbouring coarse cells.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (best_phi - step, best_phi + step);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (phi, val) = if fc < fd { (c, fc) } else { (d, fd) };
    if val < best {
        best = val;
        best_phi = phi;
    }
    SymmetryMetrics {
        radial_deviation: radial / star.a0,
        best_axis_angle: best_phi.rem_euclid(PI),
        axial_deviation: best / star.a0,
    }
}

/// Algebraic (Kåsa) circle fit. Returns center, radius and the largest
/// |distance − radius| over the points.
pub fn circle_fit(points: &[Point]) -> Result<(Point, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Precondition("circle fit needs at least 3 points".into()));
    }
    // Minimize Σ (x² + y² + Dx + Ey + F)² via the 3×3 normal equations.
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for p in points {
        let row = nalgebra::Vector3::new(p.x, p.y, 1.0);
        let z = -(p.x * p.x + p.y * p.y);
        m += row * row.transpose();
        rhs += row * z;
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Precondition("collinear points".into()))?;
    let center = Point::new(-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = center.norm_squared() - sol[2];
    if !(r2 > 0.0) {
        return Err(Error::Precondition("degenerate circle fit".into()));
    }
    let r = r2.sqrt();
    let misfit = points
        .iter()
        .map(|p| ((p - center).norm() - r).abs())
        .fold(0.0, f64::max);
    Ok((center, r, misfit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_is_fully_symmetric() {
        let m = symmetry_metrics(&FourierStar::circle(point(0.3, 0.0), 0.8));
        assert_abs_diff_eq!(m.radial_deviation, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.axial_deviation, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cosine_mode_has_horizontal_axis() {
        let s = FourierStar::new(point(0.0, 0.0), 1.0, vec![0.2], vec![0.0]);
        let m = symmetry_metrics(&s);
        assert_abs_diff_eq!(m.radial_deviation, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(m.axial_deviation, 0.0, epsilon = 1e-12);
        assert!(m.best_axis_angle.min(PI - m.best_axis_angle) < 1e-6);
    }

    #[test]
    fn mixed_modes_match_dense_scan() {
        let s = FourierStar::new(point(0.0, 0.0), 1.0, vec![0.1, 0.0], vec![0.0, 0.1]);
        let m = symmetry_metrics(&s);
        let thetas: Vec<f64> = FourierStar::thetas(SAMPLES).collect();
        let radii: Vec<f64> = thetas.iter().map(|&t| s.radius(t)).collect();
        let brute = (0..720)
            .map(|i| axis_defect(&s, &thetas, &radii, i as f64 * PI / 720.0))
            .fold(f64::INFINITY, f64::min);
        assert!(m.axial_deviation <= brute + 1e-12, "{} vs {}", m.axial_deviation, brute);
        assert!(m.axial_deviation > 0.01);
    }

    #[test]
    fn circle_fit_recovers_arc() {
        let pts: Vec<Point> = (0..20)
            .map(|i| {
                let t = 0.1 * i as f64;
                point(1.0 + 2.0 * t.cos(), -0.5 + 2.0 * t.sin())
            })
            .collect();
        let (c, r, misfit) = circle_fit(&pts).unwrap();
        assert!((c - point(1.0, -0.5)).norm() < 1e-10);
        assert!((r - 2.0).abs() < 1e-10 && misfit < 1e-10);
    }
}
