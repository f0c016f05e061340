use serde::{Deserialize, Serialize};

use super::eigen::EigenResult;
use crate::error::{Error, Result};
use crate::geometry::{Domain, MinkowskiEstimate, Obstacle, Point, ScalarField, StarObstacle};

/// Squared normal derivative of u at a boundary point where u = 0, from
/// bilinear samples at distances 2h and 3h along `normal`:
/// u′(0) ≈ (9u(2h) − 4u(3h)) / (6h), exact for quadratics through u(0) = 0.
/// `None` when the stencil leaves the lattice.
pub fn normal_derivative_sq(u: &ScalarField, x: &Point, normal: &Point) -> Option<f64> {
    let h = u.h();
    let u2 = u.bilinear(&(x + normal * (2.0 * h)))?;
    let u3 = u.bilinear(&(x + normal * (3.0 * h)))?;
    let d = (9.0 * u2 - 4.0 * u3) / (6.0 * h);
    Some(d * d)
}

fn star_of(obstacle: &Obstacle) -> Result<&StarObstacle> {
    match obstacle {
        Obstacle::Star(s) => Ok(s),
        _ => Err(Error::Precondition("a Fourier obstacle is required".into())),
    }
}

/// |∇u₁|² at the obstacle boundary points x(θ), estimated along the outward
/// normal of K.
pub fn boundary_gradient_sq(
    result: &EigenResult,
    domain: &Domain,
    obstacle: &Obstacle,
    thetas: &[f64],
) -> Result<Vec<f64>> {
    let star = &star_of(obstacle)?.star;
    let h = result.h;
    thetas
        .iter()
        .map(|&t| {
            let x = star.point(t);
            let dist = domain.boundary_distance(&x);
            if dist < 3.0 * h || !domain.contains(&x) {
                return Err(Error::InsufficientClearance {
                    x: x.x,
                    y: x.y,
                    distance: dist,
                    required: 3.0 * h,
                });
            }
            normal_derivative_sq(&result.u1, &x, &star.normal(t)).ok_or(Error::InsufficientClearance {
                x: x.x,
                y: x.y,
                distance: dist,
                required: 3.0 * h,
            })
        })
        .collect()
}

/// Like [`boundary_gradient_sq`] for a star that may be glued to holes:
/// glued points and points within 3h of a hole give `None`; points within
/// 3h of the outer boundary are an error.
pub fn free_boundary_gradient_sq(
    result: &EigenResult,
    domain: &Domain,
    obstacle: &StarObstacle,
    thetas: &[f64],
) -> Result<Vec<Option<f64>>> {
    let h = result.h;
    let star = &obstacle.star;
    thetas
        .iter()
        .map(|&t| {
            let x = star.point(t);
            let outer = -domain.outer.signed_distance(&x);
            if outer < 3.0 * h {
                return Err(Error::InsufficientClearance {
                    x: x.x,
                    y: x.y,
                    distance: outer,
                    required: 3.0 * h,
                });
            }
            let near_hole = domain.holes.iter().any(|hole| hole.signed_distance(&x) < 3.0 * h);
            if near_hole || !obstacle.is_free(t) {
                return Ok(None);
            }
            Ok(normal_derivative_sq(&result.u1, &x, &star.normal(t)))
        })
        .collect()
}

/// One-sided squared derivatives on either side of a chain point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainJump {
    /// |∂u/∂ν|² on the side `normal` points to.
    pub plus: f64,
    pub minus: f64,
}

impl ChainJump {
    /// |∇u⁺|² − |∇u⁻|².
    pub fn jump(&self) -> f64 {
        self.plus - self.minus
    }
}

/// Two-sided estimator across a chain obstacle at `x` with unit normal
/// `normal`.
pub fn chain_gradient_jump(result: &EigenResult, x: &Point, normal: &Point) -> Option<ChainJump> {
    Some(ChainJump {
        plus: normal_derivative_sq(&result.u1, x, normal)?,
        minus: normal_derivative_sq(&result.u1, x, &(-normal))?,
    })
}

/// Least-squares μ for |∇u|² ≈ μC and the sup-relative misfit
/// max |1 − |∇u|²/(μC)|.
pub fn fit_multiplier(grad_sq: &[f64], curvature: &[f64]) -> Result<(f64, f64)> {
    if grad_sq.len() != curvature.len() || grad_sq.is_empty() {
        return Err(Error::Precondition("need matching non-empty samples".into()));
    }
    let num: f64 = grad_sq.iter().zip(curvature).map(|(g, c)| g * c).sum();
    let den: f64 = curvature.iter().map(|c| c * c).sum();
    if den <= 0.0 {
        return Err(Error::Precondition("curvature samples vanish".into()));
    }
    let mu = num / den;
    let misfit = grad_sq
        .iter()
        .zip(curvature)
        .map(|(g, c)| (1.0 - g / (mu * c)).abs())
        .fold(0.0, f64::max);
    Ok((mu, misfit))
}

/// μ = ∮ (∂u/∂n)² X·n dσ / SM¹(K), with X measured from the center of Ω
/// and n the outward normal of K; trapezoid rule over `n_samples` angles
/// on the free part of ∂K.
pub fn lagrange_multiplier(
    result: &EigenResult,
    domain: &Domain,
    obstacle: &Obstacle,
    content: &MinkowskiEstimate,
    n_samples: usize,
) -> Result<f64> {
    if !(content.content > 0.0) {
        return Err(Error::Precondition(format!(
            "Minkowski content must be positive, got {}",
            content.content
        )));
    }
    let star_obstacle = star_of(obstacle)?;
    let star = &star_obstacle.star;
    let thetas: Vec<f64> = crate::geometry::FourierStar::thetas(n_samples).collect();
    let g = free_boundary_gradient_sq(result, domain, star_obstacle, &thetas)?;
    let center = domain.center();
    let dtheta = 2.0 * std::f64::consts::PI / n_samples as f64;
    let integral: f64 = thetas
        .iter()
        .zip(&g)
        .filter_map(|(&t, g)| {
            let g = (*g)?;
            let x = star.point(t) - center;
            Some(g * x.dot(&star.normal(t)) * star.speed(t) * dtheta)
        })
        .sum();
    Ok(integral / content.content)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point, FourierStar, Grid};

    #[test]
    fn one_sided_formula_is_exact_for_quadratics() {
        let g = Grid::new(point(-1.0, -1.0), 0.01, 201, 201).unwrap();
        // u = 2s − 3s² with s = x − 0.2 (zero on the line x = 0.2).
        let u = ScalarField::from_fn(g, |p| {
            let s = p.x - 0.2;
            2.0 * s - 3.0 * s * s
        });
        let d = normal_derivative_sq(&u, &point(0.2, 0.1), &point(1.0, 0.0)).unwrap();
        assert!((d - 4.0).abs() < 1e-9);
    }

    #[test]
    fn fit_multiplier_recovers_exact_relation() {
        let c = [1.0, 2.0, 0.5];
        let g: Vec<f64> = c.iter().map(|c| 3.0 * c).collect();
        let (mu, misfit) = fit_multiplier(&g, &c).unwrap();
        assert!((mu - 3.0).abs() < 1e-14 && misfit < 1e-14);
        assert!(fit_multiplier(&[], &[]).is_err());
    }

    #[test]
    fn non_fourier_obstacle_is_rejected() {
        let g = Grid::new(point(-1.0, -1.0), 0.1, 21, 21).unwrap();
        let r = EigenResult {
            lambda1: 1.0,
            u1: ScalarField::from_fn(g, |_| 0.0),
            residual: 0.0,
            iterations: 1,
            h: 0.1,
            n_interior: 1,
            component: 0,
            n_components: 1,
            shift: 0.0,
        };
        let d = Domain::disk(point(0.0, 0.0), 1.0).unwrap();
        assert!(boundary_gradient_sq(&r, &d, &Obstacle::disk(point(0.0, 0.0), 0.5), &[0.0]).is_err());
        let near = Obstacle::star(FourierStar::circle(point(0.0, 0.0), 0.95));
        assert!(matches!(
            boundary_gradient_sq(&r, &d, &near, &[0.0]),
            Err(Error::InsufficientClearance { .. })
        ));
    }
}
