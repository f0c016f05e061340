use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Coef, Domain, FourierStar, StarObstacle};
use crate::spectral::{free_boundary_gradient_sq, EigenResult};

/// Residual above which an eigenpair is treated as not converged.
const MAX_EIGEN_RESIDUAL: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeGradient {
    pub coefs: Vec<Coef>,
    pub values: Vec<f64>,
}

impl ShapeGradient {
    pub fn get(&self, c: Coef) -> Option<f64> {
        self.coefs.iter().position(|x| *x == c).map(|i| self.values[i])
    }

    pub fn dot(&self, other: &ShapeGradient) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Coefficients the optimizer moves. Order-1 modes duplicate a translation
/// to first order, so they are dropped when the center moves.
pub fn design_coefs(k_max: usize, allow_center_motion: bool) -> Vec<Coef> {
    let mut v = Vec::new();
    if allow_center_motion {
        v.push(Coef::CenterX);
        v.push(Coef::CenterY);
    }
    v.push(Coef::A0);
    let first = if allow_center_motion { 2 } else { 1 };
    for k in first..=k_max {
        v.push(Coef::Cos(k));
        v.push(Coef::Sin(k));
    }
    v
}

/// dλ₁/dc = ∮_{Γfree} |∇u₁|² (V_c·n) dσ for each coefficient, by the
/// trapezoid rule over `n_samples` angles. Positive when growing K along
/// V_c raises λ₁.
pub fn eigen_shape_gradient(
    domain: &Domain,
    obstacle: &StarObstacle,
    eigen: &EigenResult,
    coefs: &[Coef],
    n_samples: usize,
) -> Result<ShapeGradient> {
    if !(eigen.residual <= MAX_EIGEN_RESIDUAL) {
        return Err(Error::Precondition(format!(
            "eigenpair not converged (residual {:e})",
            eigen.residual
        )));
    }
    let n = n_samples.max(256);
    let thetas: Vec<f64> = FourierStar::thetas(n).collect();
    let g = free_boundary_gradient_sq(eigen, domain, obstacle, &thetas)?;
    let w = 2.0 * std::f64::consts::PI / n as f64;
    let values = coefs
        .iter()
        .map(|&c| {
            thetas
                .iter()
                .zip(&g)
                .map(|(&t, g)| g.unwrap_or(0.0) * obstacle.star.normal_weight(c, t))
                .sum::<f64>()
                * w
        })
        .collect();
    Ok(ShapeGradient {
        coefs: coefs.to_vec(),
        values,
    })
}

/// dP/dc = ∮ C (V_c·n) dσ for a free star. With glued holes the exact
/// perimeter is differentiated by central differences instead, since the
/// junctions move.
pub fn perimeter_shape_gradient(obstacle: &StarObstacle, coefs: &[Coef]) -> Result<ShapeGradient> {
    obstacle.star.validate()?;
    let star = &obstacle.star;
    let values = if obstacle.cutouts.is_empty() {
        let n = star.sample_count();
        let w = 2.0 * std::f64::consts::PI / n as f64;
        let samples: Vec<(f64, f64)> = FourierStar::thetas(n)
            .map(|t| Ok((t, star.curvature(t)?)))
            .collect::<Result<_>>()?;
        coefs
            .iter()
            .map(|&c| {
                samples
                    .iter()
                    .map(|&(t, k)| k * star.normal_weight(c, t))
                    .sum::<f64>()
                    * w
            })
            .collect()
    } else {
        let d = 1e-6 * star.a0;
        coefs
            .iter()
            .map(|&c| {
                let plus = StarObstacle {
                    star: star.perturbed(c, d),
                    cutouts: obstacle.cutouts.clone(),
                };
                let minus = StarObstacle {
                    star: star.perturbed(c, -d),
                    cutouts: obstacle.cutouts.clone(),
                };
                (plus.perimeter() - minus.perimeter()) / (2.0 * d)
            })
            .collect()
    };
    Ok(ShapeGradient {
        coefs: coefs.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use approx::assert_relative_eq;

    #[test]
    fn circle_a0_derivative_is_two_pi() {
        let s = StarObstacle::free(FourierStar::circle(point(0.3, 0.1), 0.7));
        let g = perimeter_shape_gradient(&s, &design_coefs(3, true)).unwrap();
        assert_relative_eq!(g.get(Coef::A0).unwrap(), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert!(g.get(Coef::CenterX).unwrap().abs() < 1e-12);
        assert!(g.get(Coef::Cos(2)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn translation_has_zero_perimeter_derivative() {
        let s = StarObstacle::free(FourierStar::new(point(0.0, 0.0), 1.0, vec![0.1, 0.2, 0.05], vec![0.0, -0.1, 0.07]));
        let g = perimeter_shape_gradient(&s, &[Coef::CenterX, Coef::CenterY]).unwrap();
        assert!(g.values.iter().all(|v| v.abs() < 1e-10), "{:?}", g.values);
    }

    #[test]
    fn design_coefs_skip_order_one_with_center_motion() {
        let c = design_coefs(2, true);
        assert_eq!(c, vec![Coef::CenterX, Coef::CenterY, Coef::A0, Coef::Cos(2), Coef::Sin(2)]);
        let c = design_coefs(1, false);
        assert_eq!(c, vec![Coef::A0, Coef::Cos(1), Coef::Sin(1)]);
    }
}
