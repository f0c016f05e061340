use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::shapes::{point, BoundingBox, Point};
use crate::error::{Error, Result};

/// Star-shaped closed curve r(θ) = a₀ + Σ_k a_k cos kθ + b_k sin kθ about
/// `center`. `a[k-1]` and `b[k-1]` hold the order-k coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierStar {
    pub center: Point,
    pub a0: f64,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

/// One scalar degree of freedom of a [`FourierStar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coef {
    CenterX,
    CenterY,
    A0,
    Cos(usize),
    Sin(usize),
}

impl FourierStar {
    pub fn circle(center: Point, radius: f64) -> Self {
        Self {
            center,
            a0: radius,
            a: vec![],
            b: vec![],
        }
    }

    pub fn new(center: Point, a0: f64, a: Vec<f64>, b: Vec<f64>) -> Self {
        let mut s = Self { center, a0, a, b };
        s.pad();
        s
    }

    fn pad(&mut self) {
        let k = self.a.len().max(self.b.len());
        self.a.resize(k, 0.0);
        self.b.resize(k, 0.0);
    }

    pub fn k_max(&self) -> usize {
        self.a.len().max(self.b.len())
    }

    /// Truncates or zero-pads to order `k`.
    pub fn with_order(&self, k: usize) -> Self {
        let mut s = self.clone();
        s.a.resize(k, 0.0);
        s.b.resize(k, 0.0);
        s
    }

    /// (r, r′, r″) at θ.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let mut r = self.a0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for k in 1..=self.k_max() {
            let ak = self.a.get(k - 1).copied().unwrap_or(0.0);
            let bk = self.b.get(k - 1).copied().unwrap_or(0.0);
            if ak == 0.0 && bk == 0.0 {
                continue;
            }
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            r += ak * c + bk * s;
            d1 += kf * (bk * c - ak * s);
            d2 -= kf * kf * (ak * c + bk * s);
        }
        (r, d1, d2)
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.eval(theta).0
    }

    pub fn point(&self, theta: f64) -> Point {
        let r = self.radius(theta);
        self.center + point(theta.cos(), theta.sin()) * r
    }

    /// Outward unit normal at θ.
    pub fn normal(&self, theta: f64) -> Point {
        let (r, d1, _) = self.eval(theta);
        let (s, c) = theta.sin_cos();
        let er = point(c, s);
        let et = point(-s, c);
        (er * r - et * d1) / r.hypot(d1)
    }

    /// |dx/dθ|.
    pub fn speed(&self, theta: f64) -> f64 {
        let (r, d1, _) = self.eval(theta);
        r.hypot(d1)
    }

    /// Signed curvature, positive where the curve is locally convex.
    pub fn curvature(&self, theta: f64) -> Result<f64> {
        let (r, d1, d2) = self.eval(theta);
        if r <= 0.0 {
            return Err(Error::SelfIntersecting { theta, r });
        }
        Ok((r * r + 2.0 * d1 * d1 - r * d2) / (r * r + d1 * d1).powf(1.5))
    }

    /// Number of θ-samples used for dense checks and quadratures.
    pub fn sample_count(&self) -> usize {
        (64 * (self.k_max() + 1)).max(1024)
    }

    pub fn thetas(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
    }

    pub fn min_radius(&self) -> (f64, f64) {
        Self::thetas(self.sample_count())
            .map(|t| (self.radius(t), t))
            .fold((f64::INFINITY, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc })
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.a0.is_finite()
            && self.center.x.is_finite()
            && self.center.y.is_finite()
            && self.a.iter().chain(&self.b).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGeometry("non-finite Fourier coefficient".into()));
        }
        if self.a0 <= 0.0 {
            return Err(Error::InvalidGeometry(format!("a0 must be positive, got {}", self.a0)));
        }
        let (r, theta) = self.min_radius();
        if r <= 0.0 {
            return Err(Error::SelfIntersecting { theta, r });
        }
        Ok(())
    }

    /// Exact polar arclength ∮ √(r² + r′²) dθ by the periodic trapezoid rule,
    /// which converges geometrically for trigonometric polynomials.
    pub fn perimeter(&self) -> f64 {
        let n = self.sample_count();
        let w = 2.0 * PI / n as f64;
        Self::thetas(n).map(|t| self.speed(t)).sum::<f64>() * w
    }

    /// ½∮ r² dθ, closed form by Parseval.
    pub fn area(&self) -> f64 {
        let s: f64 = self.a.iter().chain(&self.b).map(|c| c * c).sum();
        PI * (self.a0 * self.a0 + 0.5 * s)
    }

    /// Negative inside, zero on the curve. Not a distance, but continuous and
    /// with the right sign.
    pub fn level(&self, p: &Point) -> f64 {
        let d = p - self.center;
        let rho = d.norm();
        if rho == 0.0 {
            return -self.a0;
        }
        rho - self.radius(d.y.atan2(d.x))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.level(p) <= 0.0
    }

    pub fn polyline(&self, n: usize) -> Vec<Point> {
        Self::thetas(n).map(|t| self.point(t)).collect()
    }

    pub fn bbox(&self) -> BoundingBox {
        let pts = self.polyline(self.sample_count());
        // Chords sag by at most the sampling error; pad generously.
        let pad = self.perimeter() / self.sample_count() as f64;
        BoundingBox::from_points(&pts).unwrap().expand(pad)
    }

    /// Homothety about the center.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            center: self.center,
            a0: self.a0 * s,
            a: self.a.iter().map(|v| v * s).collect(),
            b: self.b.iter().map(|v| v * s).collect(),
        }
    }

    /// All coefficients up to the current order, center first.
    pub fn coefs(&self) -> Vec<Coef> {
        let mut v = vec![Coef::CenterX, Coef::CenterY, Coef::A0];
        for k in 1..=self.k_max() {
            v.push(Coef::Cos(k));
            v.push(Coef::Sin(k));
        }
        v
    }

    pub fn get(&self, c: Coef) -> f64 {
        match c {
            Coef::CenterX => self.center.x,
            Coef::CenterY => self.center.y,
            Coef::A0 => self.a0,
            Coef::Cos(k) => self.a.get(k - 1).copied().unwrap_or(0.0),
            Coef::Sin(k) => self.b.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    pub fn set(&mut self, c: Coef, v: f64) {
        match c {
            Coef::CenterX => self.center.x = v,
            Coef::CenterY => self.center.y = v,
            Coef::A0 => self.a0 = v,
            Coef::Cos(k) | Coef::Sin(k) => {
                if k > self.k_max() {
                    self.a.resize(k, 0.0);
                    self.b.resize(k, 0.0);
                }
                match c {
                    Coef::Cos(_) => self.a[k - 1] = v,
                    _ => self.b[k - 1] = v,
                }
            }
        }
    }

    pub fn perturbed(&self, c: Coef, delta: f64) -> Self {
        let mut s = self.clone();
        s.set(c, self.get(c) + delta);
        s
    }

    /// (V_c·n) dσ/dθ: the normal boundary velocity per unit θ induced by a
    /// unit change of coefficient `c`.
    pub fn normal_weight(&self, c: Coef, theta: f64) -> f64 {
        let (r, d1, _) = self.eval(theta);
        let (s, co) = theta.sin_cos();
        match c {
            Coef::A0 => r,
            Coef::Cos(k) => (k as f64 * theta).cos() * r,
            Coef::Sin(k) => (k as f64 * theta).sin() * r,
            Coef::CenterX => r * co + d1 * s,
            Coef::CenterY => r * s - d1 * co,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_curvature_and_perimeter() {
        let c = FourierStar::circle(point(0.3, -0.2), 2.0);
        for t in [0.0, 1.0, 4.0] {
            assert_abs_diff_eq!(c.curvature(t).unwrap(), 0.5, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(c.perimeter(), 4.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(c.area(), 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = FourierStar::new(point(0.0, 0.0), 1.0, vec![0.1, 0.05, 0.02], vec![-0.03, 0.04, 0.01]);
        let h = 1e-5;
        for t in [0.2, 1.7, 3.3] {
            let (_, d1, d2) = s.eval(t);
            let fd1 = (s.radius(t + h) - s.radius(t - h)) / (2.0 * h);
            let fd2 = (s.radius(t + h) - 2.0 * s.radius(t) + s.radius(t - h)) / (h * h);
            assert_abs_diff_eq!(d1, fd1, epsilon = 1e-8);
            assert_abs_diff_eq!(d2, fd2, epsilon = 1e-4);
        }
    }

    #[test]
    fn nonpositive_radius_is_rejected() {
        let s = FourierStar::new(point(0.0, 0.0), 1.0, vec![1.2], vec![]);
        assert!(matches!(s.validate(), Err(Error::SelfIntersecting { .. })));
        assert!(matches!(s.curvature(PI), Err(Error::SelfIntersecting { .. })));
    }

    #[test]
    fn normal_is_unit_and_outward() {
        let s = FourierStar::new(point(1.0, 2.0), 1.0, vec![0.0, 0.2], vec![0.1]);
        for t in FourierStar::thetas(17) {
            let n = s.normal(t);
            assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-14);
            assert!(s.level(&(s.point(t) + n * 1e-3)) > 0.0);
            assert!(s.level(&(s.point(t) - n * 1e-3)) < 0.0);
        }
    }

    #[test]
    fn area_matches_polygon_area() {
        let s = FourierStar::new(point(0.0, 0.0), 1.0, vec![0.1, 0.2], vec![0.0, -0.1]);
        let poly = crate::geometry::shapes::Polygon::new(s.polyline(4096));
        assert_abs_diff_eq!(s.area(), poly.area(), epsilon = 1e-5);
    }
}
