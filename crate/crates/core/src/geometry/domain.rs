use serde::{Deserialize, Serialize};

use super::shapes::{BoundingBox, Circle, Point, Shape};
use crate::error::{Error, Result};

/// The ambient open set Ω: an outer region minus closed convex holes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub outer: Shape,
    #[serde(default)]
    pub holes: Vec<Shape>,
}

impl Domain {
    /// Builds and validates.
    pub fn new(outer: Shape, holes: Vec<Shape>) -> Result<Self> {
        let d = Self { outer, holes };
        d.validate()?;
        Ok(d)
    }

    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        Self::new(Shape::Circle(Circle::new(center, radius)), vec![])
    }

    /// B(r₀) minus the closed concentric disk of radius r₁.
    pub fn annulus(center: Point, r1: f64, r0: f64) -> Result<Self> {
        Self::new(
            Shape::Circle(Circle::new(center, r0)),
            vec![Shape::Circle(Circle::new(center, r1))],
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        for (i, hole) in self.holes.iter().enumerate() {
            hole.validate()?;
            if !hole.is_convex() {
                return Err(Error::InvalidGeometry(format!("hole {i} is not convex")));
            }
            let inside = match hole {
                Shape::Circle(c) => -self.outer.signed_distance(&c.center) > c.radius,
                Shape::Polygon(p) => p
                    .vertices
                    .iter()
                    .all(|v| self.outer.signed_distance(v) < 0.0),
            };
            // A convex polygon inside a non-convex outer region can still
            // cross its boundary between vertices; check densified edges.
            let inside = inside
                && hole
                    .boundary_samples(hole.bbox().diagonal() / 256.0)
                    .iter()
                    .all(|p| self.outer.signed_distance(p) < 0.0);
            if !inside {
                return Err(Error::InvalidGeometry(format!(
                    "hole {i} is not strictly inside the outer region"
                )));
            }
        }
        for i in 0..self.holes.len() {
            for j in i + 1..self.holes.len() {
                if shape_gap(&self.holes[i], &self.holes[j]) <= 0.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "holes {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Open-set membership.
    pub fn contains(&self, p: &Point) -> bool {
        self.outer.signed_distance(p) < 0.0 && self.holes.iter().all(|h| h.signed_distance(p) > 0.0)
    }

    /// Distance to ∂Ω (outer boundary and hole boundaries).
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        self.holes
            .iter()
            .map(|h| h.signed_distance(p).abs())
            .fold(self.outer.signed_distance(p).abs(), f64::min)
    }

    pub fn outer_boundary_distance(&self, p: &Point) -> f64 {
        self.outer.signed_distance(p).abs()
    }

    /// H¹(∂Ω).
    pub fn boundary_length(&self) -> f64 {
        self.outer.perimeter() + self.holes.iter().map(Shape::perimeter).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(Shape::area).sum::<f64>()
    }

    pub fn center(&self) -> Point {
        self.outer.center()
    }

    pub fn bbox(&self) -> BoundingBox {
        self.outer.bbox()
    }

    pub fn is_convex(&self) -> bool {
        self.holes.is_empty() && self.outer.is_convex()
    }
}

/// Positive minimal gap between two convex shapes, negative or zero if they
/// meet. Sampled on the boundaries; exact for circle pairs.
fn shape_gap(a: &Shape, b: &Shape) -> f64 {
    if let (Shape::Circle(p), Shape::Circle(q)) = (a, b) {
        return (p.center - q.center).norm() - p.radius - q.radius;
    }
    let step = a.bbox().diagonal().min(b.bbox().diagonal()) / 512.0;
    let ab = a
        .boundary_samples(step)
        .iter()
        .map(|p| b.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    let ba = b
        .boundary_samples(step)
        .iter()
        .map(|p| a.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    ab.min(ba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{point, Polygon};

    #[test]
    fn rejects_overlapping_and_escaping_holes() {
        let outer = Shape::Circle(Circle::new(point(0.0, 0.0), 1.0));
        let h1 = Shape::Circle(Circle::new(point(0.3, 0.0), 0.2));
        let h2 = Shape::Circle(Circle::new(point(-0.05, 0.0), 0.2));
        assert!(Domain::new(outer.clone(), vec![h1.clone(), h2]).is_err());
        let out = Shape::Circle(Circle::new(point(0.9, 0.0), 0.2));
        assert!(Domain::new(outer.clone(), vec![out]).is_err());
        let nonconvex = Shape::Polygon(Polygon::new(vec![
            point(-0.2, -0.2),
            point(0.2, -0.2),
            point(0.0, 0.0),
            point(0.2, 0.2),
            point(-0.2, 0.2),
        ]));
        assert!(Domain::new(outer.clone(), vec![nonconvex]).is_err());
        assert!(Domain::new(outer, vec![h1]).is_ok());
    }

    #[test]
    fn annulus_membership_and_length() {
        let d = Domain::annulus(point(0.0, 0.0), 1.0, 2.0).unwrap();
        assert!(d.contains(&point(1.5, 0.0)));
        assert!(!d.contains(&point(0.5, 0.0)));
        assert!(!d.contains(&point(2.0, 0.0)));
        let l = d.boundary_length();
        assert!((l - 6.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((d.boundary_distance(&point(1.2, 0.0)) - 0.2).abs() < 1e-12);
    }
}
