use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

pub fn point(x: f64, y: f64) -> Point {
    Vector2::new(x, y)
}

/// z-component of the planar cross product.
pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Parameter `t ∈ [0, 1]` along `p → q` where it first meets segment `[a, b]`.
pub fn segment_crossing(p: &Point, q: &Point, a: &Point, b: &Point) -> Option<f64> {
    let r = q - p;
    let s = b - a;
    let denom = cross(&r, &s);
    let ap = a - p;
    if denom.abs() < 1e-300 {
        // Parallel. Collinear overlap counts as a hit at the nearest end.
        if cross(&ap, &r).abs() > 1e-14 * (r.norm() * ap.norm()).max(1e-300) {
            return None;
        }
        let rr = r.norm_squared();
        if rr == 0.0 {
            return None;
        }
        let t0 = ap.dot(&r) / rr;
        let t1 = (b - p).dot(&r) / rr;
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return None;
        }
        return Some(lo.max(0.0));
    }
    let t = cross(&ap, &s) / denom;
    let u = cross(&ap, &r) / denom;
    let eps = 1e-12;
    if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u) {
        Some(t.clamp(0.0, 1.0))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut bb = Self::new(first, first);
        for p in it {
            bb.min = bb.min.inf(p);
            bb.max = bb.max.sup(p);
        }
        Some(bb)
    }

    pub fn expand(&self, margin: f64) -> Self {
        let m = point(margin, margin);
        Self::new(self.min - m, self.max + m)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn contains_box(&self, other: &Self) -> bool {
        self.min.x <= other.min.x
            && self.min.y <= other.min.y
            && self.max.x >= other.max.x
            && self.max.y >= other.max.y
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn center(&self) -> Point {
        (self.min + self.max) * 0.5
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "circle radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::InvalidGeometry("circle center is not finite".into()));
        }
        Ok(())
    }

    /// Negative inside, zero on the circle.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        (p - self.center).norm() - self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }

    pub fn point_at_angle(&self, phi: f64) -> Point {
        self.center + point(phi.cos(), phi.sin()) * self.radius
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::new(self.center, self.center).expand(self.radius)
    }

    /// First parameter `t ∈ [0, 1]` along `p → q` at which the segment
    /// meets the circle.
    pub fn segment_crossing(&self, p: &Point, q: &Point) -> Option<f64> {
        let d = q - p;
        let f = p - self.center;
        let a = d.norm_squared();
        if a == 0.0 {
            return None;
        }
        let b = 2.0 * f.dot(&d);
        let c = f.norm_squared() - self.radius * self.radius;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let t1 = (-b - sq) / (2.0 * a);
        let t2 = (-b + sq) / (2.0 * a);
        [t1, t2].into_iter().find(|t| (0.0..=1.0).contains(t))
    }
}

/// Closed polygon given by its vertex ring (either orientation, last vertex
/// not repeated).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn regular(center: Point, circumradius: f64, n: usize, phase: f64) -> Self {
        let vertices = (0..n)
            .map(|i| {
                let t = phase + 2.0 * PI * i as f64 / n as f64;
                center + point(t.cos(), t.sin()) * circumradius
            })
            .collect();
        Self { vertices }
    }

    pub fn rectangle(min: Point, max: Point) -> Self {
        Self::new(vec![min, point(max.x, min.y), max, point(min.x, max.y)])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| cross(&a, &b)).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn centroid(&self) -> Point {
        let a = self.signed_area();
        if a.abs() < 1e-300 {
            let n = self.vertices.len().max(1) as f64;
            return self.vertices.iter().sum::<Point>() / n;
        }
        let mut c = Point::zeros();
        for (p, q) in self.edges() {
            c += (p + q) * cross(&p, &q);
        }
        c / (6.0 * a)
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::from_points(&self.vertices).expect("polygon has vertices")
    }

    pub fn boundary_distance(&self, p: &Point) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, &a, &b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Crossing-number test for the open interior.
    fn interior_test(&self, p: &Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Closed containment (boundary counts as inside).
    pub fn contains(&self, p: &Point) -> bool {
        self.boundary_distance(p) <= 1e-12 * self.scale() || self.interior_test(p)
    }

    /// Negative inside, zero on the boundary.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        let d = self.boundary_distance(p);
        if d > 0.0 && self.interior_test(p) {
            -d
        } else {
            d
        }
    }

    fn scale(&self) -> f64 {
        self.bbox().diagonal().max(1e-300)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        let orient = self.signed_area().signum();
        if orient == 0.0 {
            return false;
        }
        let tol = 1e-12 * self.scale() * self.scale();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            orient * cross(&(b - a), &(c - b)) >= -tol
        })
    }

    /// No two non-adjacent edges meet and no edge is degenerate.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 || self.area() <= 0.0 {
            return false;
        }
        let edges: Vec<_> = self.edges().collect();
        if edges.iter().any(|(a, b)| (b - a).norm() == 0.0) {
            return false;
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if segment_crossing(&a, &b, &c, &d).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Cumulative arclength at each vertex, with the total as last entry.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = vec![0.0];
        let mut s = 0.0;
        for (a, b) in self.edges() {
            s += (b - a).norm();
            acc.push(s);
        }
        acc
    }

    pub fn point_at_arclength(&self, s: f64) -> Point {
        let cum = self.cumulative();
        let total = *cum.last().unwrap();
        let s = s.rem_euclid(total);
        let n = self.vertices.len();
        let i = cum.partition_point(|&c| c <= s).saturating_sub(1).min(n - 1);
        let len = cum[i + 1] - cum[i];
        let t = if len > 0.0 { (s - cum[i]) / len } else { 0.0 };
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % n];
        a + (b - a) * t
    }

    /// Arclength parameter of the boundary point nearest to `p`.
    pub fn arclength_of(&self, p: &Point) -> f64 {
        let cum = self.cumulative();
        let mut best = (f64::INFINITY, 0.0);
        for (i, (a, b)) in self.edges().enumerate() {
            let ab = b - a;
            let len2 = ab.norm_squared();
            let t = if len2 > 0.0 {
                ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = (p - (a + ab * t)).norm();
            if d < best.0 {
                best = (d, cum[i] + t * len2.sqrt());
            }
        }
        best.1
    }
}

/// A closed planar set used as the outer boundary or a hole of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle(Circle),
    Polygon(Polygon),
}

impl Shape {
    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Circle(c) => c.validate(),
            Shape::Polygon(p) => {
                if p.vertices.len() < 3 {
                    return Err(Error::InvalidGeometry(
                        "polygon needs at least three vertices".into(),
                    ));
                }
                if p.vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
                    return Err(Error::InvalidGeometry("polygon vertex is not finite".into()));
                }
                if !p.is_simple() {
                    return Err(Error::InvalidGeometry("polygon is not simple".into()));
                }
                Ok(())
            }
        }
    }

    /// Negative inside, zero on the boundary.
    pub fn signed_distance(&self, p: &Point) -> f64 {
        match self {
            Shape::Circle(c) => c.signed_distance(p),
            Shape::Polygon(poly) => poly.signed_distance(p),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Shape::Circle(c) => c.signed_distance(p) <= 0.0,
            Shape::Polygon(poly) => poly.contains(p),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Shape::Circle(c) => c.area(),
            Shape::Polygon(p) => p.area(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Circle(c) => c.perimeter(),
            Shape::Polygon(p) => p.perimeter(),
        }
    }

    pub fn bbox(&self) -> BoundingBox {
        match self {
            Shape::Circle(c) => c.bbox(),
            Shape::Polygon(p) => p.bbox(),
        }
    }

    pub fn center(&self) -> Point {
        match self {
            Shape::Circle(c) => c.center,
            Shape::Polygon(p) => p.centroid(),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Circle(_) => true,
            Shape::Polygon(p) => p.is_convex(),
        }
    }

    pub fn point_at_arclength(&self, s: f64) -> Point {
        match self {
            Shape::Circle(c) => c.point_at_angle(s / c.radius),
            Shape::Polygon(p) => p.point_at_arclength(s),
        }
    }

    pub fn arclength_of(&self, p: &Point) -> f64 {
        match self {
            Shape::Circle(c) => {
                let d = p - c.center;
                d.y.atan2(d.x).rem_euclid(2.0 * PI) * c.radius
            }
            Shape::Polygon(poly) => poly.arclength_of(p),
        }
    }

    /// Boundary samples with spacing at most `step`.
    pub fn boundary_samples(&self, step: f64) -> Vec<Point> {
        match self {
            Shape::Circle(c) => {
                let n = ((c.perimeter() / step).ceil() as usize).max(8);
                (0..n)
                    .map(|i| c.point_at_angle(2.0 * PI * i as f64 / n as f64))
                    .collect()
            }
            Shape::Polygon(p) => p.edges().flat_map(|(a, b)| densify(&a, &b, step, false)).collect(),
        }
    }
}

/// Points on `[a, b]` with spacing at most `step`, starting at `a`; the end
/// point is included only when `include_end` is set.
pub fn densify(a: &Point, b: &Point, step: f64, include_end: bool) -> Vec<Point> {
    let len = (b - a).norm();
    let n = ((len / step).ceil() as usize).max(1);
    let last = if include_end { n } else { n - 1 };
    (0..=last).map(|i| a + (b - a) * (i as f64 / n as f64)).collect()
}
