use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::fourier::FourierStar;
use super::shapes::{Point, Shape};
use crate::error::Result;

/// A Fourier star region S with the domain holes it overlaps removed:
/// K = S minus the open holes. With no cutouts K = S.
///
/// When S overlaps a hole, part of ∂K runs along the hole boundary; that
/// part is fixed, and only the arcs of ∂S outside every hole are free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarObstacle {
    pub star: FourierStar,
    #[serde(default)]
    pub cutouts: Vec<Shape>,
}

// 10-point Gauss–Legendre on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_35,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_14,
];

/// ∫_a^b f by composite 10-point Gauss–Legendre on `panels` panels.
pub fn gauss_legendre(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let w = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        let half = 0.5 * w;
        for (x, wt) in GL_X.iter().zip(GL_W) {
            sum += wt * (f(mid - half * x) + f(mid + half * x));
        }
    }
    sum * 0.5 * w
}

impl StarObstacle {
    pub fn free(star: FourierStar) -> Self {
        Self {
            star,
            cutouts: vec![],
        }
    }

    /// Attaches every hole of `domain` that meets S.
    pub fn in_domain(star: FourierStar, domain: &Domain) -> Self {
        let poly = star.polyline(star.sample_count());
        let cutouts = domain
            .holes
            .iter()
            .filter(|h| {
                poly.iter().any(|p| h.contains(p))
                    || h.boundary_samples(h.perimeter() / 512.0)
                        .iter()
                        .any(|p| star.contains(p))
            })
            .cloned()
            .collect();
        Self { star, cutouts }
    }

    pub fn validate(&self) -> Result<()> {
        self.star.validate()?;
        for c in &self.cutouts {
            c.validate()?;
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.star.contains(p) && self.cutouts.iter().all(|h| h.signed_distance(p) >= 0.0)
    }

    /// Negative inside K, zero on ∂K.
    pub fn level(&self, p: &Point) -> f64 {
        self.cutouts
            .iter()
            .map(|h| -h.signed_distance(p))
            .fold(self.star.level(p), f64::max)
    }

    /// Whether the star boundary point at θ lies outside every cutout.
    pub fn is_free(&self, theta: f64) -> bool {
        let p = self.star.point(theta);
        self.cutouts.iter().all(|h| h.signed_distance(&p) > 0.0)
    }

    /// Angles where ∂S crosses the boundary of `hole`, ascending in [0, 2π).
    pub fn junctions_with(&self, hole: &Shape) -> Vec<f64> {
        let n = 2 * self.star.sample_count();
        let f = |t: f64| hole.signed_distance(&self.star.point(t));
        let mut out = Vec::new();
        let mut t0 = 0.0;
        let mut f0 = f(t0);
        for i in 1..=n {
            let t1 = 2.0 * PI * i as f64 / n as f64;
            let f1 = f(t1);
            if (f0 > 0.0) != (f1 > 0.0) {
                let (mut lo, mut hi, mut flo) = (t0, t1, f0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let fm = f(mid);
                    if (fm > 0.0) == (flo > 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                out.push((0.5 * (lo + hi)).rem_euclid(2.0 * PI));
            }
            t0 = t1;
            f0 = f1;
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Per cutout, the junction angles on ∂S.
    pub fn junctions(&self) -> Vec<Vec<f64>> {
        self.cutouts.iter().map(|h| self.junctions_with(h)).collect()
    }

    /// θ-intervals `(start, end)` with `start < end ≤ start + 2π` on which
    /// ∂S is outside every cutout.
    pub fn free_intervals(&self) -> Vec<(f64, f64)> {
        let mut cuts: Vec<f64> = self.junctions().into_iter().flatten().collect();
        if cuts.is_empty() {
            return if self.is_free(0.0) {
                vec![(0.0, 2.0 * PI)]
            } else {
                vec![]
            };
        }
        cuts.sort_by(f64::total_cmp);
        let m = cuts.len();
        (0..m)
            .filter_map(|i| {
                let a = cuts[i];
                let b = if i + 1 < m { cuts[i + 1] } else { cuts[0] + 2.0 * PI };
                self.is_free(0.5 * (a + b)).then_some((a, b))
            })
            .collect()
    }

    /// Length of ∂S outside the cutouts.
    pub fn free_length(&self) -> f64 {
        self.free_intervals()
            .iter()
            .map(|&(a, b)| {
                let panels = ((b - a) / (2.0 * PI) * 64.0).ceil().max(1.0) as usize
                    * (1 + self.star.k_max() / 8);
                gauss_legendre(a, b, panels, |t| self.star.speed(t))
            })
            .sum()
    }

    /// Length of the hole boundary inside S, per cutout.
    pub fn glued_lengths(&self) -> Vec<f64> {
        self.cutouts
            .iter()
            .map(|hole| {
                let total = hole.perimeter();
                let mut s: Vec<f64> = self
                    .junctions_with(hole)
                    .iter()
                    .map(|&t| hole.arclength_of(&self.star.point(t)))
                    .collect();
                if s.is_empty() {
                    let p = hole.point_at_arclength(0.0);
                    return if self.star.contains(&p) { total } else { 0.0 };
                }
                s.sort_by(f64::total_cmp);
                let m = s.len();
                (0..m)
                    .map(|i| {
                        let a = s[i];
                        let b = if i + 1 < m { s[i + 1] } else { s[0] + total };
                        let mid = hole.point_at_arclength(0.5 * (a + b));
                        if self.star.contains(&mid) {
                            b - a
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// H¹(∂K), equal to SM¹(K) for this Lipschitz set.
    pub fn perimeter(&self) -> f64 {
        if self.cutouts.is_empty() {
            return self.star.perimeter();
        }
        self.free_length() + self.glued_lengths().iter().sum::<f64>()
    }

    /// Lebesgue measure of K.
    pub fn area(&self) -> f64 {
        let mut area = self.star.area();
        for hole in &self.cutouts {
            area -= self.overlap_area(hole);
        }
        area
    }

    /// Area of S ∩ hole by polar integration about the star center; each ray
    /// meets the convex hole in one interval.
    fn overlap_area(&self, hole: &Shape) -> f64 {
        let n = 8192;
        let c = self.star.center;
        let w = 2.0 * PI / n as f64;
        FourierStar::thetas(n)
            .map(|t| {
                let dir = Point::new(t.cos(), t.sin());
                let r = self.star.radius(t);
                match ray_interval(hole, &c, &dir) {
                    Some((lo, hi)) => {
                        let lo = lo.max(0.0);
                        let hi = hi.min(r);
                        if hi > lo {
                            0.5 * (hi * hi - lo * lo)
                        } else {
                            0.0
                        }
                    }
                    None => 0.0,
                }
            })
            .sum::<f64>()
            * w
    }

    /// Boundary of K as a polyline soup with roughly `n` points on ∂S.
    pub fn boundary_segments(&self, n: usize) -> Vec<(Point, Point)> {
        let mut segs = Vec::new();
        for (a, b) in self.free_intervals() {
            let m = (((b - a) / (2.0 * PI)) * n as f64).ceil().max(2.0) as usize;
            let pts: Vec<Point> = (0..=m)
                .map(|i| self.star.point(a + (b - a) * i as f64 / m as f64))
                .collect();
            segs.extend(pts.windows(2).map(|w| (w[0], w[1])));
        }
        let step = self.star.perimeter() / n as f64;
        for hole in &self.cutouts {
            let total = hole.perimeter();
            let mut s: Vec<f64> = self
                .junctions_with(hole)
                .iter()
                .map(|&t| hole.arclength_of(&self.star.point(t)))
                .collect();
            s.sort_by(f64::total_cmp);
            let pieces: Vec<(f64, f64)> = if s.is_empty() {
                vec![(0.0, total)]
            } else {
                (0..s.len())
                    .map(|i| (s[i], if i + 1 < s.len() { s[i + 1] } else { s[0] + total }))
                    .collect()
            };
            for (a, b) in pieces {
                if !self.star.contains(&hole.point_at_arclength(0.5 * (a + b))) {
                    continue;
                }
                let m = ((b - a) / step).ceil().max(2.0) as usize;
                let pts: Vec<Point> = (0..=m)
                    .map(|i| hole.point_at_arclength(a + (b - a) * i as f64 / m as f64))
                    .collect();
                segs.extend(pts.windows(2).map(|w| (w[0], w[1])));
            }
        }
        segs
    }
}

/// Parameter interval of the ray `c + t·dir` (t ∈ ℝ) inside a convex shape.
pub fn ray_interval(shape: &Shape, c: &Point, dir: &Point) -> Option<(f64, f64)> {
    match shape {
        Shape::Circle(circ) => {
            let f = c - circ.center;
            let b = f.dot(dir);
            let disc = b * b - (f.norm_squared() - circ.radius * circ.radius);
            if disc <= 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            Some((-b - sq, -b + sq))
        }
        Shape::Polygon(poly) => {
            // Cyrus–Beck clipping against each edge half-plane.
            let orient = poly.signed_area().signum();
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (a, b) in poly.edges() {
                let e = b - a;
                // Inward normal for the polygon orientation.
                let nrm = Point::new(-e.y, e.x) * orient;
                let num = (c - a).dot(&nrm);
                let den = dir.dot(&nrm);
                if den.abs() < 1e-300 {
                    if num < 0.0 {
                        return None;
                    }
                    continue;
                }
                let t = -num / den;
                if den > 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
            (hi > lo).then_some((lo, hi))
        }
    }
}
