use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fourier::FourierStar;
use super::shapes::{segment_distance, BoundingBox, Circle, Point, Polygon, Shape};
use super::star::StarObstacle;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstacleKind {
    /// A closed set with non-empty interior, bounded by a simple curve.
    Region,
    /// A one-dimensional continuum with zero area.
    Chain,
}

/// Closed ring {inner ≤ |x − center| ≤ outer}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRegion {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

/// Closed polygonal region with polygonal holes removed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonRegion {
    pub outer: Polygon,
    #[serde(default)]
    pub holes: Vec<Polygon>,
}

/// Graph of straight edges between vertices. A single vertex with no edges
/// is a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub vertices: Vec<Point>,
    pub edges: Vec<[usize; 2]>,
}

impl Chain {
    pub fn point(p: Point) -> Self {
        Self {
            vertices: vec![p],
            edges: vec![],
        }
    }

    pub fn polyline(vertices: Vec<Point>) -> Self {
        let edges = (1..vertices.len()).map(|i| [i - 1, i]).collect();
        Self { vertices, edges }
    }

    pub fn closed_polyline(vertices: Vec<Point>) -> Self {
        let n = vertices.len();
        let mut c = Self::polyline(vertices);
        if n > 2 {
            c.edges.push([n - 1, 0]);
        }
        c
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Self::polyline(vec![a, b])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.edges
            .iter()
            .map(|e| (self.vertices[e[0]], self.vertices[e[1]]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn distance(&self, p: &Point) -> f64 {
        if self.edges.is_empty() {
            return self
                .vertices
                .iter()
                .map(|v| (p - v).norm())
                .fold(f64::INFINITY, f64::min);
        }
        self.segments()
            .map(|(a, b)| segment_distance(p, &a, &b))
            .fold(f64::INFINITY, f64::min)
    }

    fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(Error::DegenerateObstacle("chain has no vertices".into()));
        }
        if self.vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::InvalidGeometry("chain vertex is not finite".into()));
        }
        if self.edges.iter().flatten().any(|&i| i >= n) {
            return Err(Error::InvalidGeometry("chain edge references a missing vertex".into()));
        }
        // Connectivity by union-find; geometrically coincident vertices are
        // also joined.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let join = |a: usize, b: usize, p: &mut Vec<usize>| {
            let (ra, rb) = (find(p, a), find(p, b));
            p[ra] = rb;
        };
        for e in &self.edges {
            join(e[0], e[1], &mut parent);
        }
        let scale = BoundingBox::from_points(&self.vertices).unwrap().diagonal().max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if (self.vertices[i] - self.vertices[j]).norm() <= 1e-12 * scale {
                    join(i, j, &mut parent);
                }
            }
        }
        let root = find(&mut parent, 0);
        if (1..n).any(|i| find(&mut parent, i) != root) {
            return Err(Error::InvalidGeometry("chain is not connected".into()));
        }
        Ok(())
    }
}

/// A compact obstacle K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObstacleSpec", into = "ObstacleSpec")]
pub enum Obstacle {
    Disk(Circle),
    Annulus(AnnulusRegion),
    Polygon(PolygonRegion),
    Star(StarObstacle),
    /// A circle as a curve.
    Circle(Circle),
    Chain(Chain),
}

impl Obstacle {
    pub fn kind(&self) -> ObstacleKind {
        match self {
            Obstacle::Disk(_) | Obstacle::Annulus(_) | Obstacle::Polygon(_) | Obstacle::Star(_) => {
                ObstacleKind::Region
            }
            Obstacle::Circle(_) | Obstacle::Chain(_) => ObstacleKind::Chain,
        }
    }

    pub fn point(p: Point) -> Self {
        Obstacle::Chain(Chain::point(p))
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Obstacle::Chain(Chain::segment(a, b))
    }

    pub fn disk(center: Point, radius: f64) -> Self {
        Obstacle::Disk(Circle::new(center, radius))
    }

    pub fn polygon(vertices: Vec<Point>) -> Self {
        Obstacle::Polygon(PolygonRegion {
            outer: Polygon::new(vertices),
            holes: vec![],
        })
    }

    pub fn star(star: FourierStar) -> Self {
        Obstacle::Star(StarObstacle::free(star))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Obstacle::Disk(c) | Obstacle::Circle(c) => c
                .validate()
                .map_err(|e| Error::DegenerateObstacle(e.to_string())),
            Obstacle::Annulus(a) => {
                if !(a.inner > 0.0 && a.outer > a.inner) {
                    return Err(Error::DegenerateObstacle(format!(
                        "annulus needs 0 < inner < outer, got {} and {}",
                        a.inner, a.outer
                    )));
                }
                Ok(())
            }
            Obstacle::Polygon(p) => {
                if p.outer.vertices.len() < 3 {
                    return Err(Error::DegenerateObstacle(
                        "region polygon needs at least three vertices".into(),
                    ));
                }
                if !p.outer.is_simple() {
                    return Err(Error::InvalidGeometry("region boundary is not a simple closed curve".into()));
                }
                for h in &p.holes {
                    if !h.is_simple() || !h.vertices.iter().all(|v| p.outer.contains(v)) {
                        return Err(Error::InvalidGeometry("region hole is invalid".into()));
                    }
                }
                Ok(())
            }
            Obstacle::Star(s) => s.validate(),
            Obstacle::Chain(c) => c.validate(),
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Obstacle::Disk(c) => c.signed_distance(p) <= 0.0,
            Obstacle::Annulus(a) => {
                let r = (p - a.center).norm();
                r >= a.inner && r <= a.outer
            }
            Obstacle::Polygon(r) => {
                r.outer.contains(p) && r.holes.iter().all(|h| h.signed_distance(p) >= 0.0)
            }
            Obstacle::Star(s) => s.contains(p),
            Obstacle::Circle(c) => c.signed_distance(p).abs() <= 1e-12 * c.radius,
            Obstacle::Chain(c) => c.distance(p) <= 1e-12,
        }
    }

    /// Euclidean distance d(p, K); zero inside regions.
    pub fn distance(&self, p: &Point) -> f64 {
        match self {
            Obstacle::Disk(c) => c.signed_distance(p).max(0.0),
            Obstacle::Annulus(a) => {
                let r = (p - a.center).norm();
                (a.inner - r).max(r - a.outer).max(0.0)
            }
            Obstacle::Polygon(r) => {
                if self.contains(p) {
                    0.0
                } else {
                    r.holes
                        .iter()
                        .map(|h| h.boundary_distance(p))
                        .fold(r.outer.boundary_distance(p), f64::min)
                }
            }
            Obstacle::Star(s) => {
                if s.contains(p) {
                    0.0
                } else {
                    s.boundary_segments(s.star.sample_count())
                        .iter()
                        .map(|(a, b)| segment_distance(p, a, b))
                        .fold(f64::INFINITY, f64::min)
                }
            }
            Obstacle::Circle(c) => c.signed_distance(p).abs(),
            Obstacle::Chain(c) => c.distance(p),
        }
    }

    /// Level function, negative inside, zero on the boundary, positive
    /// outside. Regions only.
    pub fn level(&self, p: &Point) -> Option<f64> {
        match self {
            Obstacle::Disk(c) => Some(c.signed_distance(p)),
            Obstacle::Annulus(a) => {
                let r = (p - a.center).norm();
                Some((a.inner - r).max(r - a.outer))
            }
            Obstacle::Polygon(r) => Some(
                r.holes
                    .iter()
                    .map(|h| -h.signed_distance(p))
                    .fold(r.outer.signed_distance(p), f64::max),
            ),
            Obstacle::Star(s) => Some(s.level(p)),
            Obstacle::Circle(_) | Obstacle::Chain(_) => None,
        }
    }

    /// Lebesgue measure.
    pub fn area(&self) -> f64 {
        match self {
            Obstacle::Disk(c) => c.area(),
            Obstacle::Annulus(a) => PI * (a.outer * a.outer - a.inner * a.inner),
            Obstacle::Polygon(r) => r.outer.area() - r.holes.iter().map(Polygon::area).sum::<f64>(),
            Obstacle::Star(s) => s.area(),
            Obstacle::Circle(_) | Obstacle::Chain(_) => 0.0,
        }
    }

    /// Closed-form SM¹(K): the perimeter of a region, twice the length of a
    /// chain.
    pub fn exact_content(&self) -> f64 {
        match self {
            Obstacle::Disk(c) => c.perimeter(),
            Obstacle::Annulus(a) => 2.0 * PI * (a.inner + a.outer),
            Obstacle::Polygon(r) => r.outer.perimeter() + r.holes.iter().map(Polygon::perimeter).sum::<f64>(),
            Obstacle::Star(s) => s.perimeter(),
            Obstacle::Circle(c) => 2.0 * c.perimeter(),
            Obstacle::Chain(c) => 2.0 * c.length(),
        }
    }

    pub fn bbox(&self) -> BoundingBox {
        match self {
            Obstacle::Disk(c) | Obstacle::Circle(c) => c.bbox(),
            Obstacle::Annulus(a) => Circle::new(a.center, a.outer).bbox(),
            Obstacle::Polygon(r) => r.outer.bbox(),
            Obstacle::Star(s) => s.star.bbox(),
            Obstacle::Chain(c) => BoundingBox::from_points(&c.vertices).unwrap(),
        }
    }

    /// Polyline soup covering ∂K for regions or K itself for chains, with
    /// spacing at most `step` along curved parts.
    pub fn boundary_segments(&self, step: f64) -> Vec<(Point, Point)> {
        let ring = |pts: Vec<Point>| -> Vec<(Point, Point)> {
            let n = pts.len();
            (0..n).map(|i| (pts[i], pts[(i + 1) % n])).collect()
        };
        let circle = |c: &Circle| {
            let n = ((c.perimeter() / step).ceil() as usize).max(16);
            ring((0..n).map(|i| c.point_at_angle(2.0 * PI * i as f64 / n as f64)).collect())
        };
        match self {
            Obstacle::Disk(c) | Obstacle::Circle(c) => circle(c),
            Obstacle::Annulus(a) => {
                let mut v = circle(&Circle::new(a.center, a.inner));
                v.extend(circle(&Circle::new(a.center, a.outer)));
                v
            }
            Obstacle::Polygon(r) => {
                let mut v: Vec<_> = r.outer.edges().collect();
                for h in &r.holes {
                    v.extend(h.edges());
                }
                v
            }
            Obstacle::Star(s) => {
                let n = ((s.star.perimeter() / step).ceil() as usize).max(64);
                s.boundary_segments(n)
            }
            Obstacle::Chain(c) => {
                if c.edges.is_empty() {
                    c.vertices.iter().map(|v| (*v, *v)).collect()
                } else {
                    c.segments().collect()
                }
            }
        }
    }

    /// Dense samples of K: the boundary (or the chain) at spacing `step`,
    /// plus interior lattice points for regions.
    pub fn sample_points(&self, step: f64) -> Vec<Point> {
        let mut pts: Vec<Point> = self
            .boundary_segments(step)
            .iter()
            .flat_map(|(a, b)| super::shapes::densify(a, b, step, true))
            .collect();
        if self.kind() == ObstacleKind::Region {
            let bb = self.bbox();
            let nx = (bb.width() / step).ceil() as usize;
            let ny = (bb.height() / step).ceil() as usize;
            for j in 0..=ny {
                for i in 0..=nx {
                    let p = bb.min + Point::new(i as f64 * step, j as f64 * step);
                    if self.contains(&p) {
                        pts.push(p);
                    }
                }
            }
        }
        pts
    }

    /// Largest distance between two points of K.
    pub fn diameter(&self) -> f64 {
        match self {
            Obstacle::Disk(c) | Obstacle::Circle(c) => 2.0 * c.radius,
            Obstacle::Annulus(a) => 2.0 * a.outer,
            _ => {
                let pts: Vec<Point> = match self {
                    Obstacle::Polygon(r) => r.outer.vertices.clone(),
                    Obstacle::Chain(c) => c.vertices.clone(),
                    Obstacle::Star(s) => s
                        .boundary_segments(256)
                        .into_iter()
                        .map(|(a, _)| a)
                        .collect(),
                    _ => unreachable!(),
                };
                let mut d: f64 = 0.0;
                for i in 0..pts.len() {
                    for j in i + 1..pts.len() {
                        d = d.max((pts[i] - pts[j]).norm());
                    }
                }
                d
            }
        }
    }

    /// Image under x ↦ t·x.
    pub fn scaled(&self, t: f64) -> Self {
        let sc = |c: &Circle| Circle::new(c.center * t, c.radius * t);
        let sp = |p: &Polygon| Polygon::new(p.vertices.iter().map(|v| v * t).collect());
        match self {
            Obstacle::Disk(c) => Obstacle::Disk(sc(c)),
            Obstacle::Circle(c) => Obstacle::Circle(sc(c)),
            Obstacle::Annulus(a) => Obstacle::Annulus(AnnulusRegion {
                center: a.center * t,
                inner: a.inner * t,
                outer: a.outer * t,
            }),
            Obstacle::Polygon(r) => Obstacle::Polygon(PolygonRegion {
                outer: sp(&r.outer),
                holes: r.holes.iter().map(sp).collect(),
            }),
            Obstacle::Star(s) => {
                let mut star = s.star.scaled(t);
                star.center = s.star.center * t;
                Obstacle::Star(StarObstacle {
                    star,
                    cutouts: s
                        .cutouts
                        .iter()
                        .map(|h| match h {
                            Shape::Circle(c) => Shape::Circle(sc(c)),
                            Shape::Polygon(p) => Shape::Polygon(sp(p)),
                        })
                        .collect(),
                })
            }
            Obstacle::Chain(c) => Obstacle::Chain(Chain {
                vertices: c.vertices.iter().map(|v| v * t).collect(),
                edges: c.edges.clone(),
            }),
        }
    }
}

/// On-disk form: `{kind, vertices | circle | annulus | fourier, ...}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub kind: Option<ObstacleKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Point>>,
    /// Region holes, or for chains whether the polyline closes up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holes: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<Circle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annulus: Option<AnnulusRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierStar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutouts: Option<Vec<Shape>>,
}

impl TryFrom<ObstacleSpec> for Obstacle {
    type Error = Error;

    fn try_from(s: ObstacleSpec) -> Result<Self> {
        let kind = s.kind.unwrap_or(if s.fourier.is_some() || s.annulus.is_some() {
            ObstacleKind::Region
        } else {
            ObstacleKind::Chain
        });
        let given = [
            s.vertices.is_some(),
            s.circle.is_some(),
            s.annulus.is_some(),
            s.fourier.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if given != 1 {
            return Err(Error::InvalidGeometry(
                "obstacle needs exactly one of vertices, circle, annulus or fourier".into(),
            ));
        }
        let obstacle = match kind {
            ObstacleKind::Region => {
                if let Some(c) = s.circle {
                    Obstacle::Disk(c)
                } else if let Some(a) = s.annulus {
                    Obstacle::Annulus(a)
                } else if let Some(f) = s.fourier {
                    let f = FourierStar::new(f.center, f.a0, f.a, f.b);
                    Obstacle::Star(StarObstacle {
                        star: f,
                        cutouts: s.cutouts.unwrap_or_default(),
                    })
                } else {
                    Obstacle::Polygon(PolygonRegion {
                        outer: Polygon::new(s.vertices.unwrap()),
                        holes: s
                            .holes
                            .unwrap_or_default()
                            .into_iter()
                            .map(Polygon::new)
                            .collect(),
                    })
                }
            }
            ObstacleKind::Chain => {
                if let Some(c) = s.circle {
                    Obstacle::Circle(c)
                } else if s.annulus.is_some() || s.fourier.is_some() {
                    return Err(Error::InvalidGeometry(
                        "annulus and fourier obstacles must be regions".into(),
                    ));
                } else {
                    let vertices = s.vertices.unwrap();
                    let chain = match (s.edges, s.closed.unwrap_or(false)) {
                        (Some(edges), _) => Chain { vertices, edges },
                        (None, true) => Chain::closed_polyline(vertices),
                        (None, false) => Chain::polyline(vertices),
                    };
                    Obstacle::Chain(chain)
                }
            }
        };
        obstacle.validate()?;
        Ok(obstacle)
    }
}

impl From<Obstacle> for ObstacleSpec {
    fn from(o: Obstacle) -> Self {
        let mut s = ObstacleSpec {
            kind: Some(o.kind()),
            ..Default::default()
        };
        match o {
            Obstacle::Disk(c) | Obstacle::Circle(c) => s.circle = Some(c),
            Obstacle::Annulus(a) => s.annulus = Some(a),
            Obstacle::Polygon(r) => {
                s.vertices = Some(r.outer.vertices);
                if !r.holes.is_empty() {
                    s.holes = Some(r.holes.into_iter().map(|h| h.vertices).collect());
                }
            }
            Obstacle::Star(st) => {
                s.fourier = Some(st.star);
                if !st.cutouts.is_empty() {
                    s.cutouts = Some(st.cutouts);
                }
            }
            Obstacle::Chain(c) => {
                s.vertices = Some(c.vertices);
                s.edges = Some(c.edges);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::point;
    use approx::assert_abs_diff_eq;

    #[test]
    fn json_round_trip() {
        let items = [
            Obstacle::disk(point(0.1, 0.2), 0.5),
            Obstacle::segment(point(0.0, 0.0), point(1.0, 0.0)),
            Obstacle::Circle(Circle::new(point(0.0, 0.0), 1.0)),
            Obstacle::star(FourierStar::new(point(0.0, 0.0), 1.0, vec![0.1], vec![0.0])),
            Obstacle::polygon(vec![point(0.0, 0.0), point(1.0, 0.0), point(0.0, 1.0)]),
        ];
        for o in items {
            let s = serde_json::to_string(&o).unwrap();
            let back: Obstacle = serde_json::from_str(&s).unwrap();
            assert_eq!(o, back, "{s}");
        }
    }

    #[test]
    fn json_forms() {
        let o: Obstacle = serde_json::from_str(
            r#"{"kind":"region","fourier":{"center":[0,0],"a0":0.5,"a":[0,0.1],"b":[]}}"#,
        )
        .unwrap();
        assert_eq!(o.kind(), ObstacleKind::Region);
        let o: Obstacle =
            serde_json::from_str(r#"{"kind":"chain","vertices":[[0,0],[1,0],[1,1]],"closed":true}"#).unwrap();
        assert_abs_diff_eq!(o.exact_content(), 2.0 * (2.0 + 2f64.sqrt()), epsilon = 1e-12);
        let bad = serde_json::from_str::<Obstacle>(r#"{"kind":"chain","vertices":[]}"#);
        assert!(bad.unwrap_err().to_string().contains("degenerate obstacle"));
        let disconnected = serde_json::from_str::<Obstacle>(
            r#"{"kind":"chain","vertices":[[0,0],[1,0],[5,5]],"edges":[[0,1]]}"#,
        );
        assert!(disconnected.is_err());
    }

    #[test]
    fn primitive_distances() {
        assert_abs_diff_eq!(Obstacle::point(point(1.0, 1.0)).distance(&point(4.0, 5.0)), 5.0);
        let a = Obstacle::Annulus(AnnulusRegion {
            center: point(0.0, 0.0),
            inner: 1.0,
            outer: 2.0,
        });
        assert_abs_diff_eq!(a.distance(&point(0.25, 0.0)), 0.75);
        assert_abs_diff_eq!(a.distance(&point(1.5, 0.0)), 0.0);
        assert_abs_diff_eq!(a.distance(&point(0.0, 3.0)), 1.0);
    }

    #[test]
    fn star_distance_matches_circle() {
        let s = Obstacle::star(FourierStar::circle(point(0.0, 0.0), 1.0));
        assert_abs_diff_eq!(s.distance(&point(2.0, 0.3)), point(2.0, 0.3).norm() - 1.0, epsilon = 1e-5);
        assert_eq!(s.distance(&point(0.3, 0.3)), 0.0);
    }
}
