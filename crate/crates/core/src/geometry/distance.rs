use rayon::prelude::*;

use super::field::{Grid, ScalarField};
use super::obstacle::Obstacle;
use super::shapes::{segment_distance, BoundingBox, Point};
use crate::error::{Error, Result};

/// Uniform bucket grid over a segment soup for nearest-segment queries.
pub struct SegmentIndex {
    segs: Vec<(Point, Point)>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    pub fn new(segs: Vec<(Point, Point)>) -> Self {
        let bb = BoundingBox::from_points(segs.iter().flat_map(|(a, b)| [a, b]))
            .unwrap_or(BoundingBox::new(Point::zeros(), Point::zeros()));
        let side = bb.width().max(bb.height()).max(1e-12);
        let per_side = ((segs.len() as f64).sqrt().ceil() as usize).clamp(1, 128);
        let cell = side / per_side as f64 * (1.0 + 1e-9);
        let nx = ((bb.width() / cell).floor() as usize + 1).max(1);
        let ny = ((bb.height() / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (k, (a, b)) in segs.iter().enumerate() {
            // Conservative: every cell touched by the segment's bounding box.
            let lo = a.inf(b) - bb.min;
            let hi = a.sup(b) - bb.min;
            let (i0, j0) = ((lo.x / cell) as usize, (lo.y / cell) as usize);
            let (i1, j1) = (
                ((hi.x / cell) as usize).min(nx - 1),
                ((hi.y / cell) as usize).min(ny - 1),
            );
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(k as u32);
                }
            }
        }
        Self {
            segs,
            origin: bb.min,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    pub fn distance(&self, p: &Point) -> f64 {
        if self.segs.is_empty() {
            return f64::INFINITY;
        }
        let q = (p - self.origin) / self.cell;
        let ci = (q.x.floor() as i64).clamp(0, self.nx as i64 - 1);
        let cj = (q.y.floor() as i64).clamp(0, self.ny as i64 - 1);
        // Distance from p to the clamped start cell, to bound ring searches.
        let cell_min = self.origin + Point::new(ci as f64, cj as f64) * self.cell;
        let dx = (cell_min.x - p.x).max(p.x - cell_min.x - self.cell).max(0.0);
        let dy = (cell_min.y - p.y).max(p.y - cell_min.y - self.cell).max(0.0);
        let offset = dx.hypot(dy);
        let max_ring = self.nx.max(self.ny) as i64;
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            // Segments in cells at Chebyshev ring ≥ `ring` are at least
            // (ring - 1) cells and at least `offset` away from p.
            if best.is_finite() && (((ring - 1) as f64) * self.cell).max(offset) > best {
                break;
            }
            for j in cj - ring..=cj + ring {
                if j < 0 || j >= self.ny as i64 {
                    continue;
                }
                for i in ci - ring..=ci + ring {
                    if i < 0 || i >= self.nx as i64 {
                        continue;
                    }
                    if (i - ci).abs() != ring && (j - cj).abs() != ring {
                        continue;
                    }
                    for &k in &self.buckets[j as usize * self.nx + i as usize] {
                        let (a, b) = &self.segs[k as usize];
                        best = best.min(segment_distance(p, a, b));
                    }
                }
            }
        }
        best
    }
}

/// Exact distance evaluation with per-obstacle precomputation.
pub struct DistanceOracle<'a> {
    obstacle: &'a Obstacle,
    index: Option<SegmentIndex>,
}

impl<'a> DistanceOracle<'a> {
    pub fn new(obstacle: &'a Obstacle) -> Self {
        let index = match obstacle {
            Obstacle::Star(s) => Some(SegmentIndex::new(
                s.boundary_segments(2 * s.star.sample_count()),
            )),
            Obstacle::Chain(c) if c.edges.len() > 16 => Some(SegmentIndex::new(c.segments().collect())),
            Obstacle::Polygon(r) if r.outer.vertices.len() > 16 => {
                Some(SegmentIndex::new(obstacle.boundary_segments(f64::INFINITY)))
            }
            _ => None,
        };
        Self { obstacle, index }
    }

    pub fn distance(&self, p: &Point) -> f64 {
        match &self.index {
            Some(idx) => match self.obstacle {
                Obstacle::Chain(_) => idx.distance(p),
                _ => {
                    if self.obstacle.contains(p) {
                        0.0
                    } else {
                        idx.distance(p)
                    }
                }
            },
            None => self.obstacle.distance(p),
        }
    }
}

/// Exact Euclidean distance to K at every node of the lattice covering
/// `bbox` with spacing `h` (centered on the box).
pub fn distance_field(obstacle: &Obstacle, bbox: &BoundingBox, h: f64) -> Result<ScalarField> {
    obstacle.validate()?;
    let grid = Grid::covering(bbox, h)?;
    if !grid.bbox().contains_box(&obstacle.bbox()) {
        return Err(Error::BoxTooSmall { margin: 0.0 });
    }
    Ok(distance_on_grid(obstacle, grid))
}

pub fn distance_on_grid(obstacle: &Obstacle, grid: Grid) -> ScalarField {
    let oracle = DistanceOracle::new(obstacle);
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, v) in row.iter_mut().enumerate() {
                *v = oracle.distance(&grid.node(i, j));
            }
        });
    ScalarField { grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fourier::FourierStar;
    use crate::geometry::obstacle::Chain;
    use crate::geometry::shapes::point;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn spec_examples() {
        let bb = BoundingBox::new(point(-3.0, -3.0), point(3.0, 3.0));
        let f = distance_field(&Obstacle::point(point(0.0, 0.0)), &bb, 0.5).unwrap();
        let (i, j) = (10, 8); // node (2, 1)
        assert_abs_diff_eq!(f.at(i, j), 5f64.sqrt(), epsilon = 1e-14);
        let seg = Obstacle::segment(point(0.0, 0.0), point(1.0, 0.0));
        assert_abs_diff_eq!(seg.distance(&point(0.5, 0.3)), 0.3, epsilon = 1e-15);
        let disk = Obstacle::disk(point(0.0, 0.0), 1.0);
        let f = distance_field(&disk, &bb, 0.5).unwrap();
        assert_abs_diff_eq!(f.at(10, 6), 1.0, epsilon = 1e-15);
        assert_eq!(f.at(6, 6), 0.0);
    }

    #[test]
    fn rejects_small_box_and_empty_obstacle() {
        let bb = BoundingBox::new(point(-0.5, -0.5), point(0.5, 0.5));
        let disk = Obstacle::disk(point(0.0, 0.0), 1.0);
        assert!(matches!(distance_field(&disk, &bb, 0.1), Err(Error::BoxTooSmall { .. })));
        let empty = Obstacle::Chain(Chain {
            vertices: vec![],
            edges: vec![],
        });
        let err = distance_field(&empty, &bb, 0.1).unwrap_err();
        assert!(err.to_string().contains("degenerate obstacle"));
    }

    #[test]
    fn segment_index_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let segs: Vec<_> = (0..300)
            .map(|_| {
                let a = point(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let d = point(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
                (a, a + d)
            })
            .collect();
        let idx = SegmentIndex::new(segs.clone());
        for _ in 0..500 {
            let p = point(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let brute = segs
                .iter()
                .map(|(a, b)| segment_distance(&p, a, b))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(idx.distance(&p), brute);
        }
    }

    #[test]
    fn star_field_matches_direct_distance() {
        let s = Obstacle::star(FourierStar::new(point(0.0, 0.0), 1.0, vec![0.0, 0.15], vec![0.1]));
        let bb = s.bbox().expand(0.5);
        let f = distance_field(&s, &bb, 0.1).unwrap();
        for k in (0..f.values.len()).step_by(37) {
            let (i, j) = f.grid.coords(k);
            assert_abs_diff_eq!(f.values[k], s.distance(&f.grid.node(i, j)), epsilon = 1e-5);
        }
    }
}
