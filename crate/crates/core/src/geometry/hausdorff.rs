use super::distance::SegmentIndex;
use super::obstacle::{Chain, Obstacle};
use super::shapes::Point;
use crate::error::{Error, Result};

fn nearest_index(pts: &[Point]) -> SegmentIndex {
    SegmentIndex::new(pts.iter().map(|p| (*p, *p)).collect())
}

fn directed(from: &[Point], to: &SegmentIndex) -> f64 {
    from.iter().map(|p| to.distance(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_points(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::DegenerateObstacle("empty point set".into()));
    }
    Ok(directed(a, &nearest_index(b)).max(directed(b, &nearest_index(a))))
}

/// Hausdorff distance between the densified samples of two obstacles
/// (boundary or chain at spacing `step`, plus interior lattice points for
/// regions).
pub fn hausdorff_distance_with_step(a: &Obstacle, b: &Obstacle, step: f64) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    if !(step > 0.0) {
        return Err(Error::Precondition(format!("densification step must be positive, got {step}")));
    }
    hausdorff_points(&a.sample_points(step), &b.sample_points(step))
}

/// As [`hausdorff_distance_with_step`] with a step of 1/400 of the joint
/// bounding-box diagonal.
pub fn hausdorff_distance(a: &Obstacle, b: &Obstacle) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let diag = a.bbox().union(&b.bbox()).diagonal();
    let step = if diag > 0.0 { diag / 400.0 } else { 1.0 };
    hausdorff_distance_with_step(a, b, step)
}

/// Segment-union approximation of K: a greedy (1/n)-net of dense samples of
/// K, joined by every segment between centers whose 1/n-disks meet. The
/// result lies within Hausdorff distance 2/n of K.
pub fn segment_approximation(obstacle: &Obstacle, n: usize) -> Result<Obstacle> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    obstacle.validate()?;
    let r = 1.0 / n as f64;
    let samples = obstacle.sample_points(r / 4.0);
    // Hash grid of cell size r over the chosen centers.
    let mut cells: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    let key = |p: &Point| ((p.x / r).floor() as i64, (p.y / r).floor() as i64);
    let mut centers: Vec<Point> = Vec::new();
    for p in &samples {
        let (ci, cj) = key(p);
        let covered = (ci - 1..=ci + 1).any(|i| {
            (cj - 1..=cj + 1).any(|j| {
                cells
                    .get(&(i, j))
                    .is_some_and(|v| v.iter().any(|&k| (centers[k] - p).norm() < r))
            })
        });
        if !covered {
            cells.entry((ci, cj)).or_default().push(centers.len());
            centers.push(*p);
        }
    }
    let mut edges = Vec::new();
    for (k, c) in centers.iter().enumerate() {
        let (ci, cj) = key(c);
        for i in ci - 2..=ci + 2 {
            for j in cj - 2..=cj + 2 {
                if let Some(v) = cells.get(&(i, j)) {
                    for &m in v {
                        if m > k && (centers[m] - c).norm() <= 2.0 * r {
                            edges.push([k, m]);
                        }
                    }
                }
            }
        }
    }
    edges.sort();
    Ok(Obstacle::Chain(Chain {
        vertices: centers,
        edges,
    }))
}
