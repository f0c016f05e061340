use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::distance::DistanceOracle;
use crate::geometry::{Domain, Grid, Obstacle, ObstacleKind, Point, Shape};

/// How Dirichlet boundaries that fall between grid nodes are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTreatment {
    /// Nodes within h/2 of ∂Ω or K are Dirichlet; first-order staircase.
    #[default]
    Masked,
    /// Every node strictly inside Ω\K is a degree of freedom, and an arm
    /// cut by the boundary at fraction θ of a step contributes 1/(θh²) to
    /// the diagonal (linear extrapolation through the zero boundary value).
    /// Symmetric, second order for smooth boundaries.
    Corrected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    Dirichlet,
}

pub const NO_NEIGHBOR: u32 = u32::MAX;
pub const MIN_INTERIOR_NODES: usize = 9;

/// Offsets in stencil order: east, west, north, south.
const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Five-point discretization of −Δ on Ω\K with homogeneous Dirichlet data.
#[derive(Clone, Debug)]
pub struct DirichletProblem {
    pub domain: Domain,
    pub obstacle: Option<Obstacle>,
    pub h: f64,
    pub treatment: BoundaryTreatment,
    pub grid: Grid,
    pub mask: Vec<NodeKind>,
    /// Node index → equation index, or [`NO_NEIGHBOR`].
    pub equation: Vec<u32>,
    /// Equation index → node index.
    pub nodes: Vec<usize>,
    /// Diagonal entries (already scaled by 1/h²).
    pub diag: Vec<f64>,
    /// Coupled neighbors per equation; each coupling has weight −1/h².
    pub neighbors: Vec<[u32; 4]>,
}

/// A region component of the blocked set with a level function positive on
/// the free side.
enum Blocker<'a> {
    Outer(&'a Shape),
    Hole(&'a Shape),
    Obstacle(&'a Obstacle),
}

impl Blocker<'_> {
    fn free_level(&self, p: &Point) -> f64 {
        match self {
            Blocker::Outer(s) => -s.signed_distance(p),
            Blocker::Hole(s) => s.signed_distance(p),
            Blocker::Obstacle(o) => o.level(p).expect("region obstacle"),
        }
    }
}

/// Fraction t ∈ (0, 1] along p → q where `f` (positive at p, ≤ 0 at q)
/// first vanishes, by the Illinois variant of regula falsi.
fn arm_root(f: impl Fn(f64) -> f64, fp: f64, fq: f64) -> f64 {
    let (mut a, mut b) = (0.0, 1.0);
    let (mut fa, mut fb) = (fp, fq);
    if fb == 0.0 {
        // The zero may be at q itself or earlier; refine anyway.
        fb = -f64::MIN_POSITIVE;
    }
    let mut side = 0i8;
    for _ in 0..100 {
        let t = (a * fb - b * fa) / (fb - fa);
        let ft = f(t);
        if ft > 0.0 {
            a = t;
            fa = ft;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = t;
            fb = if ft == 0.0 { -f64::MIN_POSITIVE } else { ft };
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    b.max(1e-12)
}

impl DirichletProblem {
    pub fn n_interior(&self) -> usize {
        self.nodes.len()
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let w = 1.0 / (self.h * self.h);
        y.par_iter_mut().enumerate().for_each(|(k, yk)| {
            let mut s = self.diag[k] * x[k];
            for &m in &self.neighbors[k] {
                if m != NO_NEIGHBOR {
                    s -= w * x[m as usize];
                }
            }
            *yk = s;
        });
    }

    /// vᵀAv / vᵀv over interior values.
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let mut av = vec![0.0; v.len()];
        self.apply(v, &mut av);
        let num: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().map(|a| a * a).sum();
        num / den
    }

    /// Lower-triangle triplets of A − σI.
    pub fn lower_triplets(&self, shift: f64) -> Vec<(usize, usize, f64)> {
        let w = -1.0 / (self.h * self.h);
        let mut t = Vec::with_capacity(3 * self.nodes.len());
        for k in 0..self.nodes.len() {
            t.push((k, k, self.diag[k] - shift));
            for &m in &self.neighbors[k] {
                if m != NO_NEIGHBOR && (m as usize) > k {
                    t.push((m as usize, k, w));
                }
            }
        }
        t
    }

    /// Connected components of the interior graph; returns per-equation
    /// labels and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.nodes.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(k) = stack.pop() {
                for &m in &self.neighbors[k] {
                    if m != NO_NEIGHBOR && label[m as usize] == usize::MAX {
                        label[m as usize] = count;
                        stack.push(m as usize);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Interior values scattered onto the full grid (zero elsewhere).
    pub fn to_grid_values(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.grid.len()];
        for (k, &node) in self.nodes.iter().enumerate() {
            v[node] = x[k];
        }
        v
    }

    /// Grid values gathered at the interior nodes.
    pub fn from_grid_values(&self, v: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&n| v[n]).collect()
    }
}

/// Builds the discrete Dirichlet Laplacian on Ω\K with the default masked
/// boundary treatment.
pub fn assemble(domain: &Domain, obstacle: Option<&Obstacle>, h: f64) -> Result<DirichletProblem> {
    assemble_with(domain, obstacle, h, BoundaryTreatment::Masked)
}

pub fn assemble_with(
    domain: &Domain,
    obstacle: Option<&Obstacle>,
    h: f64,
    treatment: BoundaryTreatment,
) -> Result<DirichletProblem> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Precondition(format!("h must be positive, got {h}")));
    }
    domain.validate()?;
    if let Some(o) = obstacle {
        o.validate()?;
        let outside = o
            .boundary_segments(h)
            .iter()
            .flat_map(|(a, b)| [*a, *b])
            .map(|p| domain.outer.signed_distance(&p))
            .fold(f64::NEG_INFINITY, f64::max);
        if outside > 0.5 * h {
            return Err(Error::Precondition(format!(
                "obstacle leaves the closed domain by {outside}"
            )));
        }
    }
    let grid = Grid::covering(&domain.bbox().expand(2.0 * h), h)?;

    let mut blockers = vec![Blocker::Outer(&domain.outer)];
    blockers.extend(domain.holes.iter().map(Blocker::Hole));
    let chain = obstacle.filter(|o| o.kind() == ObstacleKind::Chain);
    if let Some(o) = obstacle.filter(|o| o.kind() == ObstacleKind::Region) {
        blockers.push(Blocker::Obstacle(o));
    }
    let oracle = obstacle.map(DistanceOracle::new);

    let mask: Vec<NodeKind> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = grid.coords(k);
            let p = grid.node(i, j);
            let free = match treatment {
                BoundaryTreatment::Masked => {
                    domain.contains(&p)
                        && domain.boundary_distance(&p) >= 0.5 * h
                        && oracle.as_ref().map_or(true, |o| o.distance(&p) >= 0.5 * h)
                }
                BoundaryTreatment::Corrected => {
                    blockers.iter().all(|b| b.free_level(&p) > 0.0)
                        && chain.map_or(true, |c| c.distance(&p) > 1e-12 * h)
                }
            };
            if free {
                NodeKind::Interior
            } else {
                NodeKind::Dirichlet
            }
        })
        .collect();

    let mut equation = vec![NO_NEIGHBOR; grid.len()];
    let mut nodes = Vec::new();
    for (k, m) in mask.iter().enumerate() {
        if *m == NodeKind::Interior {
            equation[k] = nodes.len() as u32;
            nodes.push(k);
        }
    }
    if nodes.is_empty() {
        return Err(Error::DomainFullyBlocked);
    }
    if nodes.len() < MIN_INTERIOR_NODES {
        return Err(Error::TooFewInteriorNodes {
            found: nodes.len(),
            required: MIN_INTERIOR_NODES,
        });
    }

    let cuts = match (treatment, chain) {
        (BoundaryTreatment::Corrected, Some(c)) => chain_cuts(&grid, c),
        _ => HashMap::new(),
    };

    let w = 1.0 / (h * h);
    let rows: Vec<(f64, [u32; 4])> = nodes
        .par_iter()
        .map(|&node| {
            let (i, j) = grid.coords(node);
            let p = grid.node(i, j);
            let mut diag = 0.0;
            let mut nb = [NO_NEIGHBOR; 4];
            for (d, (di, dj)) in DIRS.iter().enumerate() {
                let (qi, qj) = (i as i64 + di, j as i64 + dj);
                let inside_grid =
                    qi >= 0 && qj >= 0 && (qi as usize) < grid.nx && (qj as usize) < grid.ny;
                let q_node = inside_grid.then(|| grid.index(qi as usize, qj as usize));
                let q_eq = q_node.map_or(NO_NEIGHBOR, |q| equation[q]);
                let cut = cuts.get(&(node, d)).copied();
                match treatment {
                    BoundaryTreatment::Masked => {
                        diag += w;
                        nb[d] = q_eq;
                    }
                    BoundaryTreatment::Corrected => {
                        if q_eq != NO_NEIGHBOR && cut.is_none() {
                            diag += w;
                            nb[d] = q_eq;
                            continue;
                        }
                        let q = p + Point::new(*di as f64, *dj as f64) * h;
                        let mut t = cut.unwrap_or(1.0);
                        if q_eq == NO_NEIGHBOR {
                            for b in &blockers {
                                let fq = b.free_level(&q);
                                if fq <= 0.0 {
                                    let fp = b.free_level(&p);
                                    let tb = arm_root(|s| b.free_level(&(p + (q - p) * s)), fp, fq);
                                    t = t.min(tb);
                                }
                            }
                        }
                        diag += w / t;
                    }
                }
            }
            (diag, nb)
        })
        .collect();
    let (diag, neighbors) = rows.into_iter().unzip();

    Ok(DirichletProblem {
        domain: domain.clone(),
        obstacle: obstacle.cloned(),
        h,
        treatment,
        grid,
        mask,
        equation,
        nodes,
        diag,
        neighbors,
    })
}

/// Arms (node, direction) crossed by a chain obstacle, with the crossing
/// fraction measured from that node.
fn chain_cuts(grid: &Grid, chain: &Obstacle) -> HashMap<(usize, usize), f64> {
    let mut cuts: HashMap<(usize, usize), f64> = HashMap::new();
    let h = grid.h;
    let record = |cuts: &mut HashMap<(usize, usize), f64>, a: usize, dir: usize, t: f64| {
        let e = cuts.entry((a, dir)).or_insert(t);
        *e = e.min(t);
    };
    let segs = chain.boundary_segments(h / 4.0);
    let circle = match chain {
        Obstacle::Circle(c) => Some(*c),
        _ => None,
    };
    let bb = chain.bbox().expand(h);
    let to_i = |x: f64| (((x - grid.origin.x) / h).floor().max(0.0) as usize).min(grid.nx - 1);
    let to_j = |y: f64| (((y - grid.origin.y) / h).floor().max(0.0) as usize).min(grid.ny - 1);
    let (i0, i1, j0, j1) = (to_i(bb.min.x), to_i(bb.max.x), to_j(bb.min.y), to_j(bb.max.y));
    for j in j0..=j1 {
        for i in i0..=i1 {
            let a = grid.index(i, j);
            let p = grid.node(i, j);
            // East arm (dir 0) and its reverse from the east node (dir 1);
            // north arm (dir 2) and its reverse (dir 3).
            for (dir, rev, (di, dj)) in [(0usize, 1usize, (1usize, 0usize)), (2, 3, (0, 1))] {
                if i + di >= grid.nx || j + dj >= grid.ny {
                    continue;
                }
                let b = grid.index(i + di, j + dj);
                let q = grid.node(i + di, j + dj);
                let hits: Vec<f64> = match circle {
                    Some(c) => {
                        let mut v = Vec::new();
                        if let Some(t) = c.segment_crossing(&p, &q) {
                            v.push(t);
                        }
                        if let Some(t) = c.segment_crossing(&q, &p) {
                            v.push(1.0 - t);
                        }
                        v
                    }
                    None => segs
                        .iter()
                        .filter_map(|(s0, s1)| {
                            crate::geometry::shapes::segment_crossing(&p, &q, s0, s1)
                        })
                        .collect(),
                };
                if hits.is_empty() {
                    continue;
                }
                let first = hits.iter().copied().fold(f64::INFINITY, f64::min);
                let last = hits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                record(&mut cuts, a, dir, first.max(1e-12));
                record(&mut cuts, b, rev, (1.0 - last).max(1e-12));
            }
        }
    }
    cuts
}
