use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::shapes::{densify, Polygon};

/// Lower bound on L*(Ω), the largest perimeter of a closed convex subset of
/// the closure of Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexBound {
    pub value: f64,
    /// Set when Ω is convex, in which case `value` = SM¹(Ω̄) = L*(Ω).
    pub exact: bool,
    /// Indices of candidates rejected as non-convex or not inside Ω̄.
    pub skipped: Vec<usize>,
}

fn inside_closure(domain: &Domain, poly: &Polygon) -> bool {
    let scale = domain.bbox().diagonal();
    let tol = 1e-9 * scale;
    let step = scale / 1024.0;
    let n = poly.vertices.len();
    let boundary: Vec<_> = (0..n)
        .flat_map(|i| densify(&poly.vertices[i], &poly.vertices[(i + 1) % n], step, true))
        .collect();
    let in_outer = boundary.iter().all(|p| domain.outer.signed_distance(p) <= tol);
    let avoids_holes = domain.holes.iter().all(|h| {
        boundary.iter().all(|p| h.signed_distance(p) >= -tol)
            && (n < 3 || !poly.contains(&h.center()))
    });
    in_outer && avoids_holes
}

/// The maximum SM¹ over the admissible candidates (two-vertex candidates are
/// chords, with SM¹ twice their length). For convex Ω the exact value
/// SM¹(Ω̄) is returned instead.
pub fn convex_perimeter_bound(domain: &Domain, candidates: &[Polygon]) -> ConvexBound {
    let mut best: f64 = 0.0;
    let mut skipped = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let convex = match c.vertices.len() {
            2 => c.vertices[0] != c.vertices[1],
            n if n >= 3 => c.is_convex(),
            _ => false,
        };
        if !convex {
            log::warn!("candidate {i} skipped: not a convex polygon");
            skipped.push(i);
            continue;
        }
        if !inside_closure(domain, c) {
            log::warn!("candidate {i} skipped: not contained in the closed domain");
            skipped.push(i);
            continue;
        }
        // A two-vertex ring walks the chord twice, which is its SM¹.
        best = best.max(c.perimeter());
    }
    if domain.is_convex() {
        return ConvexBound {
            value: domain.outer.perimeter(),
            exact: true,
            skipped,
        };
    }
    ConvexBound {
        value: best,
        exact: false,
        skipped,
    }
}
