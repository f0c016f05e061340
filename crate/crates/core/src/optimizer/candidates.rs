use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point, Domain, Obstacle, Point};
use crate::spectral::{assemble_with, smallest_eigenpair_with, BoundaryTreatment, EigenOptions};

/// The rectangle with long side `a`–`b` and width `eps`, extending to the
/// left of a→b. It degenerates onto the segment as eps → 0.
pub fn degenerate_rectangle(a: Point, b: Point, eps: f64) -> Result<Obstacle> {
    let d = b - a;
    let len = d.norm();
    if !(len > 0.0 && eps > 0.0) {
        return Err(Error::DegenerateObstacle(
            "rectangle needs a positive side and width".into(),
        ));
    }
    let n = point(-d.y, d.x) * (eps / len);
    Ok(Obstacle::polygon(vec![a, b, b + n, a + n]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleSample {
    pub eps: f64,
    pub perimeter: f64,
    pub lambda1: f64,
}

/// λ₁(Ω \ K_ε) along a family of rectangles collapsing onto the segment
/// a–b. Segment obstacles are only reached through this limit.
pub fn rectangle_limit(
    domain: &Domain,
    a: Point,
    b: Point,
    widths: &[f64],
    h: f64,
) -> Result<Vec<RectangleSample>> {
    widths
        .iter()
        .map(|&eps| {
            let k = degenerate_rectangle(a, b, eps)?;
            let problem = assemble_with(domain, Some(&k), h, BoundaryTreatment::Corrected)?;
            let eig = smallest_eigenpair_with(&problem, &EigenOptions::default(), None)?;
            Ok(RectangleSample {
                eps,
                perimeter: k.exact_content(),
                lambda1: eig.lambda1,
            })
        })
        .collect()
}
