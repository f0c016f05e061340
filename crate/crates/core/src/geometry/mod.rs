//! Domains, obstacles, distance fields and outer Minkowski content.

pub mod convex;
pub mod distance;
pub mod domain;
pub mod field;
pub mod fourier;
pub mod hausdorff;
pub mod minkowski;
pub mod obstacle;
pub mod shapes;
pub mod star;

pub use convex::{convex_perimeter_bound, ConvexBound};
pub use distance::{distance_field, DistanceOracle};
pub use domain::Domain;
pub use field::{Grid, ScalarField};
pub use fourier::{Coef, FourierStar};
pub use hausdorff::{hausdorff_distance, hausdorff_distance_with_step, segment_approximation};
pub use minkowski::{
    default_eps_schedule, dilation_area, eps_schedule, outer_minkowski_content, EpsSample,
    MinkowskiEstimate, TOL_GRID_CONSTANT,
};
pub use obstacle::{AnnulusRegion, Chain, Obstacle, ObstacleKind, PolygonRegion};
pub use shapes::{point, BoundingBox, Circle, Point, Polygon, Shape};
pub use star::StarObstacle;

use crate::error::{Error, Result};

/// Signed curvature of a Fourier obstacle's boundary at θ.
pub fn boundary_curvature(obstacle: &Obstacle, theta: f64) -> Result<f64> {
    match obstacle {
        Obstacle::Star(s) => s.star.curvature(theta),
        _ => Err(Error::Precondition(
            "boundary curvature needs a Fourier obstacle".into(),
        )),
    }
}
