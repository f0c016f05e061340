//! Perimeter-constrained maximization of λ₁(Ω \ K) over star-shaped
//! Fourier obstacles, possibly glued to holes of Ω.

mod annulus;
mod ascent;
mod candidates;
mod config;
mod gradients;
mod symmetry;

pub use annulus::{annulus_experiment, glued_seeds, AnnulusReport, RadialCandidate, Winner};
pub use ascent::{
    default_seeds, maximize, maximize_from, maximize_runs, optimality, project_to_budget,
    Certification, HistoryEntry, ObstacleResult, RunStatus,
};
pub use candidates::{degenerate_rectangle, rectangle_limit, RectangleSample};
pub use config::{OptimizeConfig, Tolerances};
pub use gradients::{
    design_coefs, eigen_shape_gradient, perimeter_shape_gradient, ShapeGradient,
};
pub use symmetry::{circle_fit, symmetry_metrics, SymmetryMetrics};
