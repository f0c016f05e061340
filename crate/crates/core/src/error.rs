use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate obstacle: {0}")]
    DegenerateObstacle(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("bounding box does not contain the obstacle with the required margin {margin}")]
    BoxTooSmall { margin: f64 },

    #[error("eps under-resolved: eps = {eps} is below 2h = {min}")]
    EpsUnderResolved { eps: f64, min: f64 },

    #[error("self-intersecting parametrization: r({theta}) = {r} is not positive")]
    SelfIntersecting { theta: f64, r: f64 },

    #[error("domain fully blocked: no interior grid nodes remain")]
    DomainFullyBlocked,

    #[error("too few interior nodes: {found} (at least {required} required)")]
    TooFewInteriorNodes { found: usize, required: usize },

    #[error("eigensolver did not converge after {iterations} iterations (last Rayleigh quotient {rayleigh}, residual {residual})")]
    NoConvergence {
        iterations: usize,
        rayleigh: f64,
        residual: f64,
    },

    #[error("linear solver failure: {0}")]
    LinearSolver(String),

    #[error("insufficient stencil clearance at ({x}, {y}): distance {distance} to the domain boundary is below 3h = {required}")]
    InsufficientClearance {
        x: f64,
        y: f64,
        distance: f64,
        required: f64,
    },

    #[error("root bracketing failed: {0}")]
    Bracketing(String),

    #[error("infeasible perimeter budget L = {budget}: the assumption L < H¹(∂Ω) = {limit} is violated")]
    InfeasibleBudget { budget: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
