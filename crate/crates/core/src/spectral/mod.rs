//! Finite-difference Dirichlet Laplacian on Ω\K and its first eigenpair.

pub mod assemble;
pub mod eigen;
pub mod gradient;

pub use assemble::{assemble, assemble_with, BoundaryTreatment, DirichletProblem, NodeKind};
pub use eigen::{
    rayleigh_quotient, smallest_eigenpair, smallest_eigenpair_with, EigenOptions, EigenResult,
    LinearSolver, WarmStart,
};
pub use gradient::{
    boundary_gradient_sq, chain_gradient_jump, fit_multiplier, free_boundary_gradient_sq,
    lagrange_multiplier, normal_derivative_sq, ChainJump,
};
