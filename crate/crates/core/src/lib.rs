//! Dirichlet eigenvalues of planar domains with obstacles, outer Minkowski
//! content of compact sets, and perimeter-constrained maximization of the
//! first eigenvalue over star-shaped obstacles.
//!
//! Module map:
//! - [`geometry`]: domains, obstacles, distance fields, Minkowski content,
//!   Hausdorff distance, Fourier stars and their curvature.
//! - [`spectral`]: finite-difference Dirichlet Laplacian, first eigenpair,
//!   boundary gradients and the Lagrange multiplier.
//! - [`analytic`]: Bessel functions and closed-form eigenvalues of disks,
//!   annuli and half-annuli.
//! - [`optimizer`]: shape gradients, projected ascent, symmetry metrics and
//!   the annulus experiment.
//! - [`io`]: JSON and CSV formats shared with the command-line tool.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod io;
pub mod optimizer;
pub mod spectral;

pub use error::{Error, Result};
