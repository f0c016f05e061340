use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::assemble::DirichletProblem;
use crate::error::{Error, Result};
use crate::geometry::ScalarField;

/// Inner solver of the inverse iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSolver {
    /// Sparse Cholesky of A − σI with an adaptive shift σ < λ₁; the shift
    /// is only accepted when the factorization succeeds, which certifies
    /// σ < λ₁.
    #[default]
    Cholesky,
    /// Unshifted iteration with Jacobi-preconditioned conjugate gradients.
    ConjugateGradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Stop when successive Rayleigh quotients differ by less than tol·λ...
    pub tol: f64,
    /// ...and ‖Au − λu‖ ≤ residual_tol·λ‖u‖.
    pub residual_tol: f64,
    pub max_iter: usize,
    pub solver: LinearSolver,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            residual_tol: 1e-6,
            max_iter: 500,
            solver: LinearSolver::Cholesky,
        }
    }
}

impl EigenOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Previous eigenpair used to seed a nearby solve.
#[derive(Clone, Copy, Debug)]
pub struct WarmStart<'a> {
    pub field: &'a ScalarField,
    pub lambda: f64,
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Nonnegative on each component, h²Σu² = 1.
    pub u1: ScalarField,
    /// ‖Au − λu‖ / (λ‖u‖).
    pub residual: f64,
    pub iterations: usize,
    pub h: f64,
    pub n_interior: usize,
    /// Connected component of Ω\K carrying most of u₁.
    pub component: usize,
    pub n_components: usize,
    /// Final shift of the inverse iteration.
    pub shift: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

struct CholeskyShift {
    symbolic: SymbolicLlt<usize>,
    factor: Llt<usize, f64>,
    shift: f64,
}

impl CholeskyShift {
    fn try_factor(
        problem: &DirichletProblem,
        symbolic: &SymbolicLlt<usize>,
        shift: f64,
    ) -> Option<Llt<usize, f64>> {
        let n = problem.n_interior();
        let t: Vec<_> = problem
            .lower_triplets(shift)
            .into_iter()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t).ok()?;
        Llt::try_new_with_symbolic(symbolic.clone(), a.as_ref(), Side::Lower).ok()
    }

    fn new(problem: &DirichletProblem, hint: Option<f64>) -> Result<Self> {
        let n = problem.n_interior();
        let t: Vec<_> = problem
            .lower_triplets(0.0)
            .into_iter()
            .map(|(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &t)
            .map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        let symbolic = SymbolicLlt::try_new(a.symbolic(), Side::Lower)
            .map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
        if let Some(l) = hint.filter(|l| *l > 0.0) {
            let s = 0.9 * l;
            if let Some(f) = Self::try_factor(problem, &symbolic, s) {
                return Ok(Self {
                    symbolic,
                    factor: f,
                    shift: s,
                });
            }
        }
        let factor = Llt::try_new_with_symbolic(symbolic.clone(), a.as_ref(), Side::Lower)
            .map_err(|e| Error::LinearSolver(format!("operator is not positive definite: {e:?}")))?;
        Ok(Self {
            symbolic,
            factor,
            shift: 0.0,
        })
    }

    /// Moves the shift towards `target`, backing off by bisection when the
    /// factorization reports a shift at or above λ₁.
    fn advance(&mut self, problem: &DirichletProblem, target: f64) -> bool {
        let mut s = target;
        for _ in 0..6 {
            if s <= self.shift {
                return false;
            }
            if let Some(f) = Self::try_factor(problem, &self.symbolic, s) {
                self.factor = f;
                self.shift = s;
                return true;
            }
            s = 0.5 * (s + self.shift);
        }
        false
    }

    fn solve(&self, x: &[f64]) -> Vec<f64> {
        let rhs = Mat::<f64>::from_fn(x.len(), 1, |i, _| x[i]);
        let y = self.factor.solve(&rhs);
        (0..x.len()).map(|i| y[(i, 0)]).collect()
    }
}

/// Jacobi-preconditioned CG for A y = b, starting from `y`.
fn pcg(problem: &DirichletProblem, b: &[f64], y: &mut [f64], rel_tol: f64) -> Result<usize> {
    let n = b.len();
    let mut ay = vec![0.0; n];
    problem.apply(y, &mut ay);
    let mut r: Vec<f64> = b.iter().zip(&ay).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&problem.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let bnorm = dot(b, b).sqrt();
    let mut ap = vec![0.0; n];
    let max_iter = 20 * n.max(100);
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            return Ok(it);
        }
        problem.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            y[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / problem.diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolver(format!("CG did not converge in {max_iter} iterations")))
}

/// Smallest eigenpair with default options and the given relative
/// tolerance.
pub fn smallest_eigenpair(problem: &DirichletProblem, tol: f64) -> Result<EigenResult> {
    smallest_eigenpair_with(problem, &EigenOptions::with_tol(tol), None)
}

/// Inverse iteration for the smallest eigenvalue of the discrete operator.
pub fn smallest_eigenpair_with(
    problem: &DirichletProblem,
    options: &EigenOptions,
    warm: Option<WarmStart<'_>>,
) -> Result<EigenResult> {
    if !(options.tol > 0.0 && options.residual_tol > 0.0) {
        return Err(Error::Precondition("eigen tolerances must be positive".into()));
    }
    let n = problem.n_interior();
    let mut x: Vec<f64> = match warm {
        Some(w) if w.field.grid == problem.grid => {
            let v = problem.from_grid_values(&w.field.values);
            if v.iter().any(|a| *a > 0.0) {
                v.iter().map(|a| a.max(0.0) + 1e-3).collect()
            } else {
                vec![1.0; n]
            }
        }
        Some(w) => {
            // Different lattice: resample.
            problem
                .nodes
                .iter()
                .map(|&node| {
                    let (i, j) = problem.grid.coords(node);
                    w.field.bilinear(&problem.grid.node(i, j)).unwrap_or(0.0).max(0.0) + 1e-3
                })
                .collect()
        }
        None => vec![1.0; n],
    };
    normalize(&mut x);

    let mut chol = match options.solver {
        LinearSolver::Cholesky => Some(CholeskyShift::new(problem, warm.map(|w| w.lambda))?),
        LinearSolver::ConjugateGradient => None,
    };
    let mut ax = vec![0.0; n];
    let mut mu_prev = f64::NAN;
    let mut mu = f64::NAN;
    let mut res = f64::INFINITY;
    let mut since_shift = 0;
    let mut refactors = 0;
    for it in 1..=options.max_iter {
        let mut y = match &chol {
            Some(c) => c.solve(&x),
            None => {
                let mut y: Vec<f64> = x.iter().map(|v| v / mu.max(1e-300)).collect();
                if !mu.is_finite() {
                    y.iter_mut().for_each(|v| *v = 0.0);
                }
                pcg(problem, &x, &mut y, (0.01 * options.tol).min(1e-10))?;
                y
            }
        };
        normalize(&mut y);
        x = y;
        problem.apply(&x, &mut ax);
        mu = dot(&x, &ax);
        res = ax
            .iter()
            .zip(&x)
            .map(|(a, v)| (a - mu * v).powi(2))
            .sum::<f64>()
            .sqrt();
        let rel = res / mu;
        let converged = (mu - mu_prev).abs() <= options.tol * mu && rel <= options.residual_tol;
        if converged {
            return Ok(finish(problem, x, mu, rel, it, chol.map_or(0.0, |c| c.shift)));
        }
        log::trace!("inverse iteration {it}: rq = {mu}, residual = {rel:e}");
        mu_prev = mu;
        since_shift += 1;
        if let Some(c) = chol.as_mut() {
            // Re-shift once the Rayleigh quotient has settled a little, and
            // only when the new shift halves the distance to it.
            let target = mu - 2.0 * res;
            if since_shift >= 2 && refactors < 40 && mu - target < 0.5 * (mu - c.shift) && c.advance(problem, target) {
                refactors += 1;
                since_shift = 0;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: options.max_iter,
        rayleigh: mu,
        residual: res / mu,
    })
}

fn finish(
    problem: &DirichletProblem,
    mut x: Vec<f64>,
    lambda: f64,
    residual: f64,
    iterations: usize,
    shift: f64,
) -> EigenResult {
    let (label, count) = problem.components();
    // Fix the sign per component; take the component with most mass.
    let mut mass = vec![0.0; count];
    let mut signed = vec![0.0; count];
    for (k, v) in x.iter().enumerate() {
        mass[label[k]] += v * v;
        signed[label[k]] += v;
    }
    for (k, v) in x.iter_mut().enumerate() {
        if signed[label[k]] < 0.0 {
            *v = -*v;
        }
    }
    let component = (0..count)
        .max_by(|a, b| mass[*a].total_cmp(&mass[*b]))
        .unwrap_or(0);
    let h = problem.h;
    let scale = 1.0 / (h * dot(&x, &x).sqrt());
    x.iter_mut().for_each(|v| *v *= scale);
    let values = problem.to_grid_values(&x);
    EigenResult {
        lambda1: lambda,
        u1: ScalarField {
            grid: problem.grid,
            values,
        },
        residual,
        iterations,
        h,
        n_interior: problem.n_interior(),
        component,
        n_components: count,
        shift,
    }
}

/// Discrete Rayleigh quotient of a grid field restricted to the interior
/// nodes.
pub fn rayleigh_quotient(problem: &DirichletProblem, field: &ScalarField) -> Result<f64> {
    if field.grid != problem.grid {
        return Err(Error::Precondition("field is not on the problem grid".into()));
    }
    let v = problem.from_grid_values(&field.values);
    if v.iter().all(|a| *a == 0.0) {
        return Err(Error::Precondition("test field vanishes at all interior nodes".into()));
    }
    Ok(problem.rayleigh_quotient(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point, Domain, Polygon, Shape};
    use crate::spectral::assemble::{assemble, assemble_with, BoundaryTreatment};
    use std::f64::consts::PI;

    fn square() -> Domain {
        Domain::new(
            Shape::Polygon(Polygon::rectangle(point(0.0, 0.0), point(1.0, 1.0))),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn square_matches_closed_form_stencil_eigenvalue() {
        // Discrete λ₁ = 2·(4/h²) sin²(πh/2) on the unit square.
        let h = 1.0 / 16.0;
        let exact = 8.0 / (h * h) * (PI * h / 2.0).sin().powi(2);
        for solver in [LinearSolver::Cholesky, LinearSolver::ConjugateGradient] {
            let p = assemble(&square(), None, h).unwrap();
            let opts = EigenOptions {
                solver,
                ..EigenOptions::default()
            };
            let r = smallest_eigenpair_with(&p, &opts, None).unwrap();
            assert!((r.lambda1 - exact).abs() < 1e-7 * exact, "{solver:?}: {}", r.lambda1);
            assert!(r.u1.values.iter().all(|v| *v >= -1e-12));
            let norm: f64 = r.u1.values.iter().map(|v| v * v).sum::<f64>() * h * h;
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn warm_start_reproduces_the_eigenpair() {
        let d = Domain::disk(point(0.0, 0.0), 1.0).unwrap();
        let p = assemble_with(&d, None, 1.0 / 32.0, BoundaryTreatment::Corrected).unwrap();
        let cold = smallest_eigenpair(&p, 1e-10).unwrap();
        let warm = smallest_eigenpair_with(
            &p,
            &EigenOptions::with_tol(1e-10),
            Some(WarmStart {
                field: &cold.u1,
                lambda: cold.lambda1,
            }),
        )
        .unwrap();
        assert!((warm.lambda1 - cold.lambda1).abs() < 1e-9 * cold.lambda1);
        assert!(warm.iterations <= cold.iterations);
    }

    #[test]
    fn iteration_cap_reports_last_rayleigh_quotient() {
        let p = assemble(&square(), None, 1.0 / 16.0).unwrap();
        let opts = EigenOptions {
            max_iter: 1,
            ..EigenOptions::default()
        };
        match smallest_eigenpair_with(&p, &opts, None) {
            Err(Error::NoConvergence { rayleigh, .. }) => assert!(rayleigh > 0.0),
            other => panic!("{other:?}"),
        }
    }
}
