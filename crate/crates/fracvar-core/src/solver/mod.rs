//! Direct (Ritz-type) solver: optimize over Caputo-derivative samples.

mod direct;
mod fixtures;
mod isoperimetric;

pub use direct::solve_direct;
pub use fixtures::{analytic_fixture, FixtureName};
pub use isoperimetric::solve_isoperimetric;

use thiserror::Error;

use crate::fracops::{FracTrajectory, OpsError};
use crate::problem::ProblemError;

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("invalid solver option: {0}")]
    BadOptions(String),
    #[error("Lagrangian is not differentiable at an iterate (t = {t})")]
    NonSmoothAtIterate { t: f64 },
    #[error("solve_direct does not handle constraints; use solve_isoperimetric")]
    HasConstraints,
    #[error("isoperimetric solve requires exactly one constraint, got {0}")]
    NeedsOneConstraint(usize),
    #[error(
        "no sign change for the multiplier in [{lo}, {hi}] (constraint residuals {f_lo:.3e} .. {f_hi:.3e})"
    )]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("fixture {fixture} requires beta <= alpha, got alpha = {alpha}, beta = {beta}")]
    RegimeMismatch { fixture: String, alpha: f64, beta: f64 },
    #[error("fixture grids live on [0, 1]; got [{t0}, {t1}]")]
    FixtureInterval { t0: f64, t1: f64 },
}

/// Root-finding method for the isoperimetric multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSolver {
    /// Bracket, a few bisection steps, then secant polish.
    Newton,
    /// Bracket and bisect to tolerance.
    Bisection,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Increasing quadratic-penalty schedule for the endpoint constraint.
    pub endpoint_penalty: Vec<f64>,
    pub endpoint_tol: f64,
    pub constraint_solver: ConstraintSolver,
    /// Nonzero seeds add a deterministic perturbation to the initial iterate.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 40_000,
            grad_tol: 1e-9,
            endpoint_penalty: vec![1e2, 1e4, 1e6],
            endpoint_tol: 1e-9,
            constraint_solver: ConstraintSolver::Newton,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub(crate) fn validate(&self) -> Result<(), SolveError> {
        if !(self.grad_tol > 0.0) || !(self.endpoint_tol > 0.0) {
            return Err(SolveError::BadOptions("tolerances must be positive".into()));
        }
        if self.endpoint_penalty.is_empty()
            || self.endpoint_penalty.windows(2).any(|w| w[1] <= w[0])
            || self.endpoint_penalty.iter().any(|&p| !(p > 0.0))
        {
            return Err(SolveError::BadOptions(
                "endpoint_penalty must be a positive increasing schedule".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(SolveError::BadOptions("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub traj: FracTrajectory,
    /// Value of the base functional `J0` at the solution.
    pub j_value: f64,
    pub multipliers: Option<(f64, Vec<f64>)>,
    pub endpoint_residual: f64,
    pub constraint_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}
