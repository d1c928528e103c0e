//! Numerical fractional calculus of variations.
//!
//! The crate evaluates the machinery of variational problems whose functional
//! is a `(t1-t)^(beta-1)`-weighted integral of a Lagrangian in `t`, the
//! trajectory, and its Caputo derivative of order `alpha` in `(0, 1]`:
//!
//! * [`fracops`] — graded grids, Riemann-Liouville integrals, Caputo
//!   derivatives, and trajectory reconstruction;
//! * [`dsl`] — a small expression language for Lagrangians with exact
//!   forward-mode derivatives;
//! * [`conditions`] — first- and second-order necessary conditions
//!   (Euler-Lagrange residuals, the derivative-free chord inequality, the
//!   Weierstrass excess, Legendre, and both corner conditions) with verdicts
//!   and witnesses;
//! * [`variations`] — the constructive variations behind those conditions,
//!   usable as self-tests and descent probes;
//! * [`solver`] — a direct Ritz-type solver over Caputo-derivative samples,
//!   with an isoperimetric outer loop and built-in analytic fixtures.
//!
//! Everything is immutable after construction and all operations are pure;
//! scans and multi-point evaluations are data-parallel.

pub mod conditions;
pub mod dsl;
pub mod fracops;
pub mod problem;
pub mod solver;
pub mod special;
pub mod testkit;
pub mod variations;

pub use conditions::{
    abxi_inequality, corner_conditions, el_residual, isoperimetric_el_residual, legendre_check,
    weierstrass_gap, weierstrass_scan, CheckError, ConditionKind, ConditionReport, ScanMode,
    ScanSpec, Verdict, Witness, WitnessParams,
};
pub use dsl::{eval_jet, parse_lagrangian, JetValue, LagrangianExpr};
pub use fracops::{
    caputo_left, make_graded_grid, reconstruct, rl_integral_left, rl_integral_right_weighted,
    FracTrajectory, Grid, Interval, Orders, OpsError, PiecewiseSample, Regime,
};
pub use problem::{weighted_functional, Constraint, Problem, ProblemError};
pub use solver::{
    analytic_fixture, solve_direct, solve_isoperimetric, ConstraintSolver, FixtureName,
    SolveError, SolveOptions, SolveResult,
};
pub use variations::{
    build_dbr_variation, build_special_variation, descent_probe, DuBoisReymondVariation,
    SpecialVariation, VariationError,
};
