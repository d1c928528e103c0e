//! Built-in example problems with their closed-form candidate trajectories.

use std::fmt;
use std::str::FromStr;

use crate::dsl::parse_lagrangian;
use crate::fracops::{FracTrajectory, Grid, Interval, Orders, PiecewiseSample};
use crate::problem::{Constraint, Problem};
use crate::special::gamma;

use super::SolveError;

/// The three bundled examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureName {
    /// `L = y^5 + |y|`, `x(0) = x(1) = 0`, candidate `x = 0`.
    Example1,
    /// `L = y^3`, `x(0) = 0`, `x(1) = 1`; needs `beta <= alpha`.
    Example2,
    /// Isoperimetric `L0 = y^2` with `int (1-t)^(beta-1) x dt = 0`; needs
    /// `beta <= alpha`.
    Example51,
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureName::Example1 => write!(f, "1"),
            FixtureName::Example2 => write!(f, "2"),
            FixtureName::Example51 => write!(f, "51"),
        }
    }
}

impl FromStr for FixtureName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(FixtureName::Example1),
            "2" => Ok(FixtureName::Example2),
            "51" => Ok(FixtureName::Example51),
            other => Err(format!("unknown example '{other}', expected 1, 2, or 51")),
        }
    }
}

/// Multiplier `mu1` of the isoperimetric fixture under `mu0 = 1/2`.
pub fn example51_mu1(alpha: f64, beta: f64) -> f64 {
    2.0 * alpha * (4.0 * alpha * alpha - beta * beta) * gamma(alpha) * gamma(alpha + beta)
        / (beta * beta * gamma(beta))
}

/// Constant `k` of the isoperimetric fixture's Euler-Lagrange identity.
pub fn example51_k(alpha: f64, beta: f64) -> f64 {
    4.0 * (2.0 * alpha - beta) * gamma(alpha + 1.0).powi(2) / (beta * beta)
}

/// Derivative samples of the Example 5.1 closed-form solution.
pub fn example51_psi(alpha: f64, beta: f64, t: f64) -> f64 {
    example51_k(alpha, beta) / gamma(alpha) * (1.0 - t).powf(alpha - beta)
        - example51_mu1(alpha, beta) * gamma(beta) / gamma(alpha + beta) * (1.0 - t).powf(alpha)
}

/// Derivative samples of the Example 2 closed-form extremal.
pub fn example2_psi(alpha: f64, beta: f64, t: f64) -> f64 {
    (3.0 * alpha - beta) * gamma(alpha) / 2.0 * (1.0 - t).powf(0.5 * (alpha - beta))
}

/// Builds a fixture problem and the candidate trajectory sampled on `grid`.
pub fn analytic_fixture(
    name: FixtureName,
    alpha: f64,
    beta: f64,
    grid: &Grid,
) -> Result<(Problem, FracTrajectory), SolveError> {
    let iv = grid.interval();
    if iv != Interval::new(0.0, 1.0).map_err(SolveError::Ops)? {
        return Err(SolveError::FixtureInterval {
            t0: iv.t0(),
            t1: iv.t1(),
        });
    }
    let orders = Orders::new(alpha, beta)?;
    let needs_sub = matches!(name, FixtureName::Example2 | FixtureName::Example51);
    if needs_sub && beta > alpha {
        return Err(SolveError::RegimeMismatch {
            fixture: name.to_string(),
            alpha,
            beta,
        });
    }
    let (problem, psi): (Problem, PiecewiseSample) = match name {
        FixtureName::Example1 => {
            let p = Problem::new(
                orders,
                iv,
                parse_lagrangian("y^5 + abs(y)", 1).unwrap(),
                vec![0.0],
                vec![0.0],
            )?;
            let psi = PiecewiseSample::constant(grid.clone(), vec![0.0])?;
            (p, psi)
        }
        FixtureName::Example2 => {
            let p = Problem::new(
                orders,
                iv,
                parse_lagrangian("y^3", 1).unwrap(),
                vec![0.0],
                vec![1.0],
            )?;
            let psi = PiecewiseSample::from_fn(grid.clone(), 1, |t| {
                vec![example2_psi(alpha, beta, t)]
            })?;
            (p, psi)
        }
        FixtureName::Example51 => {
            let p = Problem::new(
                orders,
                iv,
                parse_lagrangian("y^2", 1).unwrap(),
                vec![0.0],
                vec![1.0],
            )?
            .with_constraint(Constraint {
                lagrangian: parse_lagrangian("x", 1).unwrap(),
                target: 0.0,
            })?
            .with_multipliers(0.5, vec![example51_mu1(alpha, beta)])?;
            let psi = PiecewiseSample::from_fn(grid.clone(), 1, |t| {
                vec![example51_psi(alpha, beta, t)]
            })?;
            (p, psi)
        }
    };
    let traj = FracTrajectory::new(problem.x0().to_vec(), psi, alpha)?;
    Ok((problem, traj))
}
