//! Fractional operators on graded grids.
//!
//! The operators are built around one discretization convention: grid
//! functions are piecewise linear between nodes with first-kind jumps allowed
//! only at nodes, and every singular kernel (the Riemann-Liouville kernel,
//! the Caputo kernel, the `(t1-t)^(beta-1)` weight) is integrated exactly
//! against that representation. Classical orders `alpha = 1`, `beta = 1` run
//! through the same code paths with degenerate kernels.

mod caputo;
mod grid;
mod integrals;
pub(crate) mod quadrature;
mod sample;
mod trajectory;

pub use caputo::caputo_left;
pub use grid::{Grid, Interval, Orders, Regime};
pub use integrals::{integral_matrix, rl_integral_left, rl_integral_right_weighted};
pub use sample::PiecewiseSample;
pub use trajectory::{reconstruct, FracTrajectory};

pub(crate) use sample::norm;

use thiserror::Error;

/// Errors from grid construction and operator evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum OpsError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("interval requires finite t0 < t1, got [{t0}, {t1}]")]
    InvalidInterval { t0: f64, t1: f64 },
    #[error("cell count must be an even integer >= 8, got {0}")]
    BadCellCount(usize),
    #[error("grading exponent must be >= 1, got {0}")]
    BadGradingExponent(f64),
    #[error("nodes must start at t0 and end at t1")]
    NodesDontSpanInterval,
    #[error("nodes must be strictly increasing")]
    NodesNotIncreasing,
    #[error("point {t} outside [{t0}, {t1}]")]
    PointOutsideInterval { t: f64, t0: f64, t1: f64 },
    #[error("sample has {got} node values, grid has {expected} nodes")]
    SampleLengthMismatch { expected: usize, got: usize },
    #[error("sample values must share one nonzero dimension")]
    InconsistentDimension,
    #[error("sample values must be finite")]
    NonFiniteSample,
    #[error("corner index {0} is not an interior node")]
    CornerNotInterior(usize),
    #[error("corner indices must be strictly increasing")]
    CornersNotSorted,
    #[error("operation requires a continuous sample (no corners)")]
    CornersNotAllowed,
    #[error("samples live on different grids")]
    GridMismatch,
    #[error("target grid is not a refinement of the sample's grid")]
    NotARefinement,
    #[error("evaluation diverged near t = {t}")]
    Diverged { t: f64 },
}

/// Convenience constructor matching the operator vocabulary: a two-sided
/// graded mesh whose exponent comes from the problem orders.
pub fn make_graded_grid(
    interval: Interval,
    n_cells: usize,
    orders: &Orders,
) -> Result<Grid, OpsError> {
    Grid::graded(interval, n_cells, orders)
}

/// `int_{t0}^{t1} (t1-t)^gamma g(t) dt`, exact for the piecewise-linear
/// (corner-aware) sample `g`; requires `gamma > -1`. This is the quadrature
/// backbone of the weighted functional and of the pairing integrals in the
/// fundamental-lemma tests.
pub fn weighted_power_pairing(gamma: f64, g: &PiecewiseSample) -> Result<Vec<f64>, OpsError> {
    if !(gamma > -1.0) || !gamma.is_finite() {
        return Err(OpsError::InvalidBeta(gamma + 1.0));
    }
    Ok(quadrature::weighted_pair(gamma, g))
}
