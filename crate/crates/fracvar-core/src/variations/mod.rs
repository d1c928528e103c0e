//! Constructive variations: the Du Bois-Reymond constructions and the
//! four-branch special variation, plus a descent probe that turns violated
//! pointwise conditions into actual functional decrease.

mod dbr;
mod descent;
mod special_var;

pub use dbr::{build_dbr_variation, DuBoisReymondVariation};
pub use descent::descent_probe;
pub use special_var::{build_special_variation, max_admissible_eps, SpecialVariation};

use thiserror::Error;

use crate::fracops::OpsError;
use crate::problem::ProblemError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VariationError {
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("this construction is scalar; got dimension {0}")]
    ScalarOnly(usize),
    #[error("invalid variation parameter: {0}")]
    BadParams(String),
    #[error(
        "eps = {eps} violates the admissibility condition |k(eps)| < min(1, a/b); largest admissible eps is about {max_admissible:.6e}"
    )]
    EpsTooLarge { eps: f64, max_admissible: f64 },
    #[error("variation support [{lo}, {hi}) contains a corner of the trajectory at t = {t}")]
    CornerInSupport { t: f64, lo: f64, hi: f64 },
    #[error("closed-form and reconstructed variation disagree by {max_dev:.3e} (limit {limit:.3e})")]
    ConstructionMismatch { max_dev: f64, limit: f64 },
    #[error("endpoint residual |h(t1)| = {residual:.3e} exceeds {tol:.3e}; refine the grid")]
    EndpointResidual { residual: f64, tol: f64 },
}
