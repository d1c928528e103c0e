//! Candidate trajectories represented through their Caputo derivative.

use super::integrals::rl_integral_left;
use super::sample::PiecewiseSample;
use super::OpsError;

/// An element of `PC^alpha`: the initial value plus samples of
/// `psi = cD^alpha x`. The trajectory itself is recovered as
/// `x(t) = x0 + (I^alpha psi)(t)` and is continuous even where `psi` jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct FracTrajectory {
    x0: Vec<f64>,
    psi: PiecewiseSample,
    alpha: f64,
}

impl FracTrajectory {
    pub fn new(x0: Vec<f64>, psi: PiecewiseSample, alpha: f64) -> Result<Self, OpsError> {
        if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
            return Err(OpsError::InvalidAlpha(alpha));
        }
        if x0.len() != psi.dim() {
            return Err(OpsError::InconsistentDimension);
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(OpsError::NonFiniteSample);
        }
        Ok(FracTrajectory { x0, psi, alpha })
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn psi(&self) -> &PiecewiseSample {
        &self.psi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    /// `x(t) = x0 + (I^alpha psi)(t)` at each eval point.
    pub fn reconstruct(&self, eval_points: &[f64]) -> Result<Vec<Vec<f64>>, OpsError> {
        let mut xs = rl_integral_left(&self.psi, self.alpha, eval_points)?;
        for x in xs.iter_mut() {
            for (c, v) in x.iter_mut().enumerate() {
                *v += self.x0[c];
            }
        }
        Ok(xs)
    }

    /// Trajectory values at every grid node.
    pub fn x_at_nodes(&self) -> Result<Vec<Vec<f64>>, OpsError> {
        let pts = self.psi.grid().nodes().to_vec();
        self.reconstruct(&pts)
    }

    /// Endpoint value `x(t1)`.
    pub fn x_end(&self) -> Result<Vec<f64>, OpsError> {
        let t1 = self.psi.grid().interval().t1();
        Ok(self.reconstruct(&[t1])?.pop().unwrap())
    }

    /// The same trajectory on a refinement of its grid.
    pub fn resample(&self, fine: &super::Grid) -> Result<Self, OpsError> {
        Ok(FracTrajectory {
            x0: self.x0.clone(),
            psi: self.psi.resample(fine)?,
            alpha: self.alpha,
        })
    }
}

/// Free-function form of trajectory reconstruction.
pub fn reconstruct(traj: &FracTrajectory, eval_points: &[f64]) -> Result<Vec<Vec<f64>>, OpsError> {
    traj.reconstruct(eval_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracops::{Grid, Interval, Orders};
    use crate::special::gamma;
    use approx::assert_relative_eq;

    fn grid(n: usize, a: f64, b: f64) -> Grid {
        Grid::graded(
            Interval::new(0.0, 1.0).unwrap(),
            n,
            &Orders::new(a, b).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_psi_power_trajectory() {
        // psi = Gamma(1.5), alpha = 0.5: x(t) = t^0.5, so x(1) = 1
        let g = grid(32, 0.5, 0.5);
        let psi = PiecewiseSample::constant(g, vec![gamma(1.5)]).unwrap();
        let traj = FracTrajectory::new(vec![0.0], psi, 0.5).unwrap();
        let x = traj.reconstruct(&[1.0, 0.25]).unwrap();
        assert_relative_eq!(x[0][0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(x[1][0], 0.5, max_relative = 1e-13);
    }

    #[test]
    fn zero_psi_is_constant_trajectory() {
        let g = grid(16, 0.7, 1.0);
        let psi = PiecewiseSample::constant(g, vec![0.0]).unwrap();
        let traj = FracTrajectory::new(vec![5.0], psi, 0.7).unwrap();
        for x in traj.x_at_nodes().unwrap() {
            assert_eq!(x[0], 5.0);
        }
    }

    #[test]
    fn classical_unit_slope() {
        let g = grid(16, 1.0, 1.0);
        let psi = PiecewiseSample::constant(g, vec![1.0]).unwrap();
        let traj = FracTrajectory::new(vec![0.0], psi, 1.0).unwrap();
        let x = traj.reconstruct(&[0.3]).unwrap();
        assert_relative_eq!(x[0][0], 0.3, max_relative = 1e-14);
    }

    #[test]
    fn initial_value_exact() {
        let g = grid(16, 0.4, 0.8);
        let psi = PiecewiseSample::from_fn(g, 1, |t| vec![t.cos()]).unwrap();
        let traj = FracTrajectory::new(vec![-3.25], psi, 0.4).unwrap();
        assert_eq!(traj.reconstruct(&[0.0]).unwrap()[0][0], -3.25);
    }
}
