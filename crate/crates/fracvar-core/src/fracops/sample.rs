//! Piecewise-continuous grid functions with first-kind jumps.

use super::{Grid, OpsError};

/// Samples of a PC function on a grid.
///
/// `values[j]` is the value at node `j`; at a corner node it is the limit
/// from the right, and the left limit is stored separately. The function is
/// interpreted as piecewise linear between nodes, so a corner set that lives
/// exactly on nodes represents step discontinuities without smearing.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSample {
    grid: Grid,
    dim: usize,
    values: Vec<Vec<f64>>,
    /// Sorted interior node indices paired with the left-limit value there.
    corners: Vec<(usize, Vec<f64>)>,
}

impl PiecewiseSample {
    pub fn new(
        grid: Grid,
        values: Vec<Vec<f64>>,
        corners: Vec<(usize, Vec<f64>)>,
    ) -> Result<Self, OpsError> {
        let n_nodes = grid.nodes().len();
        if values.len() != n_nodes {
            return Err(OpsError::SampleLengthMismatch {
                expected: n_nodes,
                got: values.len(),
            });
        }
        let dim = values.first().map(|v| v.len()).unwrap_or(0);
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(OpsError::InconsistentDimension);
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(OpsError::NonFiniteSample);
        }
        let mut last = 0usize;
        for (k, (idx, left)) in corners.iter().enumerate() {
            if *idx == 0 || *idx >= n_nodes - 1 {
                return Err(OpsError::CornerNotInterior(*idx));
            }
            if k > 0 && *idx <= last {
                return Err(OpsError::CornersNotSorted);
            }
            if left.len() != dim || left.iter().any(|v| !v.is_finite()) {
                return Err(OpsError::InconsistentDimension);
            }
            last = *idx;
        }
        Ok(PiecewiseSample {
            grid,
            dim,
            values,
            corners,
        })
    }

    /// Continuous sample (no corners) from a scalar function of t.
    pub fn from_fn(grid: Grid, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self, OpsError> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect::<Vec<_>>();
        if values.iter().any(|v| v.len() != dim) {
            return Err(OpsError::InconsistentDimension);
        }
        Self::new(grid, values, Vec::new())
    }

    /// Constant sample.
    pub fn constant(grid: Grid, value: Vec<f64>) -> Result<Self, OpsError> {
        let n = grid.nodes().len();
        Self::new(grid, vec![value; n], Vec::new())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn corners(&self) -> &[(usize, Vec<f64>)] {
        &self.corners
    }

    pub fn corner_indices(&self) -> Vec<usize> {
        self.corners.iter().map(|(i, _)| *i).collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.corners.is_empty()
    }

    pub fn is_corner(&self, node: usize) -> bool {
        self.corners.binary_search_by_key(&node, |(i, _)| *i).is_ok()
    }

    /// Value at node `j` approaching from the right (the stored value).
    pub fn value_right(&self, node: usize) -> &[f64] {
        &self.values[node]
    }

    /// Value at node `j` approaching from the left.
    pub fn value_left(&self, node: usize) -> &[f64] {
        match self.corners.binary_search_by_key(&node, |(i, _)| *i) {
            Ok(k) => &self.corners[k].1,
            Err(_) => &self.values[node],
        }
    }

    /// Endpoint values of cell `i` as seen from inside the cell.
    pub fn cell_values(&self, cell: usize) -> (&[f64], &[f64]) {
        (self.value_right(cell), self.value_left(cell + 1))
    }

    /// Piecewise-linear evaluation at an arbitrary point (right-continuous at
    /// corners).
    pub fn eval(&self, t: f64) -> Result<Vec<f64>, OpsError> {
        let nodes = self.grid.nodes();
        if !self.grid.interval().contains(t) {
            return Err(OpsError::PointOutsideInterval {
                t,
                t0: self.grid.interval().t0(),
                t1: self.grid.interval().t1(),
            });
        }
        let n = nodes.len();
        if t == nodes[n - 1] {
            return Ok(self.values[n - 1].clone());
        }
        // cell containing t, with t == node resolving to the right cell
        let cell = nodes.partition_point(|&x| x <= t) - 1;
        let (vl, vr) = self.cell_values(cell);
        let h = nodes[cell + 1] - nodes[cell];
        let w = (t - nodes[cell]) / h;
        Ok(vl
            .iter()
            .zip(vr)
            .map(|(a, b)| a + (b - a) * w)
            .collect())
    }

    /// Resamples onto a refinement of this sample's grid. Every node of the
    /// original grid must still be present; corners carry over to their new
    /// indices.
    pub fn resample(&self, fine: &Grid) -> Result<Self, OpsError> {
        let coarse = self.grid.nodes();
        let tol = 1e-12 * self.grid.interval().len();
        let mut values = Vec::with_capacity(fine.nodes().len());
        let mut corners = Vec::new();
        let mut ci = 0usize; // cursor into coarse nodes
        for (j, &t) in fine.nodes().iter().enumerate() {
            while ci + 1 < coarse.len() && coarse[ci + 1] <= t + tol {
                ci += 1;
            }
            if (coarse[ci] - t).abs() <= tol {
                values.push(self.values[ci].clone());
                if self.is_corner(ci) {
                    corners.push((j, self.value_left(ci).to_vec()));
                }
            } else {
                values.push(self.eval(t)?);
            }
        }
        if ci != coarse.len() - 1 {
            return Err(OpsError::NotARefinement);
        }
        Self::new(fine.clone(), values, corners)
    }

    /// Pointwise sum of two samples on the same grid; corners merge.
    pub fn add(&self, other: &PiecewiseSample) -> Result<Self, OpsError> {
        if self.grid.nodes() != other.grid.nodes() {
            return Err(OpsError::GridMismatch);
        }
        if self.dim != other.dim {
            return Err(OpsError::InconsistentDimension);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let mut idxs: Vec<usize> = self
            .corner_indices()
            .into_iter()
            .chain(other.corner_indices())
            .collect();
        idxs.sort_unstable();
        idxs.dedup();
        let corners = idxs
            .into_iter()
            .map(|i| {
                let left = self
                    .value_left(i)
                    .iter()
                    .zip(other.value_left(i))
                    .map(|(x, y)| x + y)
                    .collect();
                (i, left)
            })
            .collect();
        Self::new(self.grid.clone(), values, corners)
    }

    /// Largest Euclidean node-value norm, corner left limits included.
    pub fn sup_norm(&self) -> f64 {
        let node_max = self
            .values
            .iter()
            .map(|v| norm(v))
            .fold(0.0, f64::max);
        self.corners
            .iter()
            .map(|(_, v)| norm(v))
            .fold(node_max, f64::max)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
