use ndarray::{ArrayD, Dimension, IxDyn};

use super::{RadonError, Result};

/// Point samples of a real field on a cube centred at the origin.
///
/// Sample `i` along every axis sits at `(i - (n - 1)/2) h`, so the grid is
/// symmetric about the origin for both odd and even side counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    spacing: f64,
    values: ArrayD<f64>,
}

impl SampledField {
    pub fn new(spacing: f64, values: ArrayD<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(RadonError::InvalidGrid(format!("spacing {spacing}")));
        }
        let shape = values.shape();
        if shape.is_empty() || shape[0] < 3 || shape.iter().any(|&s| s != shape[0]) {
            return Err(RadonError::InvalidGrid(format!("shape {shape:?} is not a cube of side >= 3")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RadonError::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { spacing, values })
    }

    pub fn zeros(dim: usize, side: usize, spacing: f64) -> Result<Self> {
        Self::new(spacing, ArrayD::zeros(IxDyn(&vec![side; dim])))
    }

    /// Samples `f(x, y)` on a `side x side` planar grid.
    pub fn from_fn_2d(side: usize, spacing: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let c = (side as f64 - 1.0) / 2.0;
        let values = ArrayD::from_shape_fn(IxDyn(&[side, side]), |idx| {
            f((idx[0] as f64 - c) * spacing, (idx[1] as f64 - c) * spacing)
        });
        Self::new(spacing, values)
    }

    pub fn dim(&self) -> usize {
        self.values.ndim()
    }

    pub fn side(&self) -> usize {
        self.values.shape()[0]
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of sample index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.side() as f64 - 1.0) / 2.0) * self.spacing
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn get2(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude on the outer layer of the cube.
    pub fn boundary_max(&self) -> f64 {
        let last = self.side() - 1;
        self.values
            .indexed_iter()
            .filter(|(idx, _)| idx.slice().iter().any(|&i| i == 0 || i == last))
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    /// Discrete `L2` inner product `h^d sum f g`.
    pub fn inner(&self, other: &Self) -> f64 {
        let w = self.spacing.powi(self.dim() as i32);
        w * self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }
}
