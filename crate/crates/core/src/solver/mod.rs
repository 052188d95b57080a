//! Sparse atomic fitting of periodic splines, fractional-Laplacian
//! (Lizorkin) splines and ridge / ReLU splines.
//!
//! Every problem has the form
//!
//! ```text
//! minimise  sum_m E(y_m, f(x_m)) + lambda * sum_k |a_k|
//! over      f = sum_k a_k h(., theta_k) + q,
//! ```
//!
//! where `h` is the family's continuous kernel, `theta_k` the atom parameters
//! and `q` an unpenalised offset or polynomial. The solver is an exchange
//! loop: locate the atom maximising the dual certificate on a candidate grid,
//! refine it locally, insert it, re-solve the weights, prune and merge.

mod dictionary;
mod exchange;
mod lasso;
mod model;
mod seminorm;
mod weights;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::FourierError;
use crate::kernels::KernelError;
use crate::radon::RadonError;

pub use dictionary::Atom;
pub use exchange::{certificate_peak, fit, FitOutcome, IterRecord};
pub use lasso::{grid_lasso, oracle_atoms, LassoResult};
pub use model::{evaluate_model, mnorm_of_model, LizSplineModel, Model, RidgeAtom, RidgeModel, SplineModel};
pub use seminorm::{verify_seminorm_ridge, SeminormOptions, SeminormReport};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("data locations {0} and {1} coincide")]
    DuplicateLocations(usize, usize),
    #[error("atoms {0} and {1} coincide")]
    DuplicateAtoms(usize, usize),
    #[error("interpolation failed: max residual {max_residual:e} after continuation down to lambda = {lambda:e}")]
    InfeasibleInterpolation { max_residual: f64, lambda: f64 },
    #[error("model does not match: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Radon(#[from] RadonError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Per-sample data fidelity `E(y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Loss {
    /// `(y - z)^2 / 2`
    Quadratic,
    /// `r^2 / 2` for `|r| <= delta`, `delta (|r| - delta / 2)` beyond.
    Huber { delta: f64 },
}

impl Loss {
    pub fn value(&self, y: f64, z: f64) -> f64 {
        let r = y - z;
        match *self {
            Loss::Quadratic => 0.5 * r * r,
            Loss::Huber { delta } => {
                if r.abs() <= delta {
                    0.5 * r * r
                } else {
                    delta * (r.abs() - 0.5 * delta)
                }
            }
        }
    }

    /// `-dE/dz`, the generalised residual.
    pub fn residual(&self, y: f64, z: f64) -> f64 {
        let r = y - z;
        match *self {
            Loss::Quadratic => r,
            Loss::Huber { delta } => r.clamp(-delta, delta),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Loss::Quadratic => Ok(()),
            Loss::Huber { delta } if delta > 0.0 && delta.is_finite() => Ok(()),
            Loss::Huber { delta } => Err(SolverError::InvalidProblem(format!("huber delta {delta}"))),
        }
    }
}

/// Model family and its operator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `b0 + sum a_k rho_perio(t - tau_k)`, `alpha > 1`.
    Periodic { alpha: f64, period: f64, truncation: usize },
    /// `sum a_k h(x, x_k)` with the corrected fractional-Laplacian kernel.
    Fraclap { alpha: f64, d: usize },
    /// `sum a_k h(x, (t_k, xi_k)) [+ p(x)]` with corrected truncated-power ridges;
    /// `polynomial` adds an unpenalised part of degree `m - 1`.
    Ridge { m: u32, d: usize, polynomial: bool },
}

impl Family {
    /// Dimension of the data locations.
    pub fn dim(&self) -> usize {
        match *self {
            Family::Periodic { .. } => 1,
            Family::Fraclap { d, .. } | Family::Ridge { d, .. } => d,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Family::Periodic { alpha, period, truncation } => {
                if !(alpha > 1.0) || !(period > 0.0 && period.is_finite()) || truncation == 0 {
                    return Err(SolverError::InvalidProblem(format!(
                        "periodic family needs alpha > 1, T > 0, N >= 1 (alpha = {alpha}, T = {period}, N = {truncation})"
                    )));
                }
            }
            Family::Fraclap { alpha, d } => {
                let k = crate::kernels::FracLaplaceKernel::new(alpha, d)?;
                if !k.in_corrected_regime() {
                    return Err(KernelError::InvalidRegime { alpha, d }.into());
                }
            }
            Family::Ridge { m, d, .. } => {
                crate::kernels::RidgeKernel::new(m, d)?;
            }
        }
        Ok(())
    }
}

/// Regularised fit with a fixed `lambda`, or interpolation by continuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Regularized { lambda: f64 },
    Interpolation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub location: Vec<f64>,
    pub value: f64,
}

impl DataPoint {
    pub fn new(location: Vec<f64>, value: f64) -> Self {
        Self { location, value }
    }

    pub fn scalar(t: f64, value: f64) -> Self {
        Self { location: vec![t], value }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    data: Vec<DataPoint>,
    loss: Loss,
    mode: Mode,
    family: Family,
}

impl FitProblem {
    pub fn new(data: Vec<DataPoint>, loss: Loss, mode: Mode, family: Family) -> Result<Self> {
        family.validate()?;
        loss.validate()?;
        if data.is_empty() {
            return Err(SolverError::InvalidProblem("no data".into()));
        }
        if let Mode::Regularized { lambda } = mode {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(SolverError::InvalidProblem(format!("lambda must be positive, got {lambda}")));
            }
        }
        let dim = family.dim();
        for p in &data {
            if p.location.len() != dim {
                return Err(KernelError::DimensionMismatch { expected: dim, got: p.location.len() }.into());
            }
            if !p.value.is_finite() || p.location.iter().any(|v| !v.is_finite()) {
                return Err(SolverError::InvalidProblem("non-finite data".into()));
            }
        }
        for i in 0..data.len() {
            for j in i + 1..data.len() {
                let same = match family {
                    Family::Periodic { period, .. } => {
                        let d = (data[i].location[0] - data[j].location[0]).rem_euclid(period);
                        d.min(period - d) == 0.0
                    }
                    _ => data[i].location == data[j].location,
                };
                if same {
                    return Err(SolverError::DuplicateLocations(i, j));
                }
            }
        }
        Ok(Self { data, loss, mode, family })
    }

    pub fn data(&self) -> &[DataPoint] {
        &self.data
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::new(self.data.clone(), self.loss, mode, self.family)
    }

    /// Largest admissible number of atoms in an extreme-point solution.
    pub fn atom_bound(&self) -> usize {
        let m = self.data.len();
        match self.family {
            Family::Periodic { .. } => m.saturating_sub(1),
            Family::Fraclap { .. } => m,
            Family::Ridge { m: order, d, polynomial } => {
                if polynomial {
                    m.saturating_sub(crate::kernels::poly::poly_space_dim(d, order - 1))
                } else {
                    m
                }
            }
        }
    }
}

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Stop once `max |eta| <= lambda (1 + rel_gap)`.
    pub rel_gap: f64,
    pub max_iter: usize,
    /// Atoms closer than this (relative to the domain scale) are merged.
    pub merge_tol: f64,
    /// Continuation stops once every residual is below this in interpolation mode.
    pub interp_tol: f64,
    /// Approximate size of the coarse candidate grid.
    pub candidates: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-6,
            max_iter: 200,
            merge_tol: 1e-6,
            interp_tol: 1e-8,
            candidates: 2000,
            seed: 0x5EED,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_gap > 0.0 && self.merge_tol > 0.0 && self.interp_tol > 0.0 && self.max_iter > 0 && self.candidates > 0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::InvalidProblem(format!("invalid options {self:?}")))
        }
    }
}
