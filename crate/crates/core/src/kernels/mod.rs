//! Non-periodic Green's functions and their polynomial corrections.
//!
//! Two kernel families are provided:
//!
//! * [`FracLaplaceKernel`]: impulse response of the fractional integrator
//!   `(-Laplacian)^(-alpha/2)` in `R^d`, corrected by a cut-off Taylor
//!   polynomial so that it decays in the atom location.
//! * [`RidgeKernel`]: truncated-power ridges `max(0, <x, xi> - t)^(m-1)/(m-1)!`
//!   corrected by a ridge polynomial for negative offsets.

mod cutoff;
mod fraclap;
mod gamma;
mod growth;
pub mod poly;
mod ridge;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cutoff::CutoffFunction;
pub use fraclap::{
    corrected_kernel_frac, k_frac_laplace, rho_1d, FracLaplaceKernel, NormPowerDerivatives,
};
pub use gamma::gamma;
pub use growth::{verify_growth_bound, GrowthReport, GrowthRow, MAX_TREND_SLOPE};
pub use ridge::{corrected_ridge, ridge_profile, RidgeKernel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("order must be positive, got {0}")]
    InvalidOrder(f64),
    #[error("dimension must be >= 1")]
    InvalidDimension,
    #[error("alpha = {0} corresponds to a local operator; its impulse response is not a function")]
    DistributionalCase(f64),
    #[error("kernel is singular at the origin for alpha = {alpha} <= d = {d}")]
    OriginSingularity { alpha: f64, d: usize },
    #[error("corrected kernel needs alpha > d and alpha - d not an integer (alpha = {alpha}, d = {d})")]
    InvalidRegime { alpha: f64, d: usize },
    #[error("ridge order must be >= 2, got {0}")]
    InvalidRidgeOrder(u32),
    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("multi-index order {order} exceeds ceil(alpha - d) = {max}")]
    MultiIndexTooLarge { order: u32, max: u32 },
    #[error("sample points must be nonzero")]
    ZeroSample,
    #[error("unknown kernel family {0:?}")]
    UnknownFamily(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;

/// Serializable kernel descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    pub family: String,
    pub alpha: Option<f64>,
    pub m: Option<u32>,
    pub d: usize,
}

impl From<&FracLaplaceKernel> for KernelDescriptor {
    fn from(k: &FracLaplaceKernel) -> Self {
        Self {
            family: "fraclap".into(),
            alpha: Some(k.alpha()),
            m: None,
            d: k.dim(),
        }
    }
}

impl From<&RidgeKernel> for KernelDescriptor {
    fn from(k: &RidgeKernel) -> Self {
        Self {
            family: "ridge".into(),
            alpha: None,
            m: Some(k.order()),
            d: k.dim(),
        }
    }
}

/// Either kernel family, as described by a [`KernelDescriptor`].
#[derive(Debug, Clone)]
pub enum Kernel {
    FracLaplace(FracLaplaceKernel),
    Ridge(RidgeKernel),
}

impl TryFrom<&KernelDescriptor> for Kernel {
    type Error = KernelError;

    fn try_from(desc: &KernelDescriptor) -> Result<Self> {
        match desc.family.as_str() {
            "fraclap" => {
                let alpha = desc.alpha.ok_or(KernelError::InvalidOrder(f64::NAN))?;
                Ok(Kernel::FracLaplace(FracLaplaceKernel::new(alpha, desc.d)?))
            }
            "ridge" => {
                let m = desc.m.ok_or(KernelError::InvalidRidgeOrder(0))?;
                Ok(Kernel::Ridge(RidgeKernel::new(m, desc.d)?))
            }
            other => Err(KernelError::UnknownFamily(other.to_string())),
        }
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
