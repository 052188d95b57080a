//! Quadrature Radon transform in the plane and the filtered-backprojection
//! identities used to witness the ridge-spline seminorm.
//!
//! Fourier convention: `F{f}(w) = (2 pi)^-d int f(x) exp(-j <w, x>) dx`. Under
//! it the slice relation reads `F_1{R f(., xi)}(w) = (2 pi)^(d-1) F_d{f}(w xi)`.
//! The ramp filter is a Fourier multiplier and does not depend on the
//! normalisation.

mod field;
mod filter;
mod ridge;
mod sinogram;
mod slice;
mod transform;

use thiserror::Error;

pub use field::SampledField;
pub use filter::{filter_krad, filter_krad_refined, inverse_filter_krad, krad_constant};
pub use ridge::{radon_of_ridge, RidgeProfile};
pub use sinogram::{Parity, SinogramGrid, SinogramSpec};
pub use slice::{slice_check, SliceReport};
pub use transform::{backproject, radon, radon_with, Interpolation, RadonOptions};

/// Fields whose boundary exceeds this magnitude are rejected by [`radon`].
pub const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum RadonError {
    #[error("only d = 2 is supported, got d = {0}")]
    UnsupportedDimension(usize),
    #[error("field is not negligible at the boundary (max |f| = {0:e})")]
    BoundaryMass(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no grid direction within {tol:e} rad of the requested direction (closest {closest:e})")]
    DirectionNotOnGrid { tol: f64, closest: f64 },
    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),
    #[error("sinogram layout mismatch: {0}")]
    Layout(String),
    #[error(transparent)]
    Kernel(#[from] crate::kernels::KernelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RadonError>;
