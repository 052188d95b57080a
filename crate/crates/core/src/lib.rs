//! Fractional splines, Radon ridge splines and sparse atomic-measure fitting.
//!
//! The crate is organised around five pieces:
//!
//! * [`fourier`]: periodic fractional derivatives/integrals, the mean-removing
//!   projector, the periodic Green's function and the atomic M-norm.
//! * [`kernels`]: non-periodic Green's functions (fractional Laplacian and
//!   truncated-power ridge profiles) together with the polynomial corrections
//!   that turn them into growth-bounded continuous kernels.
//! * [`radon`]: a 2-D quadrature Radon transform, backprojection, the ramp
//!   filter and the ridge identities used as numerical witnesses.
//! * [`solver`]: an exchange (conditional-gradient) solver returning sparse
//!   atomic solutions for periodic, fractional-Laplacian and ReLU-ridge fits.
//! * [`verify`]: the invariant suite behind `lizkit verify`.
//!
//! Inner loops that are data parallel run on rayon when the `parallel`
//! feature is enabled (the default) and sequentially otherwise. Results are
//! bit-identical in both modes.

pub mod config;
pub mod fourier;
pub mod kernels;
pub mod par;
pub mod radon;
pub mod solver;
pub mod verify;

pub use config::Tolerances;
