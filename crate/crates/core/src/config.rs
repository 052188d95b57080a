use serde::{Deserialize, Serialize};

/// Default truncation order for periodic Fourier series.
pub const DEFAULT_TRUNCATION: usize = 512;

/// Numerical tolerances shared across modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pointwise agreement of evaluated functions.
    pub pointwise: f64,
    /// Agreement of Fourier coefficients (Hermitian symmetry, mean checks).
    pub coeff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pointwise: 1e-9,
            coeff: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        self.pointwise > 0.0 && self.coeff > 0.0
    }
}
