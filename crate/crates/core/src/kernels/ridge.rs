use super::{factorial, norm, KernelError, Result};

const UNIT_TOL: f64 = 1e-12;

/// Truncated power `max(0, s)^(m-1) / (m-1)!`; `m = 2` is the ReLU.
pub fn ridge_profile(m: u32, s: f64) -> Result<f64> {
    if m < 2 {
        return Err(KernelError::InvalidRidgeOrder(m));
    }
    Ok(profile(m, s))
}

fn profile(m: u32, s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        s.powi(m as i32 - 1) / factorial(m - 1)
    }
}

/// Corrected truncated-power ridge kernel of order `m` in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeKernel {
    m: u32,
    dim: usize,
    norm_const: f64,
}

impl RidgeKernel {
    pub fn new(m: u32, dim: usize) -> Result<Self> {
        if m < 2 {
            return Err(KernelError::InvalidRidgeOrder(m));
        }
        if dim == 0 {
            return Err(KernelError::InvalidDimension);
        }
        Ok(Self {
            m,
            dim,
            norm_const: factorial(m - 1),
        })
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Weight `max(0, min(-t, 1))` of the correcting polynomial.
    pub fn correction_weight(t: f64) -> f64 {
        (-t).min(1.0).max(0.0)
    }

    /// `rho(<x, xi> - t) - w(t) (<x, xi> - t)^(m-1) / (m-1)!`, given the
    /// projection `<x, xi>`.
    pub fn eval_projected(&self, proj: f64, t: f64) -> f64 {
        let u = proj - t;
        let w = Self::correction_weight(t);
        let poly = u.powi(self.m as i32 - 1) / self.norm_const;
        let relu = if u > 0.0 { poly } else { 0.0 };
        if w == 0.0 {
            relu
        } else if w == 1.0 && u >= 0.0 {
            0.0
        } else {
            relu - w * poly
        }
    }

    /// Kernel value without dimension or normalisation checks.
    pub fn eval_unchecked(&self, x: &[f64], t: f64, xi: &[f64]) -> f64 {
        let proj: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        self.eval_projected(proj, t)
    }
}

/// `h(x, (t, xi)) = rho_m(<x, xi> - t) - p_{t,xi}(x)` with
/// `p_{t,xi}(x) = max(0, min(-t, 1)) (<x, xi> - t)^(m-1) / (m-1)!`.
pub fn corrected_ridge(m: u32, d: usize, x: &[f64], t: f64, xi: &[f64]) -> Result<f64> {
    let k = RidgeKernel::new(m, d)?;
    for v in [x, xi] {
        if v.len() != d {
            return Err(KernelError::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
    }
    let n = norm(xi);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(KernelError::NonUnitDirection(n));
    }
    Ok(k.eval_unchecked(x, t, xi))
}
