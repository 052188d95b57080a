use std::collections::HashMap;
use std::f64::consts::PI;

use super::poly::{monomial_value, multi_indices, Polynomial};
use super::{factorial, gamma, norm, CutoffFunction, KernelError, Result};

/// Green's function of the 1-D fractional derivative of order `alpha > 0`.
///
/// `t_+^(alpha-1) / Gamma(alpha)` for non-integer `alpha - 1`, and the
/// symmetrised `sign(t)/2 * t^n / n!` when `alpha - 1 = n` is an integer.
pub fn rho_1d(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(KernelError::InvalidOrder(alpha));
    }
    let n = alpha - 1.0;
    if n.fract() == 0.0 {
        let n = n as u32;
        let sign = if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            0.0
        };
        Ok(0.5 * sign * t.powi(n as i32) / factorial(n))
    } else if t > 0.0 {
        Ok(t.powf(n) / gamma(alpha))
    } else {
        Ok(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Case {
    /// `A ||x||^(alpha - d)`
    Power { a: f64 },
    /// `B ||x||^(2n) ln ||x||` for `alpha - d = 2n`
    Log { b: f64, n: u32 },
    /// non-positive even `alpha`: a power of the Laplacian, supported at 0
    Local,
}

/// Closed-form derivatives of `||x||^s`:
/// `d^k ||x||^s = p_k(x) ||x||^(s - 2|k|)`, with
/// `p_{k + e_i} = ||x||^2 d_i p_k + (s - 2|k|) x_i p_k` and `p_0 = 1`.
///
/// For `s = 1` this is the classical `p_k / ||x||^(2|k|-1)` recursion.
#[derive(Debug, Clone)]
pub struct NormPowerDerivatives {
    exponent: f64,
    dim: usize,
    max_order: u32,
    table: HashMap<Vec<u32>, Polynomial>,
}

impl NormPowerDerivatives {
    pub fn new(exponent: f64, dim: usize, max_order: u32) -> Self {
        let mut table = HashMap::new();
        let norm2 = Polynomial::norm_squared(dim);
        for k in multi_indices(dim, max_order) {
            let order: u32 = k.iter().sum();
            if order == 0 {
                table.insert(k, Polynomial::constant(dim, 1.0));
                continue;
            }
            let i = k.iter().position(|&v| v > 0).unwrap();
            let mut prev = k.clone();
            prev[i] -= 1;
            let p = &table[&prev];
            let lowered = f64::from(2 * (order - 1));
            let next = norm2
                .mul(&p.partial(i))
                .add(&Polynomial::coordinate(dim, i).mul(p).scale(exponent - lowered));
            table.insert(k, next);
        }
        Self {
            exponent,
            dim,
            max_order,
            table,
        }
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// The numerator polynomial `p_k`.
    pub fn numerator(&self, k: &[u32]) -> Option<&Polynomial> {
        self.table.get(k)
    }

    /// `d^k ||x||^s` at a nonzero point.
    pub fn eval(&self, k: &[u32], x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let order: u32 = k.iter().sum();
        let p = &self.table[k];
        p.eval(x) * norm(x).powf(self.exponent - f64::from(2 * order))
    }
}

/// Impulse response of the fractional integrator `(-Laplacian)^(-alpha/2)`
/// in `R^d`, with the Taylor data for its growth correction.
#[derive(Debug, Clone)]
pub struct FracLaplaceKernel {
    alpha: f64,
    dim: usize,
    case: Case,
    taylor: Option<Taylor>,
}

#[derive(Debug, Clone)]
struct Taylor {
    order: u32,
    derivatives: NormPowerDerivatives,
    indices: Vec<(Vec<u32>, f64)>,
}

impl FracLaplaceKernel {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(KernelError::InvalidDimension);
        }
        if !alpha.is_finite() {
            return Err(KernelError::InvalidOrder(alpha));
        }
        let d = dim as f64;
        let excess = alpha - d;
        let case = if alpha <= 0.0 && (alpha / 2.0).fract() == 0.0 {
            Case::Local
        } else if excess >= 0.0 && (excess / 2.0).fract() == 0.0 {
            let n = (excess / 2.0) as u32;
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            let b = sign
                / (2f64.powi((2 * n + dim as u32 - 1) as i32)
                    * PI.powf(d / 2.0)
                    * gamma(f64::from(n) + d / 2.0)
                    * factorial(n));
            Case::Log { b, n }
        } else {
            let a = gamma((d - alpha) / 2.0) / (2f64.powf(alpha) * PI.powf(d / 2.0) * gamma(alpha / 2.0));
            Case::Power { a }
        };
        let taylor = if excess > 0.0 && excess.fract() != 0.0 {
            let order = (excess - 1.0).ceil().max(0.0) as u32;
            let indices = multi_indices(dim, order)
                .into_iter()
                .map(|k| {
                    let kf: f64 = k.iter().map(|&v| factorial(v)).product();
                    (k, kf)
                })
                .collect();
            Some(Taylor {
                order,
                derivatives: NormPowerDerivatives::new(excess, dim, order),
                indices,
            })
        } else {
            None
        };
        Ok(Self {
            alpha,
            dim,
            case,
            taylor,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `alpha - d`
    pub fn excess(&self) -> f64 {
        self.alpha - self.dim as f64
    }

    /// `A_{d,alpha}` when the kernel is a pure power of the norm.
    pub fn power_constant(&self) -> Option<f64> {
        match self.case {
            Case::Power { a } => Some(a),
            _ => None,
        }
    }

    /// `B_{d,n}` when `alpha - d = 2n`.
    pub fn log_constant(&self) -> Option<f64> {
        match self.case {
            Case::Log { b, .. } => Some(b),
            _ => None,
        }
    }

    /// Whether the cut-off Taylor correction is defined (`alpha > d`,
    /// `alpha - d` not an integer).
    pub fn in_corrected_regime(&self) -> bool {
        self.taylor.is_some()
    }

    /// Total order `ceil(alpha - d - 1)` of the correcting Taylor polynomial.
    pub fn taylor_order(&self) -> Option<u32> {
        self.taylor.as_ref().map(|t| t.order)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(KernelError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Kernel value at `x` without dimension or regime checks.
    pub fn value_unchecked(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        match self.case {
            Case::Power { a } => a * r.powf(self.excess()),
            Case::Log { b, n } => {
                if r == 0.0 {
                    0.0
                } else {
                    b * r.powi(2 * n as i32) * r.ln()
                }
            }
            Case::Local => f64::NAN,
        }
    }

    /// `h(x, y) = k(x - y) - chi(||y||) T_q{k(. - y)}(x)`, assuming the
    /// corrected regime.
    pub fn corrected_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        let raw = self.value_unchecked(&diff);
        let weight = CutoffFunction.eval(norm(y));
        if weight == 0.0 {
            return raw;
        }
        raw - weight * self.taylor_polynomial_unchecked(x, y)
    }

    /// `T_q{k(. - y)}(x) = sum_{|k| <= q} d^k k(-y) x^k / k!`.
    fn taylor_polynomial_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let (Some(t), Case::Power { a }) = (&self.taylor, self.case) else {
            return f64::NAN;
        };
        let neg_y: Vec<f64> = y.iter().map(|v| -v).collect();
        t.indices
            .iter()
            .map(|(k, kfact)| a * t.derivatives.eval(k, &neg_y) * monomial_value(k, x) / kfact)
            .sum()
    }

    /// Taylor polynomial of `k(. - y)` about the origin, evaluated at `x`.
    pub fn taylor_polynomial(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        if !self.in_corrected_regime() {
            return Err(KernelError::InvalidRegime {
                alpha: self.alpha,
                d: self.dim,
            });
        }
        Ok(self.taylor_polynomial_unchecked(x, y))
    }
}

/// Evaluates `k_{alpha,d}(x)`.
pub fn k_frac_laplace(kern: &FracLaplaceKernel, x: &[f64]) -> Result<f64> {
    kern.check_point(x)?;
    if kern.case == Case::Local {
        return Err(KernelError::DistributionalCase(kern.alpha));
    }
    if norm(x) == 0.0 && kern.alpha <= kern.dim as f64 {
        return Err(KernelError::OriginSingularity {
            alpha: kern.alpha,
            d: kern.dim,
        });
    }
    Ok(kern.value_unchecked(x))
}

/// Growth-corrected kernel `h(x, y)`.
///
/// Equals `k(x - y)` exactly wherever the cut-off weight `chi(||y||)` is 0.
pub fn corrected_kernel_frac(
    kern: &FracLaplaceKernel,
    chi: &CutoffFunction,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    kern.check_point(x)?;
    kern.check_point(y)?;
    if !kern.in_corrected_regime() {
        return Err(KernelError::InvalidRegime {
            alpha: kern.alpha,
            d: kern.dim,
        });
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let raw = k_frac_laplace(kern, &diff)?;
    let weight = chi.eval(norm(y));
    if weight == 0.0 {
        return Ok(raw);
    }
    Ok(raw - weight * kern.taylor_polynomial_unchecked(x, y))
}
