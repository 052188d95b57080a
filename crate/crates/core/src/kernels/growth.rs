//! Numerical check of the growth estimate `|d^k f(x)| <= C ||x||^(alpha-d-|k|)`
//! for `f = A ||x||^(alpha-d)`.

use super::{norm, FracLaplaceKernel, KernelError, NormPowerDerivatives, Result};

/// Largest admissible magnitude of the log-log trend of the growth ratio.
pub const MAX_TREND_SLOPE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub norm_x: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Smallest constant bounding every sampled ratio.
    pub bound_c: f64,
    /// Least-squares slope of `log max ratio` against `log ||x||`.
    pub slope: f64,
    pub bounded: bool,
}

impl GrowthReport {
    /// CSV with columns `norm_x,ratio,bound_C`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("norm_x,ratio,bound_C\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.norm_x, r.ratio, self.bound_c));
        }
        out
    }
}

/// Evaluates `|d^k f(x)| / ||x||^(alpha-d-|k|)` on every sample.
///
/// Samples are grouped by norm (relative tolerance `1e-9`); the report is
/// bounded when the log-log slope of the per-norm maximum is within
/// [`MAX_TREND_SLOPE`].
pub fn verify_growth_bound(
    kern: &FracLaplaceKernel,
    k: &[u32],
    samples: &[Vec<f64>],
) -> Result<GrowthReport> {
    let d = kern.dim();
    if k.len() != d {
        return Err(KernelError::DimensionMismatch {
            expected: d,
            got: k.len(),
        });
    }
    let a = kern
        .power_constant()
        .ok_or(KernelError::InvalidRegime {
            alpha: kern.alpha(),
            d,
        })?;
    let excess = kern.excess();
    let order: u32 = k.iter().sum();
    let max = excess.ceil().max(0.0) as u32;
    if order > max {
        return Err(KernelError::MultiIndexTooLarge { order, max });
    }
    let der = NormPowerDerivatives::new(excess, d, order);
    let mut rows = Vec::with_capacity(samples.len());
    for x in samples {
        if x.len() != d {
            return Err(KernelError::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(KernelError::ZeroSample);
        }
        let value = (a * der.eval(k, x)).abs();
        rows.push(GrowthRow {
            norm_x: r,
            ratio: value / r.powf(excess - f64::from(order)),
        });
    }
    let bound_c = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);

    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut sorted: Vec<&GrowthRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.norm_x.total_cmp(&b.norm_x));
    for r in sorted {
        match groups.last_mut() {
            Some((n, m)) if (r.norm_x - *n).abs() <= 1e-9 * *n => *m = m.max(r.ratio),
            _ => groups.push((r.norm_x, r.ratio)),
        }
    }
    let pts: Vec<(f64, f64)> = groups
        .iter()
        .filter(|(_, m)| *m > 0.0)
        .map(|(n, m)| (n.ln(), m.ln()))
        .collect();
    let slope = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            0.0
        } else {
            sxy / sxx
        }
    };
    Ok(GrowthReport {
        rows,
        bound_c,
        slope,
        bounded: slope.abs() <= MAX_TREND_SLOPE && bound_c.is_finite(),
    })
}
