use serde::Serialize;
use statrs::function::erf::erfc;

use super::model::RidgeModel;
use super::{Result, SolverError};
use crate::kernels::factorial;
use crate::radon::{radon_of_ridge, RidgeProfile, SinogramSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormOptions {
    /// Width of the Gaussian mollifier applied along `t`.
    pub sigma: f64,
    /// Offset samples per `sigma`.
    pub samples_per_sigma: usize,
}

impl Default for SeminormOptions {
    fn default() -> Self {
        Self { sigma: 0.05, samples_per_sigma: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormReport {
    pub numeric: f64,
    pub expected: f64,
    /// `|numeric - expected| / expected`, or `numeric` when nothing is expected.
    pub rel_deviation: f64,
}

fn std_normal_cdf(a: f64) -> f64 {
    0.5 * erfc(-a / std::f64::consts::SQRT_2)
}

/// `(rho_m * G_sigma)(u)` in closed form. With `a = u / sigma` and
/// `J_k(a) = E[(a - Z)^k ; Z < a]` one has `J_0 = Phi(a)`,
/// `J_1 = a Phi(a) + phi(a)` and `J_k = a J_{k-1} + (k - 1) J_{k-2}`.
fn mollified_profile(m: u32, sigma: f64, u: f64) -> f64 {
    let a = u / sigma;
    let pdf = (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut j0 = std_normal_cdf(a);
    let mut j1 = a * j0 + pdf;
    let k = m - 1;
    if k == 0 {
        return j0;
    }
    for i in 2..=k {
        let j2 = a * j1 + f64::from(i - 1) * j0;
        j0 = j1;
        j1 = j2;
    }
    sigma.powi(k as i32) * j1 / factorial(k)
}

/// Numeric `||d_t^m K_rad R f||_M` for a planar ridge model.
///
/// Each atom is mollified along `t` and mapped to its concentrated sinogram
/// `P_even{ r_k(t) delta(xi - xi_k) }` (the image of the ridge under
/// `K_rad R`); the correcting polynomial of degree `m - 1` is carried along
/// and removed by the finite differences. Atoms sharing a direction (up to
/// sign) share a column; columns are differenced `m` times in `t` and
/// `|.|` is integrated over the full circle.
pub fn verify_seminorm_ridge(model: &RidgeModel, opts: &SeminormOptions) -> Result<SeminormReport> {
    if model.d != 2 {
        return Err(SolverError::InvalidProblem(format!("seminorm check needs d = 2, got {}", model.d)));
    }
    if !(opts.sigma > 0.0) || opts.samples_per_sigma < 4 {
        return Err(SolverError::InvalidProblem(format!("invalid seminorm options {opts:?}")));
    }
    super::model::Model::Ridge(model.clone()).validate()?;
    let expected: f64 = model.atoms.iter().map(|a| a.weight.abs()).sum();
    let m = model.m;
    let reach = model.atoms.iter().map(|a| a.t.abs()).fold(0.0, f64::max) + 12.0 * opts.sigma + 1.0;
    let dt = opts.sigma / opts.samples_per_sigma as f64;
    let n_t = 2 * (reach / dt).ceil() as usize + 1;
    let spec = SinogramSpec::symmetric(n_t, 1, (n_t - 1) as f64 / 2.0 * dt);
    // Group atoms by direction up to sign; each group becomes the column at
    // angle 0 after rotating its representative onto e_1.
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (k, a) in model.atoms.iter().enumerate() {
        match groups.iter_mut().find(|(rep, _)| (rep[0] * a.xi[1] - rep[1] * a.xi[0]).abs() < 1e-12) {
            Some((_, members)) => members.push(k),
            None => groups.push((a.xi.clone(), vec![k])),
        }
    }
    let mut total = 0.0;
    for (rep, members) in &groups {
        let mut column = vec![0.0; n_t];
        for &k in members {
            let a = &model.atoms[k];
            let sign = (rep[0] * a.xi[0] + rep[1] * a.xi[1]).signum();
            let weight = crate::kernels::RidgeKernel::correction_weight(a.t);
            let tk = a.t;
            let profile = move |t: f64| {
                let u = t - tk;
                mollified_profile(m, opts.sigma, u) - weight * u.powi(m as i32 - 1) / factorial(m - 1)
            };
            let g = radon_of_ridge(&RidgeProfile::Function(&profile), [sign, 0.0], spec, 1e-12)?;
            for (c, v) in column.iter_mut().zip(g.column(0)) {
                *c += a.weight * v;
            }
        }
        let mut diff = column;
        for _ in 0..m {
            diff = diff.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
        }
        // Stored half circle, doubled by even parity.
        total += 2.0 * diff.iter().map(|v| v.abs()).sum::<f64>() * dt * spec.dtheta();
    }
    let rel_deviation = if expected > 0.0 { (total - expected).abs() / expected } else { total };
    Ok(SeminormReport { numeric: total, expected, rel_deviation })
}
