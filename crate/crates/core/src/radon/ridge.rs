use ndarray::Array2;

use super::{Parity, RadonError, Result, SinogramGrid, SinogramSpec};
use crate::kernels::ridge_profile;

/// One-dimensional profile `r` of a ridge `x -> r(<xi0, x>)`.
pub enum RidgeProfile<'a> {
    /// `delta(t - offset)`.
    Dirac { offset: f64 },
    /// `max(0, t - offset)^(m-1) / (m-1)!`.
    TruncatedPower { m: u32, offset: f64 },
    Function(&'a dyn Fn(f64) -> f64),
}

/// The concentrated sinogram `P_even{ r(t) delta(xi - xi0) }` that
/// `K_rad R` assigns to the ridge `r(<xi0, x>)`.
///
/// Only the half circle is stored, so the pair of columns at `+-xi0` is the
/// single stored column nearest to either of them: it holds `r(t)/2` when it
/// approximates `xi0` and `r(-t)/2` when it approximates `-xi0`, divided by the
/// angular cell width so that backprojection returns the ridge. A Dirac profile
/// is split linearly between the two offsets around it, preserving mass and
/// first moment.
pub fn radon_of_ridge(
    profile: &RidgeProfile<'_>,
    xi0: [f64; 2],
    spec: SinogramSpec,
    angle_tol: f64,
) -> Result<SinogramGrid> {
    spec.validate()?;
    let norm = xi0[0].hypot(xi0[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(RadonError::NonUnitDirection(norm));
    }
    let (mut best, mut best_angle, mut sign) = (0, f64::INFINITY, 1.0);
    for j in 0..spec.n_dir {
        let xi = spec.direction(j);
        let dot = xi[0] * xi0[0] + xi[1] * xi0[1];
        let cross = xi[0] * xi0[1] - xi[1] * xi0[0];
        let angle = cross.abs().atan2(dot.abs());
        if angle < best_angle {
            (best, best_angle, sign) = (j, angle, if dot >= 0.0 { 1.0 } else { -1.0 });
        }
    }
    if best_angle > angle_tol {
        return Err(RadonError::DirectionNotOnGrid { tol: angle_tol, closest: best_angle });
    }
    let scale = 0.5 / spec.dtheta();
    let mut values = Array2::zeros((spec.n_t, spec.n_dir));
    match *profile {
        RidgeProfile::Dirac { offset } => {
            let at = sign * offset;
            let u = (at - spec.t_min) / spec.dt();
            if u < 0.0 || u > (spec.n_t - 1) as f64 {
                return Err(RadonError::InvalidGrid(format!("offset {at} outside the t range")));
            }
            let k = (u.floor() as usize).min(spec.n_t - 2);
            let w = u - k as f64;
            let density = scale / spec.dt();
            values[[k, best]] += (1.0 - w) * density;
            values[[k + 1, best]] += w * density;
        }
        RidgeProfile::TruncatedPower { m, offset } => {
            ridge_profile(m, 0.0)?;
            for k in 0..spec.n_t {
                values[[k, best]] = scale * ridge_profile(m, sign * spec.t(k) - offset)?;
            }
        }
        RidgeProfile::Function(r) => {
            for k in 0..spec.n_t {
                values[[k, best]] = scale * r(sign * spec.t(k));
            }
        }
    }
    SinogramGrid::new(spec, Parity::Even, values)
}
