use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{RadonError, Result, SinogramGrid, SinogramSpec};
use crate::par;

/// Zero padding factor applied to every column before the FFT.
const PAD: usize = 4;

/// `c_d = 1 / (2 (2 pi)^(d-1))`.
pub fn krad_constant(d: usize) -> f64 {
    1.0 / (2.0 * (2.0 * PI).powi(d as i32 - 1))
}

/// Multiplies every column by `m(omega)` in the frequency domain and resamples
/// it on offsets `refine` times finer by band-limited interpolation. The DFT is
/// unnormalised forward and `1/L` backward, so the result is the convolution
/// with the inverse transform of `m` whatever the Fourier normalisation.
fn apply_multiplier(g: &SinogramGrid, m: impl Fn(f64) -> f64 + Sync, refine: usize) -> Result<SinogramGrid> {
    if refine == 0 {
        return Err(RadonError::InvalidGrid("refinement factor 0".into()));
    }
    let spec = *g.spec();
    let n = spec.n_t;
    let len = (PAD * n).next_power_of_two();
    let fine_len = refine * len;
    let n_out = (n - 1) * refine + 1;
    let dt = spec.dt();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(fine_len);
    let gain: Vec<f64> = (0..len)
        .map(|k| {
            let ks = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            m(2.0 * PI * ks / (len as f64 * dt)) / len as f64
        })
        .collect();
    let cols = par::map_range(spec.n_dir, |j| {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for k in 0..n {
            buf[k].re = g.values()[[k, j]];
        }
        fwd.process(&mut buf);
        for (b, a) in buf.iter_mut().zip(&gain) {
            *b *= a;
        }
        let mut fine = if refine == 1 {
            buf
        } else {
            let mut fine = vec![Complex64::new(0.0, 0.0); fine_len];
            let half = len / 2;
            fine[..half].copy_from_slice(&buf[..half]);
            fine[fine_len - half + 1..].copy_from_slice(&buf[half + 1..]);
            fine[half] = buf[half] * 0.5;
            fine[fine_len - half] = buf[half] * 0.5;
            fine
        };
        inv.process(&mut fine);
        fine.truncate(n_out);
        fine.into_iter().map(|z| z.re).collect::<Vec<f64>>()
    });
    let out = SinogramSpec { n_t: n_out, ..spec };
    let values = Array2::from_shape_fn((n_out, spec.n_dir), |(k, j)| cols[j][k]);
    SinogramGrid::new(out, g.parity(), values)
}

/// The filter `K_rad` for planar sinograms: multiplier `c_2 |omega|`.
pub fn filter_krad(g: &SinogramGrid) -> Result<SinogramGrid> {
    filter_krad_refined(g, 1)
}

/// [`filter_krad`] followed by band-limited resampling on offsets `refine`
/// times finer, which keeps the linear interpolation of a subsequent
/// backprojection accurate without a finer projection grid.
pub fn filter_krad_refined(g: &SinogramGrid, refine: usize) -> Result<SinogramGrid> {
    let c = krad_constant(2);
    apply_multiplier(g, |w| c * w.abs(), refine)
}

/// Division by `c_2 |omega|`, with every tap below `omega_min` set to zero.
/// Meaningful only on columns whose low-frequency content is negligible.
pub fn inverse_filter_krad(g: &SinogramGrid, omega_min: f64) -> Result<SinogramGrid> {
    let c = krad_constant(2);
    apply_multiplier(g, |w| if w.abs() < omega_min { 0.0 } else { 1.0 / (c * w.abs()) }, 1)
}
