use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::transform::project_direction;
use super::{RadonError, RadonOptions, Result, SampledField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceReport {
    /// `max |lhs - rhs| / max |rhs|` over the compared frequencies.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub reference_scale: f64,
    pub n_freq: usize,
}

/// Compares `F_1{R f(., xi)}(w)` with `(2 pi) F_2{f}(w xi)` for `|w|` up to
/// half the Nyquist frequency of the field grid.
///
/// Both transforms use the `(2 pi)^-d` forward normalisation and are evaluated
/// by the rectangle rule: the projection on offsets matching the field
/// spacing, the planar transform directly on the ray as a separable sum.
pub fn slice_check(f: &SampledField, xi: [f64; 2]) -> Result<SliceReport> {
    let norm = xi[0].hypot(xi[1]);
    if (norm - 1.0).abs() > 1e-12 {
        return Err(RadonError::NonUnitDirection(norm));
    }
    if f.dim() != 2 {
        return Err(RadonError::UnsupportedDimension(f.dim()));
    }
    let n = f.side();
    let h = f.spacing();
    let coords: Vec<f64> = (0..n).map(|i| f.coord(i)).collect();
    let column = if f.sup_norm() == 0.0 {
        vec![0.0; n]
    } else {
        let edge = f.boundary_max();
        if edge > super::BOUNDARY_TOL {
            return Err(RadonError::BoundaryMass(edge));
        }
        project_direction(f, xi, &coords, &RadonOptions::default())
    };
    let m_max = n / 4;
    let mut lhs = Vec::with_capacity(2 * m_max + 1);
    let mut rhs = Vec::with_capacity(2 * m_max + 1);
    let mut inner = vec![Complex64::new(0.0, 0.0); n];
    let values: Vec<f64> = (0..n * n).map(|k| f.get2(k / n, k % n)).collect();
    for m in -(m_max as isize)..=(m_max as isize) {
        let w = 2.0 * PI * m as f64 / (n as f64 * h);
        let g: Complex64 = coords
            .iter()
            .zip(&column)
            .map(|(&t, &v)| v * Complex64::from_polar(1.0, -w * t))
            .sum::<Complex64>()
            * (h / (2.0 * PI));
        let ey: Vec<Complex64> = coords.iter().map(|&y| Complex64::from_polar(1.0, -w * xi[1] * y)).collect();
        for (slot, row) in inner.iter_mut().zip(values.chunks_exact(n)) {
            let (mut re, mut im) = (0.0, 0.0);
            for (e, v) in ey.iter().zip(row) {
                re += e.re * v;
                im += e.im * v;
            }
            *slot = Complex64::new(re, im);
        }
        let big: Complex64 = coords
            .iter()
            .zip(&inner)
            .map(|(&x, &s)| s * Complex64::from_polar(1.0, -w * xi[0] * x))
            .sum::<Complex64>()
            * (h * h / (4.0 * PI * PI));
        lhs.push(g);
        rhs.push(2.0 * PI * big);
    }
    let reference_scale = rhs.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let max_abs_error = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let max_rel_error = if reference_scale > 0.0 { max_abs_error / reference_scale } else { max_abs_error };
    Ok(SliceReport { max_rel_error, max_abs_error, reference_scale, n_freq: lhs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_slice() {
        let f = SampledField::from_fn_2d(128, 0.11, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap();
        let (s, c) = 0.7f64.sin_cos();
        let r = slice_check(&f, [c, s]).unwrap();
        assert!(r.max_rel_error < 1e-6, "{r:?}");
        // F_2 of the Gaussian at the origin is 1/(2 pi).
        assert!((r.reference_scale - 1.0).abs() < 1e-9);
    }

    #[test]
    fn odd_gaussian_slice() {
        let f = SampledField::from_fn_2d(128, 0.11, |x, y| x * (-(x * x + y * y) / 2.0).exp()).unwrap();
        let r = slice_check(&f, [0.6, 0.8]).unwrap();
        assert!(r.max_rel_error < 1e-5, "{r:?}");
    }

    #[test]
    fn zero_field() {
        let f = SampledField::zeros(2, 33, 0.1).unwrap();
        let r = slice_check(&f, [1.0, 0.0]).unwrap();
        assert_eq!(r.max_abs_error, 0.0);
        assert_eq!(r.reference_scale, 0.0);
    }
}
