use ndarray::{Array2, ArrayD, IxDyn};

use super::{Parity, RadonError, Result, SampledField, SinogramGrid, SinogramSpec, BOUNDARY_TOL};
use crate::par;

/// Interpolation used to evaluate the field off the sample lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Bilinear,
    /// Tensor Lagrange interpolation on `points` nodes per axis (even, >= 2).
    Lagrange(usize),
}

impl Interpolation {
    fn points(self) -> usize {
        match self {
            Interpolation::Bilinear => 2,
            Interpolation::Lagrange(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadonOptions {
    pub interpolation: Interpolation,
    /// Step along each line as a fraction of the field spacing.
    pub line_step: f64,
}

impl Default for RadonOptions {
    fn default() -> Self {
        Self { interpolation: Interpolation::Lagrange(12), line_step: 1.0 }
    }
}

/// Lagrange weights on `p` consecutive integer nodes around `u`.
struct Stencil {
    p: usize,
    denom: Vec<f64>,
}

impl Stencil {
    fn new(p: usize) -> Self {
        let denom = (0..p)
            .map(|m| {
                (0..p)
                    .filter(|&l| l != m)
                    .map(|l| m as f64 - l as f64)
                    .product::<f64>()
            })
            .collect();
        Self { p, denom }
    }

    /// First node index and weights; `None` when no node falls in `0..n`.
    /// Nodes outside the grid read as zero.
    fn weights(&self, u: f64, n: usize, w: &mut [f64]) -> Option<isize> {
        let half = self.p as isize / 2;
        let base = u.floor() as isize - (half - 1);
        if base + self.p as isize <= 0 || base >= n as isize {
            return None;
        }
        let r = u - base as f64;
        let mut left = 1.0;
        for (m, wm) in w.iter_mut().enumerate().take(self.p) {
            *wm = left;
            left *= r - m as f64;
        }
        let mut right = 1.0;
        for m in (0..self.p).rev() {
            w[m] *= right / self.denom[m];
            right *= r - m as f64;
        }
        Some(base)
    }
}

fn check_field(f: &SampledField) -> Result<()> {
    if f.dim() != 2 {
        return Err(RadonError::UnsupportedDimension(f.dim()));
    }
    let edge = f.boundary_max();
    if edge > BOUNDARY_TOL {
        return Err(RadonError::BoundaryMass(edge));
    }
    Ok(())
}

/// Line integral of `f` along `{t xi + s xi_perp}` for every `t` in `ts`.
pub(crate) fn project_direction(f: &SampledField, xi: [f64; 2], ts: &[f64], opts: &RadonOptions) -> Vec<f64> {
    let n = f.side();
    let h = f.spacing();
    let c = (n as f64 - 1.0) / 2.0;
    let p = opts.interpolation.points();
    let stencil = Stencil::new(p);
    let ds = h * opts.line_step;
    let reach = (c + p as f64) * h * std::f64::consts::SQRT_2;
    let ns = (reach / ds).ceil() as isize;
    let perp = [-xi[1], xi[0]];
    let owned;
    let vals: &[f64] = match f.values().as_slice() {
        Some(v) => v,
        None => {
            owned = f.values().iter().copied().collect::<Vec<_>>();
            &owned
        }
    };
    let mut wx = vec![0.0; p];
    let mut wy = vec![0.0; p];
    ts.iter()
        .map(|&t| {
            let mut acc = 0.0;
            for k in -ns..=ns {
                let s = k as f64 * ds;
                let u = (t * xi[0] + s * perp[0]) / h + c;
                let v = (t * xi[1] + s * perp[1]) / h + c;
                let (Some(i0), Some(j0)) = (stencil.weights(u, n, &mut wx), stencil.weights(v, n, &mut wy)) else {
                    continue;
                };
                let (a_lo, a_hi) = (0.max(-i0) as usize, p.min((n as isize - i0) as usize));
                let (b_lo, b_hi) = (0.max(-j0) as usize, p.min((n as isize - j0) as usize));
                let mut sum = 0.0;
                let j_lo = (j0 + b_lo as isize) as usize;
                for a in a_lo..a_hi {
                    let i = (i0 + a as isize) as usize;
                    let line = &vals[i * n + j_lo..i * n + j_lo + (b_hi - b_lo)];
                    let row: f64 = wy[b_lo..b_hi].iter().zip(line).map(|(w, v)| w * v).sum();
                    sum += wx[a] * row;
                }
                acc += sum;
            }
            acc * ds
        })
        .collect()
}

/// Radon transform `R f(t, xi) = int_{<xi, x> = t} f` with the default
/// interpolation.
///
/// The result is always flagged even, since `(t, xi)` and `(-t, -xi)` name
/// the same line. Parity of `f` itself shows up inside each column: even
/// fields give `g(-t, xi) = g(t, xi)`, odd ones `g(-t, xi) = -g(t, xi)`.
pub fn radon(f: &SampledField, spec: SinogramSpec) -> Result<SinogramGrid> {
    radon_with(f, spec, &RadonOptions::default())
}

pub fn radon_with(f: &SampledField, spec: SinogramSpec, opts: &RadonOptions) -> Result<SinogramGrid> {
    check_field(f)?;
    spec.validate()?;
    if opts.interpolation.points() < 2 || opts.interpolation.points() % 2 != 0 || opts.interpolation.points() > f.side() {
        return Err(RadonError::InvalidGrid(format!("{:?}", opts.interpolation)));
    }
    let ts: Vec<f64> = (0..spec.n_t).map(|k| spec.t(k)).collect();
    let cols = par::map_range(spec.n_dir, |j| project_direction(f, spec.direction(j), &ts, opts));
    let values = Array2::from_shape_fn((spec.n_t, spec.n_dir), |(k, j)| cols[j][k]);
    // Every line integral satisfies Rf(-t, -xi) = Rf(t, xi).
    SinogramGrid::new(spec, Parity::Even, values)
}

/// Backprojection `R* g(x) = int_{S^1} g(<xi, x>, xi) dxi` on a centred
/// `side x side` grid, by the rectangle rule in angle and linear
/// interpolation in `t`.
///
/// The unstored half circle contributes `g(-t, -xi) = +-g(t, xi)` at the same
/// offset, so even sinograms carry weight `2 dtheta` and odd ones cancel.
pub fn backproject(g: &SinogramGrid, side: usize, spacing: f64) -> Result<SampledField> {
    if side < 3 || !(spacing > 0.0) {
        return Err(RadonError::InvalidGrid(format!("side {side}, spacing {spacing}")));
    }
    let spec = *g.spec();
    let weight = (1.0 + g.parity().sign()) * spec.dtheta();
    let c = (side as f64 - 1.0) / 2.0;
    let dirs = g.directions();
    let rows = par::map_range(side, |i| {
        let x = (i as f64 - c) * spacing;
        (0..side)
            .map(|jj| {
                let y = (jj as f64 - c) * spacing;
                let s: f64 = dirs
                    .iter()
                    .enumerate()
                    .map(|(j, xi)| g.interp(j, xi[0] * x + xi[1] * y))
                    .sum();
                weight * s
            })
            .collect::<Vec<f64>>()
    });
    let values = ArrayD::from_shape_fn(IxDyn(&[side, side]), |idx| rows[idx[0]][idx[1]]);
    SampledField::new(spacing, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(side: usize, h: f64) -> SampledField {
        SampledField::from_fn_2d(side, h, |x, y| (-(x * x + y * y) / 2.0).exp()).unwrap()
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let s = Stencil::new(8);
        let mut w = vec![0.0; 8];
        let base = s.weights(10.3, 40, &mut w).unwrap();
        let interp: f64 = (0..8).map(|m| w[m] * ((base + m as isize) as f64).powi(7)).sum();
        assert!((interp / 10.3f64.powi(7) - 1.0).abs() < 1e-12);
        assert!(s.weights(-5.0, 40, &mut w).is_none());
        assert!(s.weights(-3.5, 40, &mut w).is_some());
    }

    #[test]
    fn gaussian_columns_match_closed_form() {
        let f = gaussian(129, 0.1);
        let spec = SinogramSpec::symmetric(81, 12, 4.0);
        let g = radon(&f, spec).unwrap();
        let mut err: f64 = 0.0;
        for k in 0..spec.n_t {
            let exact = (2.0 * PI).sqrt() * (-spec.t(k).powi(2) / 2.0).exp();
            for j in 0..spec.n_dir {
                err = err.max((g.values()[[k, j]] - exact).abs());
            }
        }
        assert!(err < 1e-6, "err {err:e}");
    }

    #[test]
    fn bilinear_is_second_order_only() {
        let f = gaussian(129, 0.1);
        let spec = SinogramSpec::symmetric(9, 4, 2.0);
        let opts = RadonOptions { interpolation: Interpolation::Bilinear, line_step: 1.0 };
        let g = radon_with(&f, spec, &opts).unwrap();
        let exact = (2.0 * PI).sqrt();
        let err = (g.values()[[4, 1]] - exact).abs();
        assert!(err < 1e-2 && err > 1e-8, "err {err:e}");
    }

    #[test]
    fn errors() {
        let f = SampledField::zeros(3, 5, 1.0).unwrap();
        let spec = SinogramSpec::symmetric(5, 4, 1.0);
        assert!(matches!(radon(&f, spec), Err(RadonError::UnsupportedDimension(3))));
        let wide = SampledField::from_fn_2d(33, 0.1, |x, y| (-(x * x + y * y)).exp()).unwrap();
        assert!(matches!(radon(&wide, spec), Err(RadonError::BoundaryMass(_))));
    }

    #[test]
    fn zero_in_zero_out() {
        let f = SampledField::zeros(2, 33, 0.2).unwrap();
        let g = radon(&f, SinogramSpec::symmetric(17, 8, 3.0)).unwrap();
        assert_eq!(g.max_abs(), 0.0);
        let b = backproject(&g, 9, 0.3).unwrap();
        assert_eq!(b.sup_norm(), 0.0);
    }

    #[test]
    fn backprojection_of_constant_is_circle_length() {
        let spec = SinogramSpec::symmetric(41, 30, 10.0);
        let g = SinogramGrid::from_fn(spec, Parity::Even, |_, _| 1.0).unwrap();
        let b = backproject(&g, 11, 0.5).unwrap();
        for v in b.values().iter() {
            assert!((v - 2.0 * PI).abs() < 1e-12);
        }
        let odd = SinogramGrid::from_fn(spec, Parity::Odd, |_, _| 1.0).unwrap();
        assert_eq!(backproject(&odd, 11, 0.5).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn shift_moves_columns() {
        let x0 = [0.4, -0.7];
        let f = SampledField::from_fn_2d(129, 0.12, |x, y| {
            let (u, v) = (x - x0[0], y - x0[1]);
            (-(u * u + v * v) / 2.0).exp()
        })
        .unwrap();
        let spec = SinogramSpec::symmetric(41, 18, 3.0);
        let g = radon(&f, spec).unwrap();
        let mut err: f64 = 0.0;
        for j in 0..spec.n_dir {
            let xi = spec.direction(j);
            let shift = xi[0] * x0[0] + xi[1] * x0[1];
            for k in 0..spec.n_t {
                let t = spec.t(k) - shift;
                err = err.max((g.values()[[k, j]] - (2.0 * PI).sqrt() * (-t * t / 2.0).exp()).abs());
            }
        }
        assert!(err < 1e-5, "err {err:e}");
    }

    #[test]
    fn isotropic_columns_agree() {
        let f = SampledField::from_fn_2d(129, 0.12, |x, y| {
            let r2 = x * x + y * y;
            (1.0 - r2 / 2.0) * (-r2 / 2.0).exp()
        })
        .unwrap();
        let g = radon(&f, SinogramSpec::symmetric(61, 36, 3.0)).unwrap();
        assert!(g.column_spread() < 1e-8, "spread {:e}", g.column_spread());
    }

    #[test]
    fn parity_is_preserved() {
        let even = SampledField::from_fn_2d(121, 0.12, |x, y| (x * y + 1.0) * (-(x * x + 2.0 * y * y) / 2.0).exp()).unwrap();
        let odd = SampledField::from_fn_2d(121, 0.12, |x, y| (x + y * y * x) * (-(x * x + y * y) / 2.0).exp()).unwrap();
        let spec = SinogramSpec::symmetric(41, 20, 4.0);
        let ge = radon(&even, spec).unwrap();
        let go = radon(&odd, spec).unwrap();
        assert!(ge.column_reflection_defect(1.0).unwrap() < 1e-10);
        assert!(go.column_reflection_defect(-1.0).unwrap() < 1e-10);
    }
}
