use lizkit::fourier::{frac_derivative, mnorm_atomic, project_p0, AtomicMeasure1D, FourierSeries};
use lizkit::kernels::{corrected_kernel_frac, corrected_ridge, k_frac_laplace, CutoffFunction, FracLaplaceKernel};
use lizkit::radon::{radon, SampledField, SinogramSpec};
use lizkit::solver::{mnorm_of_model, Model, RidgeAtom, RidgeModel, SplineModel};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn mean_zero_series() -> impl Strategy<Value = FourierSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_map(|c| {
        let mut half = vec![Complex64::default()];
        half.extend(c.iter().enumerate().map(|(k, (a, b))| Complex64::new(*a, *b) / (1.0 + k as f64)));
        FourierSeries::from_half(1.0, &half).unwrap()
    })
}

proptest! {
    #[test]
    fn derivative_then_integral_is_identity(s in mean_zero_series(), alpha in 0.1f64..3.0) {
        let back = frac_derivative(&frac_derivative(&s, alpha).unwrap(), -alpha).unwrap();
        for n in -16i64..=16 {
            prop_assert!((back.coeff(n) - s.coeff(n)).norm() <= 1e-12 * s.sup_coeff().max(1.0));
        }
    }

    #[test]
    fn orders_compose(s in mean_zero_series(), a in 0.1f64..1.5, b in 0.1f64..1.5) {
        let two = frac_derivative(&frac_derivative(&s, a).unwrap(), b).unwrap();
        let one = frac_derivative(&s, a + b).unwrap();
        for n in -16i64..=16 {
            prop_assert!((two.coeff(n) - one.coeff(n)).norm() <= 1e-10 * one.sup_coeff().max(1.0));
        }
    }

    #[test]
    fn projector_is_idempotent(s in mean_zero_series(), c in -3.0f64..3.0) {
        let mut coeffs = s.coeffs().to_vec();
        coeffs[16] = Complex64::new(c, 0.0);
        let s = FourierSeries::new(1.0, coeffs).unwrap();
        let p = project_p0(&s);
        let pp = project_p0(&p);
        prop_assert_eq!(pp.coeffs(), p.coeffs());
        prop_assert_eq!(p.mean(), 0.0);
    }

    #[test]
    fn atomic_norm_ignores_order(atoms in prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..8)) {
        let mut locs = atoms.clone();
        for (i, a) in locs.iter_mut().enumerate() {
            a.1 = (i as f64 + a.1) / 8.0;
        }
        let mut rev = locs.clone();
        rev.reverse();
        let a = mnorm_atomic(&AtomicMeasure1D::new(locs.clone()).unwrap());
        let b = mnorm_atomic(&AtomicMeasure1D::new(rev).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        let expected: f64 = locs.iter().map(|(w, _)| w.abs()).sum();
        prop_assert!((a - expected).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn ridge_kernel_is_relu_for_nonnegative_offsets(x in prop::array::uniform2(-3.0f64..3.0), t in 0.0f64..2.0, angle in 0.0f64..TAU) {
        let xi = [angle.cos(), angle.sin()];
        let proj = x[0] * xi[0] + x[1] * xi[1];
        let v = corrected_ridge(2, 2, &x, t, &xi).unwrap();
        prop_assert!((v - (proj - t).max(0.0)).abs() <= 1e-12);
    }

    #[test]
    fn ridge_correction_cancels_for_large_negative_offsets(x in prop::array::uniform2(-3.0f64..3.0), t in -10.0f64..-1.0, angle in 0.0f64..TAU, m in 2u32..5) {
        let xi = [angle.cos(), angle.sin()];
        let proj = x[0] * xi[0] + x[1] * xi[1];
        let v = corrected_ridge(m, 2, &x, t, &xi).unwrap();
        if proj >= t {
            prop_assert_eq!(v, 0.0);
        } else {
            let u: f64 = proj - t;
            let fact: f64 = (1..m).map(f64::from).product();
            prop_assert!((v + u.powi(m as i32 - 1) / fact).abs() <= 1e-12 * u.abs().powi(m as i32 - 1).max(1.0));
        }
    }

    #[test]
    fn fraclap_kernel_is_radial(r in 0.1f64..20.0, a in 0.0f64..TAU, b in 0.0f64..TAU) {
        let k = FracLaplaceKernel::new(3.5, 2).unwrap();
        let u = k_frac_laplace(&k, &[r * a.cos(), r * a.sin()]).unwrap();
        let v = k_frac_laplace(&k, &[r * b.cos(), r * b.sin()]).unwrap();
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1e-300));
    }

    #[test]
    fn corrected_kernel_is_plain_near_the_origin(x in prop::array::uniform2(-4.0f64..4.0), r in 0.0f64..1.0, a in 0.0f64..TAU) {
        // The cut-off vanishes for ||y|| <= 1.
        let k = FracLaplaceKernel::new(3.5, 2).unwrap();
        let y = [r * a.cos(), r * a.sin()];
        let diff = [x[0] - y[0], x[1] - y[1]];
        prop_assume!(diff[0].hypot(diff[1]) > 1e-6);
        let h = corrected_kernel_frac(&k, &CutoffFunction, &x, &y).unwrap();
        let plain = k_frac_laplace(&k, &diff).unwrap();
        prop_assert!((h - plain).abs() <= 1e-12 * plain.abs().max(1.0));
    }

    #[test]
    fn model_json_round_trip_is_lossless(weights in prop::collection::vec(-3.0f64..3.0, 0..6), offset in -2.0f64..2.0) {
        let periodic = Model::Periodic(SplineModel {
            alpha: 1.7,
            period: 2.0,
            truncation: 64,
            offset,
            atoms: weights.iter().enumerate().map(|(i, w)| (*w, 0.3 * i as f64 + 0.01)).collect(),
        });
        let ridge = Model::Ridge(RidgeModel {
            m: 2,
            d: 2,
            atoms: weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let a = 0.9 * i as f64 + 0.1;
                    RidgeAtom { weight: *w, t: offset * i as f64, xi: vec![a.cos(), a.sin()] }
                })
                .collect(),
            poly: None,
        });
        for model in [periodic, ridge] {
            let json = serde_json::to_string(&model).unwrap();
            let back: Model = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&back, &model);
            let expected: f64 = weights.iter().map(|w| w.abs()).sum();
            prop_assert!((mnorm_of_model(&model).unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn model_is_linear_in_weights(w in prop::collection::vec(-3.0f64..3.0, 3), s in -2.0f64..2.0, x in -1.0f64..1.0) {
        let build = |scale: f64| Model::Periodic(SplineModel {
            alpha: 2.0,
            period: 1.0,
            truncation: 128,
            offset: 0.0,
            atoms: w.iter().enumerate().map(|(i, a)| (scale * a, 0.25 * i as f64 + 0.1)).collect(),
        });
        let one = build(1.0).evaluate_many(&[vec![x]]).unwrap()[0];
        let scaled = build(s).evaluate_many(&[vec![x]]).unwrap()[0];
        prop_assert!((scaled - s * one).abs() <= 1e-12 * one.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn radon_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, cx in -0.5f64..0.5, cy in -0.5f64..0.5) {
        let side = 61;
        let h = 0.2;
        let g1 = SampledField::from_fn_2d(side, h, |x, y| (-(x * x + y * y)).exp()).unwrap();
        let g2 = SampledField::from_fn_2d(side, h, |x, y| (-2.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp()).unwrap();
        let mix = SampledField::from_fn_2d(side, h, |x, y| {
            a * (-(x * x + y * y)).exp() + b * (-2.0 * ((x - cx).powi(2) + (y - cy).powi(2))).exp()
        })
        .unwrap();
        let spec = SinogramSpec::symmetric(41, 12, 4.0);
        let r1 = radon(&g1, spec).unwrap();
        let r2 = radon(&g2, spec).unwrap();
        let rm = radon(&mix, spec).unwrap();
        let scale = rm.max_abs().max(1.0);
        for ((u, v), w) in r1.values().iter().zip(r2.values()).zip(rm.values()) {
            prop_assert!((a * u + b * v - w).abs() <= 1e-12 * scale);
        }
    }
}
