use lizkit::solver::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn periodic(alpha: f64) -> Family {
    Family::Periodic { alpha, period: 1.0, truncation: 256 }
}

fn periodic_data(n: usize, seed: u64) -> Vec<DataPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.8 * rng.random::<f64>()) / n as f64;
            DataPoint::scalar(t, (2.0 * std::f64::consts::PI * t).sin() + 0.3 * rng.random::<f64>())
        })
        .collect()
}

fn ridge_data(n: usize, seed: u64) -> Vec<DataPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let y = (x[0] - 0.5 * x[1]).abs() + 0.2 * x[1];
            DataPoint::new(x, y)
        })
        .collect()
}

fn regularized(data: Vec<DataPoint>, family: Family, lambda: f64) -> FitProblem {
    FitProblem::new(data, Loss::Quadratic, Mode::Regularized { lambda }, family).unwrap()
}

#[test]
fn single_sample_is_fit_by_the_offset() {
    let p = regularized(vec![DataPoint::scalar(0.3, 1.7)], periodic(2.0), 10.0);
    let out = fit(&p, &FitOptions::default()).unwrap();
    let Model::Periodic(m) = &out.model else { panic!() };
    assert!(m.atoms.is_empty());
    assert_eq!(m.offset, 1.7);
    assert!(out.converged);
    assert_eq!(out.objective, 0.0);
}

#[test]
fn large_lambda_gives_offset_only() {
    let data = periodic_data(12, 3);
    let mean = data.iter().map(|p| p.value).sum::<f64>() / 12.0;
    let out = fit(&regularized(data, periodic(2.0), 1e3), &FitOptions::default()).unwrap();
    let Model::Periodic(m) = &out.model else { panic!() };
    assert!(m.atoms.is_empty());
    assert!((m.offset - mean).abs() < 1e-12);
}

#[test]
fn mnorm_grows_as_lambda_decreases() {
    let data = periodic_data(15, 5);
    let opts = FitOptions::default();
    let mut prev: f64 = 0.0;
    for lambda in [1.0, 0.3, 0.1, 0.03, 0.01] {
        let out = fit(&regularized(data.clone(), periodic(2.0), lambda), &opts).unwrap();
        assert!(out.converged, "lambda {lambda}");
        let norm = mnorm_of_model(&out.model).unwrap();
        assert!(norm >= prev * (1.0 - opts.rel_gap), "lambda {lambda}: {norm} < {prev}");
        prev = norm;
    }
    assert!(prev > 0.0);
}

#[test]
fn constant_shift_moves_only_the_offset() {
    let data = periodic_data(14, 9);
    let shifted: Vec<DataPoint> = data.iter().map(|p| DataPoint::scalar(p.location[0], p.value + 2.5)).collect();
    let opts = FitOptions::default();
    let a = fit(&regularized(data, periodic(2.0), 0.2), &opts).unwrap();
    let b = fit(&regularized(shifted, periodic(2.0), 0.2), &opts).unwrap();
    let (Model::Periodic(ma), Model::Periodic(mb)) = (&a.model, &b.model) else { panic!() };
    assert!((mb.offset - ma.offset - 2.5).abs() < 1e-9, "{ma:?}\n{mb:?}");
    assert_eq!(ma.atoms.len(), mb.atoms.len());
    for ((wa, ta), (wb, tb)) in ma.atoms.iter().zip(&mb.atoms) {
        assert!((wa - wb).abs() < 1e-9 && (ta - tb).abs() < 1e-9);
    }
    let (na, nb) = (mnorm_of_model(&a.model).unwrap(), mnorm_of_model(&b.model).unwrap());
    assert!((na - nb).abs() < 1e-9);
}

#[test]
fn certificate_holds_on_finer_grid() {
    let opts = FitOptions::default();
    let cases = [
        (regularized(periodic_data(16, 2), periodic(1.6), 0.02), 0.02),
        (regularized(ridge_data(10, 4), Family::Ridge { m: 2, d: 2, polynomial: false }, 0.02), 0.02),
    ];
    for (p, lambda) in cases {
        let out = fit(&p, &opts).unwrap();
        assert!(out.converged);
        let peak = certificate_peak(&p, &out.fitted, 10, &opts).unwrap();
        assert!(peak <= lambda * (1.0 + 10.0 * opts.rel_gap), "{:?}: {}", p.family(), peak / lambda);
        assert!(out.relative_gap() <= opts.rel_gap * 10.0, "gap {} {:?}", out.relative_gap(), &out.diagnostics[out.diagnostics.len().saturating_sub(4)..]);
    }
}

#[test]
fn no_worse_than_the_grid_lasso() {
    // Ground-truth atoms on the oracle grid.
    let truth = Model::Periodic(SplineModel {
        alpha: 2.0,
        period: 1.0,
        truncation: 256,
        offset: -0.2,
        atoms: vec![(0.8, 0.25), (-0.5, 0.625)],
    });
    let ts: Vec<f64> = (0..12).map(|i| (i as f64 + 0.3) / 12.0).collect();
    let xs: Vec<Vec<f64>> = ts.iter().map(|t| vec![*t]).collect();
    let ys = truth.evaluate_many(&xs).unwrap();
    let data = ts.iter().zip(&ys).map(|(t, y)| DataPoint::scalar(*t, *y)).collect();
    let p = regularized(data, periodic(2.0), 1e-3);
    let opts = FitOptions::default();
    let out = fit(&p, &opts).unwrap();
    let (_, cols, unpen) = oracle_atoms(&p, 512, 1).unwrap();
    let oracle = grid_lasso(&cols, &unpen, &ys, 1e-3, 100_000, 1e-13);
    assert!(out.objective <= oracle.objective + opts.rel_gap * oracle.objective.abs(), "{} vs {}", out.objective, oracle.objective);
}

#[test]
fn atom_bounds_hold_for_every_family() {
    let opts = FitOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for lambda in [1e-1, 1e-3] {
        let problems = [
            regularized(periodic_data(8, 1), periodic(2.0), lambda),
            regularized(
                (0..8).map(|_| DataPoint::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], rng.random())).collect(),
                Family::Fraclap { alpha: 3.5, d: 2 },
                lambda,
            ),
            regularized(ridge_data(8, 6), Family::Ridge { m: 2, d: 2, polynomial: false }, lambda),
            regularized(ridge_data(8, 7), Family::Ridge { m: 2, d: 2, polynomial: true }, lambda),
        ];
        for p in problems {
            let out = fit(&p, &opts).unwrap();
            assert!(out.model.n_atoms() <= p.atom_bound(), "{:?}", p.family());
            out.model.validate().unwrap();
        }
    }
}

#[test]
fn huber_fit_reaches_its_bound() {
    let mut data = periodic_data(14, 8);
    data[4].value += 5.0;
    let p = FitProblem::new(data, Loss::Huber { delta: 0.1 }, Mode::Regularized { lambda: 0.02 }, periodic(2.0)).unwrap();
    let out = fit(&p, &FitOptions::default()).unwrap();
    assert!(out.converged);
    assert!(out.relative_gap() < 1e-4, "gap {}", out.relative_gap());
    assert!(out.lower_bound <= out.objective);
}

#[test]
fn fraclap_interpolation_hits_the_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let data: Vec<DataPoint> = (0..6).map(|_| DataPoint::scalar(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0))).collect();
    let p = FitProblem::new(data.clone(), Loss::Quadratic, Mode::Interpolation, Family::Fraclap { alpha: 2.5, d: 1 }).unwrap();
    let out = fit(&p, &FitOptions::default()).unwrap();
    let xs: Vec<Vec<f64>> = data.iter().map(|d| d.location.clone()).collect();
    let z = out.model.evaluate_many(&xs).unwrap();
    for (d, z) in data.iter().zip(z) {
        assert!((d.value - z).abs() <= 1e-8, "{} vs {}", d.value, z);
    }
    assert!(out.model.n_atoms() <= 6);
}

#[test]
fn fitted_values_match_the_model() {
    let p = regularized(ridge_data(9, 3), Family::Ridge { m: 2, d: 2, polynomial: true }, 0.01);
    let out = fit(&p, &FitOptions::default()).unwrap();
    let xs: Vec<Vec<f64>> = p.data().iter().map(|d| d.location.clone()).collect();
    let z = out.model.evaluate_many(&xs).unwrap();
    for (a, b) in z.iter().zip(&out.fitted) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn deterministic_for_a_seed() {
    let p = regularized(ridge_data(9, 12), Family::Ridge { m: 2, d: 2, polynomial: false }, 0.01);
    let a = fit(&p, &FitOptions::default()).unwrap();
    let b = fit(&p, &FitOptions::default()).unwrap();
    assert_eq!(serde_json::to_string(&a.model).unwrap(), serde_json::to_string(&b.model).unwrap());
}
