//! The invariant suite behind `lizkit verify`.
//!
//! Checks are organised in named groups (see [`GROUPS`]). Each produces one
//! or more [`CheckResult`] rows comparing a measured error against its
//! tolerance; a check passes when `measured <= tolerance`. Quantities that
//! must stay above a floor (norm saturation) are reported as the deficit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fourier::{
    frac_derivative, lizorkin_dirac, mnorm_atomic, pairing, project_p0, projected_dirac_saturation, AtomicMeasure1D,
    FourierError, FourierSeries,
};
use crate::kernels::{
    corrected_kernel_frac, k_frac_laplace, poly::multi_indices, verify_growth_bound, CutoffFunction, FracLaplaceKernel,
    KernelError, NormPowerDerivatives,
};
use crate::radon::{
    backproject, filter_krad_refined, radon, slice_check, Parity, RadonError, SampledField, SinogramGrid, SinogramSpec,
};
use crate::solver::{
    fit, grid_lasso, mnorm_of_model, oracle_atoms, verify_seminorm_ridge, DataPoint, Family, FitOptions, FitProblem,
    Loss, Mode, Model, RidgeAtom, RidgeModel, SeminormOptions, SolverError, SplineModel,
};

/// Check groups in execution order.
pub const GROUPS: &[&str] = &[
    "roundtrip",
    "projector",
    "mnorm",
    "slice",
    "fbp",
    "adjoint",
    "parity",
    "isotropy",
    "growth",
    "decay",
    "seminorm",
    "recovery",
    "oracle",
    "sparsity",
];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown check group {0:?}")]
    UnknownGroup(String),
    #[error("tolerance scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Radon(#[from] RadonError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub group: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Groups to run; empty means all.
    pub only: Vec<String>,
    /// Multiplies every tolerance.
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { only: Vec::new(), tolerance_scale: 1.0, seed: 0x5EED }
    }
}

struct Sink<'a> {
    group: &'static str,
    scale: f64,
    rows: &'a mut Vec<CheckResult>,
}

impl Sink<'_> {
    fn push(&mut self, name: &str, measured: f64, tolerance: f64) {
        let tolerance = tolerance * self.scale;
        self.rows.push(CheckResult {
            group: self.group,
            name: format!("{}.{}", self.group, name),
            measured,
            tolerance,
            passed: measured <= tolerance,
        });
    }
}

/// Runs the selected groups and returns every row.
pub fn run(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    if !(opts.tolerance_scale > 0.0 && opts.tolerance_scale.is_finite()) {
        return Err(VerifyError::InvalidScale(opts.tolerance_scale));
    }
    for g in &opts.only {
        if !GROUPS.contains(&g.as_str()) {
            return Err(VerifyError::UnknownGroup(g.clone()));
        }
    }
    let mut rows = Vec::new();
    for &g in GROUPS {
        if opts.only.is_empty() || opts.only.iter().any(|o| o == g) {
            run_group(g, opts, &mut rows)?;
        }
    }
    Ok(rows)
}

/// Runs one group, appending its rows.
pub fn run_group(group: &str, opts: &VerifyOptions, rows: &mut Vec<CheckResult>) -> Result<()> {
    let Some(&name) = GROUPS.iter().find(|g| **g == group) else {
        return Err(VerifyError::UnknownGroup(group.to_string()));
    };
    let mut sink = Sink { group: name, scale: opts.tolerance_scale, rows };
    let seed = opts.seed;
    match name {
        "roundtrip" => roundtrip(&mut sink, seed),
        "projector" => projector(&mut sink, seed),
        "mnorm" => mnorm(&mut sink, seed),
        "slice" => slice(&mut sink),
        "fbp" => fbp(&mut sink),
        "adjoint" => adjoint(&mut sink, seed),
        "parity" => parity(&mut sink),
        "isotropy" => isotropy(&mut sink),
        "growth" => growth(&mut sink),
        "decay" => decay(&mut sink, seed),
        "seminorm" => seminorm(&mut sink),
        "recovery" => recovery(&mut sink),
        "oracle" => oracle(&mut sink, seed),
        "sparsity" => sparsity(&mut sink, seed),
        _ => unreachable!(),
    }
}

/// CSV with columns `check,measured,tolerance,pass`.
pub fn to_csv(rows: &[CheckResult]) -> String {
    let mut out = String::from("check,measured,tolerance,pass\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{:e},{}\n", r.name, r.measured, r.tolerance, r.passed));
    }
    out
}

fn random_series(rng: &mut ChaCha8Rng, order: usize, period: f64) -> Result<FourierSeries> {
    let mut half = vec![Complex64::default(); order + 1];
    for (n, c) in half.iter_mut().enumerate().skip(1) {
        let decay = 1.0 / (1.0 + n as f64 / 16.0).powi(2);
        *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * decay;
    }
    Ok(FourierSeries::from_half(period, &half)?)
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn roundtrip(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series: Vec<FourierSeries> = (0..20).map(|_| random_series(&mut rng, 256, 1.0)).collect::<Result<_>>()?;
    for alpha in [0.5, 1.0, 1.5, 2.0] {
        let mut worst: f64 = 0.0;
        for s in &series {
            let back = frac_derivative(&frac_derivative(s, alpha)?, -alpha)?;
            worst = worst.max(sup(&back.sub(s)?.sample(1024)));
        }
        sink.push(&format!("alpha{alpha}"), worst, 1e-9);
    }
    Ok(())
}

fn projector(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
    let (mut idem, mut mean, mut dirac): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..20 {
        let mut s = random_series(&mut rng, 64, 1.0)?.coeffs().to_vec();
        s[64] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
        let s = FourierSeries::new(1.0, s)?;
        let p = project_p0(&s);
        let pp = project_p0(&p);
        for n in -64i64..=64 {
            idem = idem.max((pp.coeff(n) - p.coeff(n)).norm());
        }
        let samples = p.sample(512);
        mean = mean.max((samples.iter().sum::<f64>() / 512.0).abs());
        let t0 = rng.random::<f64>();
        let delta = lizorkin_dirac(t0, 1.0, 64)?;
        dirac = dirac.max((pairing(&delta, &p)? - p.eval(t0)).abs() / sup(&samples).max(1.0));
    }
    sink.push("idempotent", idem, 0.0);
    sink.push("mean", mean, 1e-14);
    sink.push("dirac_pairing", dirac, 1e-10);
    Ok(())
}

fn mnorm(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.random_range(1..8usize);
        let atoms: Vec<(f64, f64)> = (0..k).map(|i| (rng.random_range(-5.0..5.0), (i as f64 + rng.random::<f64>()) / 8.0)).collect();
        let exact: f64 = atoms.iter().map(|a| a.0.abs()).sum();
        worst = worst.max((mnorm_atomic(&AtomicMeasure1D::new(atoms)?) - exact).abs());
    }
    sink.push("atomic_sum", worst, 0.0);
    let ratio = projected_dirac_saturation(0.37, 1.0, 0.01, 100_000)?;
    sink.push("saturation_deficit", 1.0 - ratio, 0.01);
    Ok(())
}

fn slice(sink: &mut Sink) -> Result<()> {
    let gauss = SampledField::from_fn_2d(128, 0.11, |x, y| (-(x * x + y * y) / 2.0).exp())?;
    let odd = SampledField::from_fn_2d(128, 0.11, |x, y| x * (-(x * x + y * y) / 2.0).exp())?;
    for (name, f, tol) in [("gaussian", &gauss, 1e-6), ("odd_gaussian", &odd, 1e-5)] {
        let reports = crate::par::map_range(180, |j| {
            let (s, c) = (PI * j as f64 / 180.0).sin_cos();
            slice_check(f, [c, s])
        });
        // Directions where the transform vanishes (xi = e_2 for an odd field
        // in x) are measured against the largest magnitude seen overall.
        let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
        for r in reports {
            let r = r?;
            err = err.max(r.max_abs_error);
            scale = scale.max(r.reference_scale);
        }
        sink.push(name, err / scale, tol);
    }
    Ok(())
}

/// `R* K_rad R f` on the grid of `f`, with `t` spacing equal to the grid
/// spacing and `refine`-fold band-limited upsampling before backprojection.
pub fn filtered_backprojection(f: &SampledField, n_dir: usize, refine: usize) -> Result<SampledField> {
    let h = f.spacing();
    let reach = (f.side() as f64 - 1.0) / 2.0 * h * std::f64::consts::SQRT_2 + 2.0 * h;
    let half = (reach / h).ceil() as usize;
    let spec = SinogramSpec::symmetric(2 * half + 1, n_dir, half as f64 * h);
    let g = radon(f, spec)?;
    let filtered = filter_krad_refined(&g, refine)?;
    Ok(backproject(&filtered, f.side(), h)?)
}

fn relative_sup_error(a: &SampledField, b: &SampledField) -> f64 {
    let err = a.values().iter().zip(b.values()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    err / a.sup_norm()
}

fn fbp(sink: &mut Sink) -> Result<()> {
    let log = SampledField::from_fn_2d(128, 0.11, |x, y| {
        let r2 = x * x + y * y;
        (r2 - 2.0) * (-r2 / 2.0).exp()
    })?;
    let wave = SampledField::from_fn_2d(128, 0.11, |x, y| {
        let (u, v) = (x - 0.4, y + 0.2);
        u * v * (1.5 * x).cos() * (-(u * u + v * v) / 2.0).exp()
    })?;
    for (name, f) in [("mexican_hat", &log), ("modulated_product", &wave)] {
        let back = filtered_backprojection(f, 180, 8)?;
        sink.push(name, relative_sup_error(f, &back), 1e-3);
    }
    Ok(())
}

fn adjoint(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
    let (side, h) = (71, 0.2);
    let n_dir = 60;
    let reach: f64 = 10.5;
    let n_t = 2 * (reach / h).round() as usize + 1;
    let coarse = SinogramSpec::symmetric(n_t, n_dir, reach);
    let fine = SinogramSpec::symmetric(16 * (n_t - 1) + 1, n_dir, reach);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let blobs: Vec<(f64, f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.5..0.9), rng.random_range(-1.0..1.0)))
            .collect();
        let f = SampledField::from_fn_2d(side, h, |x, y| {
            blobs.iter().map(|(cx, cy, s, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp()).sum()
        })?;
        let (c, u) = ([rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)], rng.random_range(0.0..PI));
        let (s, b) = (rng.random_range(0.7..1.3), rng.random_range(-0.5..0.5));
        let g = move |t: f64, xi: [f64; 2]| {
            let v = t - (c[0] * xi[0] + c[1] * xi[1]);
            (-v * v / (2.0 * s * s)).exp() * (1.0 + b * (u.cos() * xi[0] + u.sin() * xi[1]) * v)
        };
        let rf = radon(&f, coarse)?;
        let gc = SinogramGrid::from_fn(coarse, Parity::Even, g)?;
        let lhs = rf.inner(&gc);
        let rhs = f.inner(&backproject(&SinogramGrid::from_fn(fine, Parity::Even, g)?, side, h)?);
        // Relative to the Cauchy-Schwarz scale, so near-orthogonal pairs
        // do not inflate the error.
        let scale = (rf.inner(&rf) * gc.inner(&gc)).sqrt();
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    sink.push("random_pairs", worst, 1e-4);
    Ok(())
}

fn parity(sink: &mut Sink) -> Result<()> {
    let even = SampledField::from_fn_2d(121, 0.12, |x, y| (x * y + 1.0) * (-(x * x + 2.0 * y * y) / 2.0).exp())?;
    let odd = SampledField::from_fn_2d(121, 0.12, |x, y| (x + y * y * x) * (-(x * x + y * y) / 2.0).exp())?;
    let spec = SinogramSpec::symmetric(41, 20, 4.0);
    let defect = |f: &SampledField, sign: f64| -> Result<f64> {
        let g = radon(f, spec)?;
        Ok(g.column_reflection_defect(sign).unwrap_or(f64::INFINITY))
    };
    sink.push("even_field", defect(&even, 1.0)?, 1e-10);
    sink.push("odd_field", defect(&odd, -1.0)?, 1e-10);
    Ok(())
}

fn isotropy(sink: &mut Sink) -> Result<()> {
    let f = SampledField::from_fn_2d(129, 0.12, |x, y| {
        let r2 = x * x + y * y;
        (1.0 - r2 / 2.0) * (-r2 / 2.0).exp()
    })?;
    let g = radon(&f, SinogramSpec::symmetric(61, 36, 3.0))?;
    sink.push("column_spread", g.column_spread(), 1e-8);
    Ok(())
}

/// Central (mixed) differences of order `|k| <= 2`.
fn finite_difference(f: &dyn Fn(&[f64]) -> f64, x: &[f64], k: &[u32]) -> f64 {
    let order: u32 = k.iter().sum();
    let h = 1e-3 * crate::kernels::norm(x).max(1.0);
    let at = |di: usize, a: f64, dj: usize, b: f64| {
        let mut z = x.to_vec();
        z[di] += a;
        z[dj] += b;
        f(&z)
    };
    match order {
        0 => f(x),
        1 => {
            let i = k.iter().position(|&v| v == 1).unwrap_or(0);
            (at(i, h, i, 0.0) - at(i, -h, i, 0.0)) / (2.0 * h)
        }
        _ => {
            let i = k.iter().position(|&v| v > 0).unwrap_or(0);
            let j = if k[i] == 2 { i } else { k.iter().rposition(|&v| v > 0).unwrap_or(i) };
            if i == j {
                (at(i, h, i, 0.0) - 2.0 * f(x) + at(i, -h, i, 0.0)) / (h * h)
            } else {
                (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h)
            }
        }
    }
}

fn growth(sink: &mut Sink) -> Result<()> {
    for (d, alpha) in [(1usize, 2.5), (2, 3.5)] {
        let kern = FracLaplaceKernel::new(alpha, d)?;
        let a = kern.power_constant().ok_or(KernelError::InvalidRegime { alpha, d })?;
        let der = NormPowerDerivatives::new(kern.excess(), d, 2);
        let f = |x: &[f64]| k_frac_laplace(&kern, x).unwrap_or(f64::NAN);
        let dirs: Vec<Vec<f64>> = if d == 1 {
            vec![vec![1.0], vec![-1.0]]
        } else {
            (0..8).map(|j| {
                let (s, c) = (0.3 + PI * j as f64 / 4.0).sin_cos();
                vec![c, s]
            }).collect()
        };
        let norms: Vec<f64> = (0..=20).map(|i| 10f64.powf(2.0 * i as f64 / 20.0)).collect();
        let samples: Vec<Vec<f64>> = norms.iter().flat_map(|r| dirs.iter().map(move |u| u.iter().map(|c| r * c).collect())).collect();
        let mut fd_err: f64 = 0.0;
        let mut slope: f64 = 0.0;
        for k in multi_indices(d, 2) {
            let order: u32 = k.iter().sum();
            for x in samples.iter().step_by(5) {
                let exact = a * der.eval(&k, x);
                let approx = finite_difference(&f, x, &k);
                let scale = exact.abs().max(1e-3 * a.abs() * crate::kernels::norm(x).powf(kern.excess() - f64::from(order)));
                fd_err = fd_err.max((exact - approx).abs() / scale);
            }
            slope = slope.max(verify_growth_bound(&kern, &k, &samples)?.slope.abs());
        }
        sink.push(&format!("d{d}_alpha{alpha}_fd"), fd_err, 1e-4);
        sink.push(&format!("d{d}_alpha{alpha}_slope"), slope, crate::kernels::MAX_TREND_SLOPE);
    }
    Ok(())
}

fn decay(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
    for (d, alpha) in [(1usize, 2.5), (2, 3.5)] {
        let kern = FracLaplaceKernel::new(alpha, d)?;
        let excess = kern.excess();
        let unit = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            if d == 1 {
                vec![if rng.random::<bool>() { 1.0 } else { -1.0 }]
            } else {
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                vec![a.cos(), a.sin()]
            }
        };
        let h = |x: &[f64], y: &[f64]| corrected_kernel_frac(&kern, &CutoffFunction, x, y);
        // Monotone decay in the atom location.
        let mut worst_ratio: f64 = 0.0;
        for _ in 0..10 {
            let x: Vec<f64> = unit(&mut rng).iter().map(|c| c * rng.random_range(0.5..3.0)).collect();
            let u = unit(&mut rng);
            let vals: Vec<f64> = [10.0, 100.0, 1000.0]
                .iter()
                .map(|r| h(&x, &u.iter().map(|c| c * r).collect::<Vec<_>>()).map(f64::abs))
                .collect::<std::result::Result<_, _>>()?;
            worst_ratio = worst_ratio.max(vals[1] / vals[0]).max(vals[2] / vals[1]);
        }
        sink.push(&format!("d{d}_alpha{alpha}_monotone"), worst_ratio, 1.0 - 1e-3);
        // Calibrate C on one sample, test the bound on another.
        let draw = |rng: &mut ChaCha8Rng| -> Result<f64> {
            let x: Vec<f64> = unit(rng).iter().map(|c| c * 10f64.powf(rng.random_range(-1.0..2.0))).collect();
            let y: Vec<f64> = unit(rng).iter().map(|c| c * 10f64.powf(rng.random_range(-1.0..3.0))).collect();
            let v = h(&x, &y)?.abs();
            Ok(v / (crate::kernels::norm(&x) + 2.0).powf(excess))
        };
        let mut c: f64 = 0.0;
        for _ in 0..2000 {
            c = c.max(draw(&mut rng)?);
        }
        let mut worst: f64 = 0.0;
        for _ in 0..2000 {
            worst = worst.max(draw(&mut rng)? / c);
        }
        sink.push(&format!("d{d}_alpha{alpha}_bound"), worst, 2.0);
    }
    Ok(())
}

fn seminorm(sink: &mut Sink) -> Result<()> {
    let single = RidgeModel { m: 2, d: 2, atoms: vec![RidgeAtom { weight: 1.0, t: 0.3, xi: vec![0.4f64.cos(), 0.4f64.sin()] }], poly: None };
    let r = verify_seminorm_ridge(&single, &SeminormOptions::default())?;
    sink.push("single_atom", r.rel_deviation, 0.1);
    let pair = RidgeModel {
        m: 2,
        d: 2,
        atoms: vec![
            RidgeAtom { weight: 1.0, t: 0.2, xi: vec![0.1f64.cos(), 0.1f64.sin()] },
            RidgeAtom { weight: 2.0, t: -0.4, xi: vec![1.3f64.cos(), 1.3f64.sin()] },
        ],
        poly: None,
    };
    let r = verify_seminorm_ridge(&pair, &SeminormOptions::default())?;
    sink.push("two_atoms", r.rel_deviation, 0.1);
    Ok(())
}

/// Data seeds of the two fixed solver problems.
pub const RECOVERY_SEED: u64 = 7;
pub const RELU_SEED: u64 = 11;

/// Ground truth, data and fit of the periodic recovery problem: three atoms,
/// `alpha = 2`, twenty samples (including the atom locations), interpolation.
pub fn recovery_problem(seed: u64) -> Result<(Model, FitProblem)> {
    let truth = Model::Periodic(SplineModel {
        alpha: 2.0,
        period: 1.0,
        truncation: 512,
        offset: 0.3,
        atoms: vec![(1.0, 0.15), (-0.7, 0.45), (0.5, 0.8)],
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ts: Vec<f64> = (0..20).map(|i| (i as f64 + 0.5 * rng.random::<f64>()) / 20.0).collect();
    ts[3] = 0.15;
    ts[9] = 0.45;
    ts[16] = 0.8;
    let xs: Vec<Vec<f64>> = ts.iter().map(|t| vec![*t]).collect();
    let ys = truth.evaluate_many(&xs)?;
    let data = ts.iter().zip(&ys).map(|(t, y)| DataPoint::scalar(*t, *y)).collect();
    let family = Family::Periodic { alpha: 2.0, period: 1.0, truncation: 512 };
    Ok((truth, FitProblem::new(data, Loss::Quadratic, Mode::Interpolation, family)?))
}

fn recovery(sink: &mut Sink) -> Result<()> {
    let (truth, problem) = recovery_problem(RECOVERY_SEED)?;
    let out = fit(&problem, &FitOptions::default())?;
    let held: Vec<Vec<f64>> = (0..200).map(|i| vec![(i as f64 + 0.37) / 200.0]).collect();
    let a = truth.evaluate_many(&held)?;
    let b = out.model.evaluate_many(&held)?;
    let err = a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / sup(&a);
    sink.push("heldout_rel_error", err, 1e-3);
    sink.push("atom_count", out.model.n_atoms() as f64, 19.0);
    sink.push("mnorm_excess", mnorm_of_model(&out.model)? - mnorm_of_model(&truth)?, 1e-6);
    Ok(())
}

/// The ReLU problem of the oracle comparison: ten uniform points in
/// `[-1, 1]^2`, `lambda = 1e-2`.
pub fn relu_problem(seed: u64) -> Result<FitProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<DataPoint> = (0..10)
        .map(|_| {
            let x: Vec<f64> = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let y = (2.0 * x[0]).sin() + x[1] * x[1];
            DataPoint::new(x, y)
        })
        .collect();
    Ok(FitProblem::new(data, Loss::Quadratic, Mode::Regularized { lambda: 1e-2 }, Family::Ridge { m: 2, d: 2, polynomial: false })?)
}

fn oracle(sink: &mut Sink, seed: u64) -> Result<()> {
    let problem = relu_problem(RELU_SEED)?;
    let Mode::Regularized { lambda } = problem.mode() else { unreachable!() };
    let out = fit(&problem, &FitOptions::default())?;
    let (_, cols, unpen) = oracle_atoms(&problem, 10_000, seed)?;
    let y: Vec<f64> = problem.data().iter().map(|p| p.value).collect();
    let lasso = grid_lasso(&cols, &unpen, &y, lambda, 50_000, 1e-10);
    sink.push("objective_rel_diff", (out.objective - lasso.objective).abs() / lasso.objective.abs(), 0.01);
    Ok(())
}

fn sparsity(sink: &mut Sink, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
    let opts = FitOptions { seed, ..FitOptions::default() };
    let mut excess: f64 = f64::NEG_INFINITY;
    for i in 0..50 {
        let m = rng.random_range(4..12usize);
        let lambda = 10f64.powf(rng.random_range(-3.0..-1.0));
        let (family, dim) = match i % 3 {
            0 => (Family::Periodic { alpha: rng.random_range(1.5..3.0), period: 1.0, truncation: 128 }, 1),
            1 if rng.random::<bool>() => (Family::Fraclap { alpha: 2.5, d: 1 }, 1),
            1 => (Family::Fraclap { alpha: 3.5, d: 2 }, 2),
            _ => (Family::Ridge { m: rng.random_range(2..4), d: 2, polynomial: rng.random::<bool>() }, 2),
        };
        let data: Vec<DataPoint> = (0..m)
            .map(|j| {
                let x: Vec<f64> = match family {
                    Family::Periodic { .. } => vec![(j as f64 + 0.9 * rng.random::<f64>()) / m as f64],
                    _ => (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
                };
                DataPoint::new(x, rng.random_range(-1.0..1.0))
            })
            .collect();
        let problem = FitProblem::new(data, Loss::Quadratic, Mode::Regularized { lambda }, family)?;
        let out = fit(&problem, &opts)?;
        excess = excess.max(out.model.n_atoms() as f64 - problem.atom_bound() as f64);
    }
    sink.push("max_atoms_over_bound", excess, 0.0);
    Ok(())
}
