//! Periodic fractional calculus on truncated Fourier series.
//!
//! A real `T`-periodic signal is stored through its coefficients
//! `s[n], n = -N..=N`, with `s(t) = sum_n s[n] exp(j n w0 t)` and `w0 = 2 pi / T`.
//! Fractional derivatives act as the Fourier multiplier `(j n w0)^alpha`
//! (principal branch), fractional integrals as its reciprocal on mean-zero
//! signals.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("coefficient array must have odd length 2N+1 with N >= 1, got {0}")]
    InvalidLength(usize),
    #[error("coefficients are not Hermitian at n = {n} (defect {defect:e})")]
    NotHermitian { n: i64, defect: f64 },
    #[error("non-finite coefficient at n = {0}")]
    NonFinite(i64),
    #[error("fractional integral of order {alpha} needs a mean-zero input, |s[0]| = {mean:e}")]
    NonZeroMeanForIntegral { alpha: f64, mean: f64 },
    #[error("periodic Green's function needs alpha > 1, got {0}")]
    AlphaTooSmall(f64),
    #[error("truncation order must be >= 1")]
    InvalidTruncation,
    #[error("atoms {0} and {1} share the same location")]
    DuplicateAtoms(usize, usize),
    #[error("series have different periods ({0} vs {1})")]
    PeriodMismatch(f64, f64),
    #[error("bump width {eps} is incompatible with the atom spacing")]
    BumpTooWide { eps: f64 },
}

pub type Result<T> = std::result::Result<T, FourierError>;

/// Truncated Fourier series of a real periodic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct FourierSeries {
    period: f64,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    period: f64,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<SeriesRepr> for FourierSeries {
    type Error = FourierError;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        FourierSeries::new(r.period, coeffs)
    }
}

impl From<FourierSeries> for SeriesRepr {
    fn from(s: FourierSeries) -> Self {
        SeriesRepr {
            period: s.period,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl FourierSeries {
    /// Builds a series from coefficients ordered `n = -N..=N`.
    pub fn new(period: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(FourierError::InvalidPeriod(period));
        }
        if coeffs.len() < 3 || coeffs.len() % 2 == 0 {
            return Err(FourierError::InvalidLength(coeffs.len()));
        }
        let order = (coeffs.len() / 2) as i64;
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(FourierError::NonFinite(i as i64 - order));
        }
        let s = Self { period, coeffs };
        s.check_hermitian(Tolerances::default().coeff)?;
        Ok(s)
    }

    /// Builds a series from the non-negative half `c[0..=N]`, filling
    /// negative indices by conjugation. `c[0]` must be real; its imaginary
    /// part is discarded.
    pub fn from_half(period: f64, half: &[Complex64]) -> Result<Self> {
        if half.len() < 2 {
            return Err(FourierError::InvalidLength(2 * half.len().max(1) - 1));
        }
        let n = half.len() - 1;
        let mut coeffs = vec![Complex64::default(); 2 * n + 1];
        coeffs[n] = Complex64::new(half[0].re, 0.0);
        for k in 1..=n {
            coeffs[n + k] = half[k];
            coeffs[n - k] = half[k].conj();
        }
        Self::new(period, coeffs)
    }

    pub fn zeros(period: f64, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(FourierError::InvalidTruncation);
        }
        Self::new(period, vec![Complex64::default(); 2 * order + 1])
    }

    fn check_hermitian(&self, tol: f64) -> Result<()> {
        let scale = self.sup_coeff().max(1.0);
        let n = self.order() as i64;
        if self.coeff(0).im.abs() > tol * scale {
            return Err(FourierError::NotHermitian {
                n: 0,
                defect: self.coeff(0).im.abs(),
            });
        }
        for k in 1..=n {
            let defect = (self.coeff(-k) - self.coeff(k).conj()).norm();
            if defect > tol * scale {
                return Err(FourierError::NotHermitian { n: k, defect });
            }
        }
        Ok(())
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Fundamental angular frequency `2 pi / T`.
    pub fn omega0(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Coefficient `s[n]`; zero outside the stored range.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let order = self.order() as i64;
        if n.abs() > order {
            Complex64::default()
        } else {
            self.coeffs[(n + order) as usize]
        }
    }

    /// Coefficients ordered `n = -N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mean value over one period, `s[0]`.
    pub fn mean(&self) -> f64 {
        self.coeff(0).re
    }

    pub fn sup_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the (real) signal at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let w = self.omega0() * t;
        let mut acc = 0.0;
        for k in 1..=self.order() {
            let e = Complex64::from_polar(1.0, k as f64 * w);
            acc += (self.coeff(k as i64) * e).re;
        }
        self.mean() + 2.0 * acc
    }

    /// Samples the signal on `n` equispaced points `t_i = i T / n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.eval(i as f64 * self.period / n as f64))
            .collect()
    }

    fn map_coeffs(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let order = self.order() as i64;
        let mut coeffs = vec![Complex64::default(); self.coeffs.len()];
        coeffs[order as usize] = f(0, self.coeff(0));
        for k in 1..=order {
            let c = f(k, self.coeff(k));
            coeffs[(order + k) as usize] = c;
            coeffs[(order - k) as usize] = c.conj();
        }
        Self {
            period: self.period,
            coeffs,
        }
    }

    /// Coefficientwise difference, over the larger of the two orders.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.period != other.period {
            return Err(FourierError::PeriodMismatch(self.period, other.period));
        }
        let order = self.order().max(other.order()) as i64;
        let coeffs = (-order..=order)
            .map(|n| self.coeff(n) - other.coeff(n))
            .collect();
        Ok(Self {
            period: self.period,
            coeffs,
        })
    }
}

/// Principal branch of `(j n w0)^alpha` for `n > 0`.
fn multiplier(n: i64, omega0: f64, alpha: f64) -> Complex64 {
    debug_assert!(n > 0);
    Complex64::from_polar((n as f64 * omega0).powf(alpha), alpha * FRAC_PI_2)
}

/// Fractional derivative of order `alpha` (a fractional integral when
/// `alpha < 0`).
///
/// Coefficient `n != 0` is multiplied by `(j n w0)^alpha`; the mean is kept
/// only for `alpha == 0`. Negative orders refuse inputs whose mean exceeds
/// `1e-12 * max|s[n]|` instead of silently projecting them.
pub fn frac_derivative(s: &FourierSeries, alpha: f64) -> Result<FourierSeries> {
    if alpha == 0.0 {
        return Ok(s.clone());
    }
    if alpha < 0.0 {
        let mean = s.coeff(0).norm();
        if mean > Tolerances::default().coeff * s.sup_coeff() {
            return Err(FourierError::NonZeroMeanForIntegral { alpha, mean });
        }
    }
    let w0 = s.omega0();
    Ok(s.map_coeffs(|n, c| {
        if n == 0 {
            Complex64::default()
        } else {
            c * multiplier(n, w0, alpha)
        }
    }))
}

/// Mean-removing projector onto the periodic Lizorkin space.
pub fn project_p0(s: &FourierSeries) -> FourierSeries {
    s.map_coeffs(|n, c| if n == 0 { Complex64::default() } else { c })
}

/// Truncated periodic Green's function of the fractional derivative,
/// precomputed for repeated evaluation.
///
/// `rho(t) = sum_{0<|n|<=N} (j n w0)^-alpha exp(j n w0 t)`. The series
/// converges absolutely for `alpha > 1`; the tail beyond `N` is
/// `O(N^(1-alpha))`.
#[derive(Debug, Clone)]
pub struct PeriodicGreen {
    alpha: f64,
    period: f64,
    omega0: f64,
    weights: Vec<f64>,
    phase: Complex64,
}

impl PeriodicGreen {
    pub fn new(alpha: f64, period: f64, truncation: usize) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(FourierError::AlphaTooSmall(alpha));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(FourierError::InvalidPeriod(period));
        }
        if truncation == 0 {
            return Err(FourierError::InvalidTruncation);
        }
        let omega0 = 2.0 * PI / period;
        let weights = (1..=truncation)
            .map(|n| (n as f64 * omega0).powf(-alpha))
            .collect();
        Ok(Self {
            alpha,
            period,
            omega0,
            weights,
            phase: Complex64::from_polar(1.0, -alpha * FRAC_PI_2),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    /// The conjugate-symmetric pair sum collapses to twice a real part.
    pub fn eval(&self, t: f64) -> f64 {
        let theta = self.omega0 * t.rem_euclid(self.period);
        let step = Complex64::from_polar(1.0, theta);
        let mut z = step;
        let mut acc = Complex64::default();
        for (i, w) in self.weights.iter().enumerate() {
            acc += z * *w;
            // resynchronise the rotation to keep round-off from drifting
            if (i + 1) % 128 == 0 {
                z = Complex64::from_polar(1.0, (i + 2) as f64 * theta);
            } else {
                z *= step;
            }
        }
        2.0 * (self.phase * acc).re
    }
}

/// One-shot evaluation of the periodic Green's function at `t`.
pub fn green_periodic(alpha: f64, t: f64, period: f64, truncation: usize) -> Result<f64> {
    Ok(PeriodicGreen::new(alpha, period, truncation)?.eval(t))
}

/// Finite periodic atomic measure `sum_k a_k delta_0(. - t_k)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure1D {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure1D {
    type Error = FourierError;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        AtomicMeasure1D::new(r.atoms.into_iter().map(|[a, t]| (a, t)).collect())
    }
}

impl From<AtomicMeasure1D> for MeasureRepr {
    fn from(m: AtomicMeasure1D) -> Self {
        MeasureRepr {
            atoms: m.atoms.iter().map(|&(a, t)| [a, t]).collect(),
        }
    }
}

/// Locations closer than this (relative to `max(1, |t|)`) count as equal.
const LOCATION_TOL: f64 = 1e-12;

impl AtomicMeasure1D {
    /// Atoms are `(weight, location)` pairs with pairwise distinct locations.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by(|&i, &j| atoms[i].1.total_cmp(&atoms[j].1));
        for w in order.windows(2) {
            let (ti, tj) = (atoms[w[0]].1, atoms[w[1]].1);
            if (tj - ti).abs() <= LOCATION_TOL * ti.abs().max(tj.abs()).max(1.0) {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(FourierError::DuplicateAtoms(a, b));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// M-norm of an atomic measure with distinct atoms: `sum_k |a_k|`.
pub fn mnorm_atomic(mu: &AtomicMeasure1D) -> f64 {
    mu.atoms.iter().map(|(a, _)| a.abs()).sum()
}

/// Fourier coefficients of the projected Dirac `delta_0(. - t0)`, i.e. the
/// periodic Dirac comb with its mean removed.
pub fn lizorkin_dirac(t0: f64, period: f64, order: usize) -> Result<FourierSeries> {
    if order == 0 {
        return Err(FourierError::InvalidTruncation);
    }
    let w0 = 2.0 * PI / period;
    let half: Vec<Complex64> = (0..=order)
        .map(|n| {
            if n == 0 {
                Complex64::default()
            } else {
                Complex64::from_polar(1.0 / period, -(n as f64) * w0 * t0)
            }
        })
        .collect();
    FourierSeries::from_half(period, &half)
}

/// Duality pairing `<f, phi> = int_T f(t) phi(t) dt` evaluated on coefficients.
pub fn pairing(f: &FourierSeries, phi: &FourierSeries) -> Result<f64> {
    if f.period() != phi.period() {
        return Err(FourierError::PeriodMismatch(f.period(), phi.period()));
    }
    let order = f.order().min(phi.order()) as i64;
    let mut acc = (f.coeff(0) * phi.coeff(0)).re;
    for n in 1..=order {
        acc += 2.0 * (f.coeff(n) * phi.coeff(-n)).re;
    }
    Ok(f.period() * acc)
}

fn smooth_bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }
}

/// Continuous mean-zero profile supported in `[-1, 1]` with `phi(0) = 1` and
/// values in `[-1, 1]`: a central bump balanced by two narrower side lobes.
pub fn bump_profile(t: f64) -> f64 {
    smooth_bump(2.0 * t) - smooth_bump(4.0 * (t - 0.75)) - smooth_bump(4.0 * (t + 0.75))
}

/// `sum_n bump_profile((t + nT - t0) / eps)` for `0 < eps < T / 2`.
pub fn periodic_bump(t: f64, t0: f64, eps: f64, period: f64) -> f64 {
    let u = (t - t0).rem_euclid(period);
    bump_profile(u / eps) + bump_profile((u - period) / eps)
}

/// Ratio `<delta_0(. - t0), phi> / ||phi||_inf` for the periodic bump test
/// function, using `grid` equispaced samples for the mean and the sup norm.
/// Values close to 1 witness `||delta_0(. - t0)||_M = 1`.
pub fn projected_dirac_saturation(t0: f64, period: f64, eps: f64, grid: usize) -> Result<f64> {
    let mu = AtomicMeasure1D::new(vec![(1.0, t0)])?;
    atomic_pairing_saturation(&mu, period, eps, grid)
}

/// Pairing of `sum_k a_k delta_0(. - t_k)` with the critical test function
/// `sum_k sign(a_k) phi_eps(. - t_k)`, divided by its sup norm.
///
/// Returns the pairing value normalised by the sup norm; for well separated
/// atoms it approaches `sum_k |a_k|`.
pub fn atomic_pairing_saturation(
    mu: &AtomicMeasure1D,
    period: f64,
    eps: f64,
    grid: usize,
) -> Result<f64> {
    if !(eps > 0.0 && eps < period / 2.0) {
        return Err(FourierError::BumpTooWide { eps });
    }
    let atoms = mu.atoms();
    for (i, &(_, ti)) in atoms.iter().enumerate() {
        for &(_, tj) in &atoms[i + 1..] {
            let gap = (ti - tj).rem_euclid(period);
            if gap.min(period - gap) <= 2.0 * eps {
                return Err(FourierError::BumpTooWide { eps });
            }
        }
    }
    let phi = |t: f64| -> f64 {
        atoms
            .iter()
            .map(|&(a, tk)| a.signum() * periodic_bump(t, tk, eps, period))
            .sum()
    };
    let samples: Vec<f64> = (0..grid)
        .map(|i| phi(i as f64 * period / grid as f64))
        .collect();
    let mean = samples.iter().sum::<f64>() / grid as f64;
    let sup = atoms
        .iter()
        .map(|&(_, tk)| phi(tk).abs())
        .chain(samples.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    if sup == 0.0 {
        return Ok(0.0);
    }
    // delta_0(. - t_k) = delta(. - t_k) - 1 in the normalised pairing
    let value: f64 = atoms.iter().map(|&(a, tk)| a * (phi(tk) - mean)).sum();
    Ok(value / sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(period: f64, order: usize) -> FourierSeries {
        let mut half = vec![Complex64::default(); order + 1];
        half[1] = Complex64::new(0.0, -0.5);
        FourierSeries::from_half(period, &half).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(
            FourierSeries::new(0.0, vec![Complex64::default(); 3]),
            Err(FourierError::InvalidPeriod(_))
        ));
        assert!(matches!(
            FourierSeries::new(1.0, vec![Complex64::default(); 4]),
            Err(FourierError::InvalidLength(4))
        ));
        let c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::default(),
            Complex64::new(0.5, 0.0),
        ];
        assert!(matches!(
            FourierSeries::new(1.0, c),
            Err(FourierError::NotHermitian { n: 1, .. })
        ));
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let s = sine(2.0, 4);
        let d = frac_derivative(&s, 1.0).unwrap();
        let w0 = s.omega0();
        assert!((d.coeff(1) - Complex64::new(w0 / 2.0, 0.0)).norm() < 1e-14);
        assert!((d.coeff(-1) - Complex64::new(w0 / 2.0, 0.0)).norm() < 1e-14);
        for i in 0..16 {
            let t = i as f64 * 0.13;
            assert!((d.eval(t) - w0 * (w0 * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn order_zero_is_identity() {
        let mut s = sine(1.0, 3);
        s.coeffs[3] = Complex64::new(2.0, 0.0);
        assert_eq!(frac_derivative(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn integral_refuses_nonzero_mean() {
        let mut s = sine(1.0, 3);
        s.coeffs[3] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            frac_derivative(&s, -0.5),
            Err(FourierError::NonZeroMeanForIntegral { .. })
        ));
        // positive orders simply drop the mean
        assert_eq!(frac_derivative(&s, 0.5).unwrap().mean(), 0.0);
    }

    #[test]
    fn projector_cases() {
        let mut s = FourierSeries::zeros(1.0, 2).unwrap();
        s.coeffs[2] = Complex64::new(3.0, 0.0);
        assert_eq!(project_p0(&s).sup_coeff(), 0.0);

        let sin = sine(1.0, 2);
        assert_eq!(project_p0(&sin), sin);

        let mut shifted = sin.clone();
        shifted.coeffs[2] = Complex64::new(2.0, 0.0);
        assert_eq!(project_p0(&shifted), sin);
    }

    #[test]
    fn green_rejects_small_alpha() {
        assert!(matches!(
            green_periodic(1.0, 0.0, 1.0, 8),
            Err(FourierError::AlphaTooSmall(_))
        ));
    }

    #[test]
    fn green_matches_bernoulli_closed_form() {
        // For T = 2 pi and alpha = 2: rho(t) = -2 sum cos(n t) / n^2
        // = -2 (pi^2/6 - pi t/2 + t^2/4) on [0, 2 pi].
        let n = 100_000;
        let g = PeriodicGreen::new(2.0, 2.0 * PI, n).unwrap();
        for &t in &[0.0, 0.7, PI, 5.0] {
            let exact = -2.0 * (PI * PI / 6.0 - PI * t / 2.0 + t * t / 4.0);
            // tail of sum 2/n^2 beyond N
            assert!((g.eval(t) - exact).abs() <= 2.1 / n as f64, "t = {t}");
        }
        assert!((g.eval(0.0) + PI * PI / 3.0).abs() < 2.1e-5);
    }

    #[test]
    fn green_complex_sum_has_no_imaginary_residual() {
        let (alpha, period, order) = (1.7, 3.0, 256);
        let g = PeriodicGreen::new(alpha, period, order).unwrap();
        let w0 = 2.0 * PI / period;
        for &t in &[0.0, 0.4, 1.9, 2.999] {
            let mut sum = Complex64::default();
            for n in 1..=order as i64 {
                for s in [n, -n] {
                    let jw = Complex64::new(0.0, s as f64 * w0);
                    sum += jw.powf(-alpha) * Complex64::from_polar(1.0, s as f64 * w0 * t);
                }
            }
            assert!(sum.im.abs() < 1e-10);
            assert!((sum.re - g.eval(t)).abs() < 1e-11);
        }
    }

    #[test]
    fn mnorm_examples() {
        assert_eq!(mnorm_atomic(&AtomicMeasure1D::new(vec![(1.0, 0.3)]).unwrap()), 1.0);
        assert_eq!(mnorm_atomic(&AtomicMeasure1D::default()), 0.0);
        let mu = AtomicMeasure1D::new(vec![(2.0, 0.1), (-3.0, 0.5)]).unwrap();
        assert_eq!(mnorm_atomic(&mu), 5.0);
        assert!(matches!(
            AtomicMeasure1D::new(vec![(1.0, 0.2), (2.0, 0.2)]),
            Err(FourierError::DuplicateAtoms(0, 1))
        ));
    }

    #[test]
    fn bump_profile_properties() {
        assert_eq!(bump_profile(0.0), 1.0);
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mut integral = 0.0;
        for i in 0..=n {
            let v = bump_profile(-1.0 + i as f64 * h);
            assert!(v.abs() <= 1.0);
            integral += v * h;
        }
        assert!(integral.abs() < 1e-10);
        assert_eq!(bump_profile(1.0), 0.0);
        assert_eq!(bump_profile(-1.2), 0.0);
    }

    #[test]
    fn projected_dirac_reaches_unit_norm() {
        let r = projected_dirac_saturation(0.37, 1.0, 0.01, 100_000).unwrap();
        assert!(r >= 0.99 && r <= 1.0 + 1e-9, "{r}");
        let mu = AtomicMeasure1D::new(vec![(2.0, 0.1), (-3.0, 0.5)]).unwrap();
        let r = atomic_pairing_saturation(&mu, 1.0, 0.01, 100_000).unwrap();
        assert!((r - 5.0).abs() < 5e-3, "{r}");
    }

    #[test]
    fn json_layouts() {
        let s = sine(2.0, 1);
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["period"], 2.0);
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 3);
        let back: FourierSeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);

        let mu = AtomicMeasure1D::new(vec![(2.0, 0.1), (-3.0, 0.5)]).unwrap();
        let text = serde_json::to_string(&mu).unwrap();
        assert_eq!(text, r#"{"atoms":[[2.0,0.1],[-3.0,0.5]]}"#);
        assert!(serde_json::from_str::<AtomicMeasure1D>(r#"{"atoms":[[1,0.2],[1,0.2]]}"#).is_err());
    }
}
