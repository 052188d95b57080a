use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Family, FitProblem, Result};
use crate::fourier::PeriodicGreen;
use crate::kernels::poly::{monomial_value, multi_indices};
use crate::kernels::{FracLaplaceKernel, RidgeKernel};
use crate::par;

/// Parameters of one atom of a family's dictionary.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Periodic { tau: f64 },
    Point { x: Vec<f64> },
    Ridge { t: f64, xi: Vec<f64> },
}

#[derive(Debug, Clone)]
enum Kind {
    Periodic(PeriodicGreen),
    Fraclap(FracLaplaceKernel),
    Ridge { kernel: RidgeKernel, poly_degree: Option<u32> },
}

/// A family's kernel bound to a set of data locations.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    kind: Kind,
    locations: Vec<Vec<f64>>,
    /// Size of the region of interest, used to scale steps and merge distances.
    scale: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Basis {
    pub(crate) fn new(problem: &FitProblem) -> Result<Self> {
        let locations: Vec<Vec<f64>> = problem.data().iter().map(|p| p.location.clone()).collect();
        Self::for_locations(problem.family(), locations)
    }

    pub(crate) fn for_locations(family: Family, locations: Vec<Vec<f64>>) -> Result<Self> {
        let dim = family.dim();
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for x in &locations {
            for i in 0..dim {
                lower[i] = lower[i].min(x[i]);
                upper[i] = upper[i].max(x[i]);
            }
        }
        let (kind, scale) = match family {
            Family::Periodic { alpha, period, truncation } => {
                (Kind::Periodic(PeriodicGreen::new(alpha, period, truncation)?), period)
            }
            Family::Fraclap { alpha, d } => {
                let extent = (0..d).map(|i| upper[i] - lower[i]).fold(0.0, f64::max);
                (Kind::Fraclap(FracLaplaceKernel::new(alpha, d)?), extent.max(1.0))
            }
            Family::Ridge { m, d, polynomial } => {
                let r = locations.iter().map(|x| crate::kernels::norm(x)).fold(0.0, f64::max);
                let kernel = RidgeKernel::new(m, d)?;
                (Kind::Ridge { kernel, poly_degree: polynomial.then_some(m - 1) }, r.max(1.0))
            }
        };
        Ok(Self { kind, locations, scale, lower, upper })
    }

    pub(crate) fn kernel(&self, x: &[f64], atom: &Atom) -> f64 {
        match (&self.kind, atom) {
            (Kind::Periodic(g), Atom::Periodic { tau }) => g.eval(x[0] - tau),
            (Kind::Fraclap(k), Atom::Point { x: y }) => k.corrected_unchecked(x, y),
            (Kind::Ridge { kernel, .. }, Atom::Ridge { t, xi }) => kernel.eval_unchecked(x, *t, xi),
            _ => unreachable!("atom does not belong to this family"),
        }
    }

    /// Kernel values at every data location.
    pub(crate) fn column(&self, atom: &Atom) -> Vec<f64> {
        self.locations.iter().map(|x| self.kernel(x, atom)).collect()
    }

    pub(crate) fn columns(&self, atoms: &[Atom]) -> Vec<Vec<f64>> {
        par::map_slice(atoms, |a| self.column(a))
    }

    /// Exponents of the unpenalised monomials (the offset is the zero exponent).
    pub(crate) fn unpenalized_terms(&self) -> Vec<Vec<u32>> {
        match &self.kind {
            Kind::Periodic(_) => vec![vec![0]],
            Kind::Fraclap(_) => Vec::new(),
            Kind::Ridge { kernel, poly_degree } => match poly_degree {
                Some(q) => multi_indices(kernel.dim(), *q),
                None => Vec::new(),
            },
        }
    }

    pub(crate) fn unpenalized_columns(&self) -> Vec<Vec<f64>> {
        self.unpenalized_terms()
            .iter()
            .map(|k| self.locations.iter().map(|x| monomial_value(k, x)).collect())
            .collect()
    }

    /// Coarse candidate grid, deterministic for a given seed. Candidates whose
    /// column vanishes on the data are dropped.
    pub(crate) fn candidates(&self, target: usize, seed: u64) -> Vec<Atom> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = match &self.kind {
            Kind::Periodic(g) => {
                let period = g.period();
                let n = target.max(8);
                let mut atoms: Vec<Atom> = (0..n).map(|i| Atom::Periodic { tau: period * i as f64 / n as f64 }).collect();
                atoms.extend(self.locations.iter().map(|x| Atom::Periodic { tau: x[0].rem_euclid(period) }));
                atoms
            }
            Kind::Fraclap(k) => {
                let d = k.dim();
                let (lo, hi) = self.padded_box();
                let mut atoms = Vec::new();
                if d <= 2 {
                    let side = ((target as f64).powf(1.0 / d as f64).round() as usize).max(4);
                    let axis = |i: usize, j: usize| lo[i] + (hi[i] - lo[i]) * j as f64 / (side - 1) as f64;
                    if d == 1 {
                        atoms.extend((0..side).map(|j| Atom::Point { x: vec![axis(0, j)] }));
                    } else {
                        for a in 0..side {
                            for b in 0..side {
                                atoms.push(Atom::Point { x: vec![axis(0, a), axis(1, b)] });
                            }
                        }
                    }
                } else {
                    for _ in 0..target {
                        let x = (0..d).map(|i| rng.random_range(lo[i]..=hi[i])).collect();
                        atoms.push(Atom::Point { x });
                    }
                }
                atoms.extend(self.locations.iter().map(|x| Atom::Point { x: x.clone() }));
                atoms
            }
            Kind::Ridge { kernel, .. } => {
                let d = kernel.dim();
                let n_dir = if d == 2 { 64 } else { 64 * (d - 1) };
                let dirs: Vec<Vec<f64>> = if d == 1 {
                    vec![vec![1.0], vec![-1.0]]
                } else if d == 2 {
                    (0..n_dir)
                        .map(|j| {
                            let (s, c) = (2.0 * PI * j as f64 / n_dir as f64).sin_cos();
                            vec![c, s]
                        })
                        .collect()
                } else {
                    (0..n_dir).map(|_| random_direction(d, &mut rng)).collect()
                };
                let n_t = (target / dirs.len()).max(8);
                let r = self.scale;
                let mut atoms = Vec::new();
                for xi in &dirs {
                    for j in 0..n_t {
                        atoms.push(Atom::Ridge { t: -r + 2.0 * r * j as f64 / (n_t - 1) as f64, xi: xi.clone() });
                    }
                    for x in &self.locations {
                        let proj: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
                        atoms.push(Atom::Ridge { t: proj, xi: xi.clone() });
                    }
                }
                atoms
            }
        };
        let cols = self.columns(&atoms);
        atoms
            .into_iter()
            .zip(cols)
            .filter(|(_, c)| c.iter().any(|v| *v != 0.0))
            .map(|(a, _)| a)
            .collect()
    }

    fn padded_box(&self) -> (Vec<f64>, Vec<f64>) {
        let pad = 0.1 * self.scale;
        (
            self.lower.iter().map(|v| v - pad).collect(),
            self.upper.iter().map(|v| v + pad).collect(),
        )
    }

    /// Typical spacing of a candidate grid of the given size, per parameter.
    fn steps(&self, target: usize) -> Vec<f64> {
        match &self.kind {
            Kind::Periodic(g) => vec![g.period() / target.max(8) as f64],
            Kind::Fraclap(k) => {
                let d = k.dim() as f64;
                let side = (target as f64).powf(1.0 / d).max(4.0);
                vec![1.2 * self.scale / side; k.dim()]
            }
            Kind::Ridge { kernel, .. } => {
                let d = kernel.dim();
                let n_dir = if d == 2 { 64.0 } else { 64.0 * (d as f64 - 1.0) };
                let n_t = (target as f64 / n_dir).max(8.0);
                let mut s = vec![2.0 * self.scale / n_t];
                s.extend(std::iter::repeat_n(2.0 * PI / n_dir, d.saturating_sub(1)));
                s
            }
        }
    }

    /// Locally maximises `score` (typically `|eta|`) starting from `atom`.
    pub(crate) fn refine(&self, atom: &Atom, target: usize, score: impl Fn(&Atom) -> f64) -> Atom {
        let steps = self.steps(target);
        match atom {
            Atom::Periodic { tau } => {
                let period = self.scale;
                let f = |s: f64| score(&Atom::Periodic { tau: s.rem_euclid(period) });
                let best = golden_max(&f, tau - steps[0], tau + steps[0], *tau, 1e-13 * period);
                Atom::Periodic { tau: best.rem_euclid(period) }
            }
            Atom::Point { x } => {
                let f = |p: &[f64]| score(&Atom::Point { x: p.to_vec() });
                let best = compass_max(&f, x.clone(), steps, 1e-12 * self.scale);
                Atom::Point { x: best }
            }
            Atom::Ridge { t, xi } => {
                let d = xi.len();
                let build = |p: &[f64]| {
                    let mut local = vec![p[0] - t];
                    local.extend_from_slice(&p[1..d]);
                    self.shift(atom, &local)
                };
                let mut p0 = vec![*t];
                p0.extend(std::iter::repeat_n(0.0, d - 1));
                let f = |p: &[f64]| score(&build(p));
                let best = compass_max(&f, p0, steps, 1e-12);
                // Re-centre and polish once more around the new direction.
                let atom = build(&best);
                if d > 1 && best[1..].iter().any(|v| *v != 0.0) {
                    return self.refine_once_more(&atom, target, &score);
                }
                atom
            }
        }
    }

    fn refine_once_more(&self, atom: &Atom, target: usize, score: &impl Fn(&Atom) -> f64) -> Atom {
        let Atom::Ridge { t, xi } = atom else { unreachable!() };
        let d = xi.len();
        let steps: Vec<f64> = self.steps(target).iter().map(|s| s * 0.05).collect();
        let build = |p: &[f64]| {
            let mut local = vec![p[0] - t];
            local.extend_from_slice(&p[1..d]);
            self.shift(atom, &local)
        };
        let mut p0 = vec![*t];
        p0.extend(std::iter::repeat_n(0.0, d - 1));
        build(&compass_max(&|p: &[f64]| score(&build(p)), p0, steps, 1e-13))
    }

    /// Number of local coordinates of an atom.
    pub(crate) fn n_params(atom: &Atom) -> usize {
        match atom {
            Atom::Periodic { .. } => 1,
            Atom::Point { x } => x.len(),
            Atom::Ridge { xi, .. } => xi.len(),
        }
    }

    /// Moves `atom` by `p` in local coordinates: the location itself for
    /// periodic and point atoms, offset followed by tangent coordinates of the
    /// direction for ridges.
    pub(crate) fn shift(&self, atom: &Atom, p: &[f64]) -> Atom {
        match atom {
            Atom::Periodic { tau } => Atom::Periodic { tau: (tau + p[0]).rem_euclid(self.scale) },
            Atom::Point { x } => Atom::Point { x: x.iter().zip(p).map(|(a, b)| a + b).collect() },
            Atom::Ridge { t, xi } => {
                let mut v = xi.clone();
                for (k, tan) in tangent_basis(xi).iter().enumerate() {
                    for (vi, ti) in v.iter_mut().zip(tan) {
                        *vi += p[1 + k] * ti;
                    }
                }
                let n = crate::kernels::norm(&v);
                Atom::Ridge { t: t + p[0], xi: v.iter().map(|c| c / n).collect() }
            }
        }
    }

    /// Finite-difference step for each local coordinate.
    pub(crate) fn param_steps(&self, atom: &Atom) -> Vec<f64> {
        match atom {
            Atom::Ridge { xi, .. } => {
                let mut h = vec![1e-6 * self.scale];
                h.extend(std::iter::repeat_n(1e-6, xi.len() - 1));
                h
            }
            a => vec![1e-6 * self.scale; Self::n_params(a)],
        }
    }

    /// Distance between atoms relative to the domain scale.
    pub(crate) fn distance(&self, a: &Atom, b: &Atom) -> f64 {
        match (a, b) {
            (Atom::Periodic { tau: s }, Atom::Periodic { tau: t }) => {
                let d = (s - t).rem_euclid(self.scale);
                d.min(self.scale - d) / self.scale
            }
            (Atom::Point { x }, Atom::Point { x: y }) => {
                x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() / self.scale
            }
            (Atom::Ridge { t: s, xi: u }, Atom::Ridge { t, xi: v }) => {
                let chord = u.iter().zip(v).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                ((s - t).abs() / self.scale).max(chord)
            }
            _ => f64::INFINITY,
        }
    }

    /// Candidate grid `factor` times denser than [`Basis::candidates`].
    pub(crate) fn fine_candidates(&self, target: usize, factor: usize, seed: u64) -> Vec<Atom> {
        match &self.kind {
            Kind::Ridge { kernel, .. } if kernel.dim() == 2 => {
                let n_dir = 64 * factor;
                let n_t = (target / 64).max(8) * factor;
                let r = self.scale;
                let mut atoms = Vec::new();
                for j in 0..n_dir {
                    let (s, c) = (2.0 * PI * j as f64 / n_dir as f64).sin_cos();
                    for k in 0..n_t {
                        atoms.push(Atom::Ridge { t: -r + 2.0 * r * k as f64 / (n_t - 1) as f64, xi: vec![c, s] });
                    }
                }
                atoms
            }
            Kind::Fraclap(k) if k.dim() <= 2 => {
                let d = k.dim() as f64;
                let fine = (target as f64 * (factor as f64).powf(d)) as usize;
                self.candidates(fine, seed)
            }
            _ => self.candidates(target * factor, seed),
        }
    }
}

fn random_direction(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::kernels::norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Orthonormal basis of the tangent space of the sphere at `xi`.
fn tangent_basis(xi: &[f64]) -> Vec<Vec<f64>> {
    let d = xi.len();
    let mut basis: Vec<Vec<f64>> = vec![xi.to_vec()];
    for e in 0..d {
        let mut v = vec![0.0; d];
        v[e] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            for i in 0..d {
                v[i] -= dot * b[i];
            }
        }
        let n = crate::kernels::norm(&v);
        if n > 1e-6 {
            basis.push(v.into_iter().map(|c| c / n).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.split_off(1)
}

/// Golden-section search for a maximum of `f` on `[a, b]`; the returned
/// point is never worse than `start`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, start: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    if f(mid) >= f(start) {
        mid
    } else {
        start
    }
}

/// Compass (pattern) search for a maximum of `f`, halving the step after
/// every unsuccessful poll until it falls below `min_step` (relative to the
/// initial steps).
fn compass_max(f: &impl Fn(&[f64]) -> f64, mut x: Vec<f64>, mut steps: Vec<f64>, min_rel: f64) -> Vec<f64> {
    let initial: Vec<f64> = steps.clone();
    let mut best = f(&x);
    let mut evals = 0usize;
    while steps.iter().zip(&initial).any(|(s, i)| *s > min_rel * i.max(1e-300)) && evals < 20_000 {
        let mut improved = false;
        for i in 0..x.len() {
            for sign in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[i] += sign * steps[i];
                let v = f(&trial);
                evals += 1;
                if v > best {
                    best = v;
                    x = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            for s in steps.iter_mut() {
                *s *= 0.5;
            }
        }
    }
    x
}
