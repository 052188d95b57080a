use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::dictionary::{Atom, Basis};
use super::model::Model;
use super::weights::WeightProblem;
use super::{FitOptions, FitProblem, Loss, Mode, Result, SolverError};
use crate::par;

/// One row of the solver trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterRecord {
    pub iter: usize,
    pub lambda: f64,
    pub objective: f64,
    /// `objective - lower_bound`, relative to the objective.
    pub gap: f64,
    pub n_atoms: usize,
    /// `max |eta| / lambda` at the start of the iteration.
    pub certificate: f64,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: Model,
    /// `false` when `max_iter` was reached or the exchange stalled before the
    /// certificate dropped to `lambda (1 + rel_gap)`.
    pub converged: bool,
    /// Regularisation weight of the returned solution (the last continuation
    /// stage in interpolation mode).
    pub lambda: f64,
    pub objective: f64,
    pub lower_bound: f64,
    pub fitted: Vec<f64>,
    pub diagnostics: Vec<IterRecord>,
}

impl FitOutcome {
    pub fn relative_gap(&self) -> f64 {
        (self.objective - self.lower_bound) / self.objective.abs().max(f64::MIN_POSITIVE)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

struct State {
    atoms: Vec<Atom>,
    cols: Vec<Vec<f64>>,
    w: Vec<f64>,
    c: Vec<f64>,
}

struct Solver<'a> {
    problem: &'a FitProblem,
    opts: &'a FitOptions,
    basis: Basis,
    candidates: Vec<Atom>,
    dictionary: Vec<Vec<f64>>,
    unpen: Vec<Vec<f64>>,
    unpen_pinv: Option<DMatrix<f64>>,
    y: Vec<f64>,
    shift: Vec<f64>,
    trace: Vec<IterRecord>,
    iter: usize,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a FitProblem, opts: &'a FitOptions) -> Result<Self> {
        let basis = Basis::new(problem)?;
        let candidates = basis.candidates(opts.candidates, opts.seed);
        let dictionary = basis.columns(&candidates);
        let unpen = basis.unpenalized_columns();
        let m = problem.data().len();
        let unpen_pinv = (!unpen.is_empty()).then(|| {
            DMatrix::from_fn(m, unpen.len(), |i, j| unpen[j][i])
                .pseudo_inverse(1e-12)
                .expect("non-negative tolerance")
        });
        // Work with data whose least-squares unpenalised part is removed, so
        // that adding such a part to the data only moves the returned offset
        // or polynomial.
        let mut y: Vec<f64> = problem.data().iter().map(|p| p.value).collect();
        let mut shift = vec![0.0; unpen.len()];
        if let Some(p) = &unpen_pinv {
            let coef = p * DVector::from_column_slice(&y);
            for (j, u) in unpen.iter().enumerate() {
                shift[j] = coef[j];
                for (yi, ui) in y.iter_mut().zip(u) {
                    *yi -= coef[j] * ui;
                }
            }
        }
        Ok(Self { problem, opts, basis, candidates, dictionary, unpen, unpen_pinv, y, shift, trace: Vec::new(), iter: 0 })
    }

    fn weights<'s>(&'s self, state: &'s State, lambda: f64) -> WeightProblem<'s> {
        WeightProblem { y: &self.y, atoms: &state.cols, unpenalized: &self.unpen, loss: self.problem.loss(), lambda }
    }

    fn residual(&self, state: &State) -> Vec<f64> {
        let z = self.weights(state, 1.0).predict(&state.w, &state.c);
        self.y.iter().zip(&z).map(|(y, z)| self.problem.loss().residual(*y, *z)).collect()
    }

    fn eta(&self, atom: &Atom, r: &[f64]) -> f64 {
        dot(&self.basis.column(atom), r)
    }

    /// Dictionary certificate values in candidate order.
    fn eta_dictionary(&self, r: &[f64]) -> Vec<f64> {
        par::map_slice(&self.dictionary, |col| dot(col, r))
    }

    /// Dual objective at the scaled residual, which lower-bounds the optimum
    /// as long as the certificate is bounded by the sampled maximum.
    fn lower_bound(&self, state: &State, lambda: f64, extra: &[Atom]) -> f64 {
        let mut theta = self.residual(state);
        if let Some(p) = &self.unpen_pinv {
            let coef = p * DVector::from_column_slice(&theta);
            for (j, u) in self.unpen.iter().enumerate() {
                for (t, ui) in theta.iter_mut().zip(u) {
                    *t -= coef[j] * ui;
                }
            }
        }
        let mut peak = self.eta_dictionary(&theta).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for col in &state.cols {
            peak = peak.max(dot(col, &theta).abs());
        }
        for a in extra {
            peak = peak.max(self.eta(a, &theta).abs());
        }
        let mut s: f64 = if peak > 0.0 { (lambda / peak).min(1.0) } else { 1.0 };
        if let Loss::Huber { delta } = self.problem.loss() {
            let top = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if top > 0.0 {
                s = s.min(delta / top);
            }
        }
        s * dot(&theta, &self.y) - 0.5 * s * s * dot(&theta, &theta)
    }

    fn record(&mut self, state: &State, lambda: f64, certificate: f64, extra: &[Atom]) -> (f64, f64) {
        let objective = self.weights(state, lambda).objective(&state.w, &state.c);
        let lower = self.lower_bound(state, lambda, extra);
        self.trace.push(IterRecord {
            iter: self.iter,
            lambda,
            objective,
            gap: (objective - lower) / objective.abs().max(f64::MIN_POSITIVE),
            n_atoms: state.atoms.len(),
            certificate: certificate / lambda,
        });
        self.iter += 1;
        (objective, lower)
    }

    fn solve_weights(&self, state: &mut State, lambda: f64) {
        let (mut w, mut c) = (std::mem::take(&mut state.w), std::mem::take(&mut state.c));
        self.weights(state, lambda).solve(&mut w, &mut c, 1e-13);
        state.w = w;
        state.c = c;
    }

    /// Removes zero weights and merges atoms closer than `merge_tol`.
    fn prune(&self, state: &mut State) {
        let mut k = 0;
        while k < state.atoms.len() {
            if state.w[k] == 0.0 {
                state.atoms.remove(k);
                state.cols.remove(k);
                state.w.remove(k);
            } else {
                k += 1;
            }
        }
        let mut i = 0;
        while i < state.atoms.len() {
            let mut j = i + 1;
            while j < state.atoms.len() {
                if self.basis.distance(&state.atoms[i], &state.atoms[j]) < self.opts.merge_tol {
                    if state.w[j].abs() > state.w[i].abs() {
                        state.atoms.swap(i, j);
                        state.cols.swap(i, j);
                    }
                    state.w[i] += state.w[j];
                    state.atoms.remove(j);
                    state.cols.remove(j);
                    state.w.remove(j);
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
    }

    /// Joint local descent on weights and atom locations (damped Gauss-Newton
    /// with finite-difference derivatives of the columns).
    fn slide(&self, state: &mut State, lambda: f64) {
        let k = state.atoms.len();
        if k == 0 {
            return;
        }
        let loss = self.problem.loss();
        let base = state.atoms.clone();
        let q: Vec<usize> = base.iter().map(Basis::n_params).collect();
        let starts: Vec<usize> = q.iter().scan(0, |acc, n| {
            let s = *acc;
            *acc += n;
            Some(s)
        }).collect();
        let nq: usize = q.iter().sum();
        let p = self.unpen.len();
        let n = k + p + nq;
        let m = self.y.len();
        let objective = |cols: &[Vec<f64>], w: &[f64], c: &[f64]| {
            WeightProblem { y: &self.y, atoms: cols, unpenalized: &self.unpen, loss, lambda }.objective(w, c)
        };
        let mut offs = vec![0.0; nq];
        let (mut w, mut c, mut cols) = (state.w.clone(), state.c.clone(), state.cols.clone());
        let mut f = objective(&cols, &w, &c);
        let mut mu = 1e-3;
        'outer: for _ in 0..MAX_SLIDE {
            let z = WeightProblem { y: &self.y, atoms: &cols, unpenalized: &self.unpen, loss, lambda }.predict(&w, &c);
            let r: Vec<f64> = self.y.iter().zip(&z).map(|(y, z)| loss.residual(*y, *z)).collect();
            let mut jac = DMatrix::<f64>::zeros(m, n);
            for a in 0..k {
                for i in 0..m {
                    jac[(i, a)] = cols[a][i];
                }
            }
            for (j, u) in self.unpen.iter().enumerate() {
                for i in 0..m {
                    jac[(i, k + j)] = u[i];
                }
            }
            let derivs: Vec<Vec<f64>> = par::map_range(nq, |idx| {
                let a = starts.partition_point(|s| *s <= idx) - 1;
                let l = idx - starts[a];
                let h = self.basis.param_steps(&base[a])[l];
                let mut pp = offs[starts[a]..starts[a] + q[a]].to_vec();
                pp[l] += h;
                let plus = self.basis.column(&self.basis.shift(&base[a], &pp));
                pp[l] -= 2.0 * h;
                let minus = self.basis.column(&self.basis.shift(&base[a], &pp));
                plus.iter().zip(&minus).map(|(u, v)| w[a] * (u - v) / (2.0 * h)).collect()
            });
            for (idx, col) in derivs.iter().enumerate() {
                for i in 0..m {
                    jac[(i, k + p + idx)] = col[i];
                }
            }
            let rv = DVector::from_vec(r);
            let mut g = -(jac.transpose() * &rv);
            for a in 0..k {
                g[a] += lambda * w[a].signum();
            }
            let h = jac.transpose() * &jac;
            let scale = h.diagonal().max().max(f64::MIN_POSITIVE);
            loop {
                let mut damped = h.clone();
                for i in 0..n {
                    damped[(i, i)] += mu * (h[(i, i)] + 1e-9 * scale);
                }
                let Some(step) = damped.cholesky().map(|ch| ch.solve(&(-&g))) else {
                    mu *= 4.0;
                    if mu > 1e8 {
                        break 'outer;
                    }
                    continue;
                };
                let mut w_new = w.clone();
                for a in 0..k {
                    let v = w[a] + step[a];
                    w_new[a] = if v * w[a] < 0.0 { 0.0 } else { v };
                }
                let c_new: Vec<f64> = (0..p).map(|j| c[j] + step[k + j]).collect();
                let offs_new: Vec<f64> = (0..nq).map(|i| offs[i] + step[k + p + i]).collect();
                let cols_new: Vec<Vec<f64>> = par::map_range(k, |a| {
                    self.basis.column(&self.basis.shift(&base[a], &offs_new[starts[a]..starts[a] + q[a]]))
                });
                let f_new = objective(&cols_new, &w_new, &c_new);
                if f_new < f {
                    let gain = f - f_new;
                    (w, c, cols, offs, f) = (w_new, c_new, cols_new, offs_new, f_new);
                    mu = (mu / 3.0).max(1e-12);
                    if gain <= 1e-15 * f.abs().max(f64::MIN_POSITIVE) {
                        break 'outer;
                    }
                    break;
                }
                mu *= 4.0;
                if mu > 1e8 {
                    break 'outer;
                }
            }
        }
        state.atoms = (0..k).map(|a| self.basis.shift(&base[a], &offs[starts[a]..starts[a] + q[a]])).collect();
        state.cols = cols;
        state.w = w;
        state.c = c;
    }

    fn refine_runners_up(&self, etas: &[f64], r: &[f64]) -> Option<(Atom, f64)> {
        let mut order: Vec<usize> = (0..etas.len()).collect();
        order.sort_by(|&a, &b| etas[b].abs().total_cmp(&etas[a].abs()).then(a.cmp(&b)));
        order.truncate(RUNNERS_UP);
        let refined = par::map_slice(&order, |&j| {
            let a = self.basis.refine(&self.candidates[j], self.opts.candidates, |a| self.eta(a, r).abs());
            let v = self.eta(&a, r).abs();
            (a, v)
        });
        refined.into_iter().fold(None, |best: Option<(Atom, f64)>, (a, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((a, v)),
        })
    }

    /// Exchange loop at fixed `lambda`; returns whether the certificate test passed.
    fn run(&mut self, state: &mut State, lambda: f64) -> bool {
        self.solve_weights(state, lambda);
        self.prune(state);
        let threshold = lambda * (1.0 + self.opts.rel_gap);
        for _ in 0..self.opts.max_iter {
            let r = self.residual(state);
            let etas = self.eta_dictionary(&r);
            let Some((j, _)) = par::argmax_by_key(&etas, |v| v.abs()) else {
                self.record(state, lambda, 0.0, &[]);
                return true;
            };
            let refined = self.basis.refine(&self.candidates[j], self.opts.candidates, |a| self.eta(a, &r).abs());
            let mut atom = if self.eta(&refined, &r).abs() >= etas[j].abs() { refined } else { self.candidates[j].clone() };
            let mut peak = self.eta(&atom, &r).abs();
            if peak <= threshold {
                // Local maxima missed by the coarse grid: polish the runners-up too.
                if let Some((a, v)) = self.refine_runners_up(&etas, &r) {
                    if v > peak {
                        atom = a;
                        peak = v;
                    }
                }
            }
            self.record(state, lambda, peak, std::slice::from_ref(&atom));
            if peak <= threshold {
                return true;
            }
            if let Some(k) = state.atoms.iter().position(|a| self.basis.distance(a, &atom) < self.opts.merge_tol) {
                // The peak sits next to an active atom: move that atom onto
                // it instead of inserting a duplicate. Stop if this no longer
                // lowers the objective.
                let before = self.weights(state, lambda).objective(&state.w, &state.c);
                let saved = (state.atoms[k].clone(), state.cols[k].clone(), state.w.clone(), state.c.clone());
                state.cols[k] = self.basis.column(&atom);
                state.atoms[k] = atom;
                self.solve_weights(state, lambda);
                let after = self.weights(state, lambda).objective(&state.w, &state.c);
                if after >= before - 1e-15 * before.abs() {
                    (state.atoms[k], state.cols[k], state.w, state.c) = saved;
                    return false;
                }
            } else {
                state.cols.push(self.basis.column(&atom));
                state.atoms.push(atom);
                state.w.push(0.0);
            }
            self.solve_weights(state, lambda);
            self.prune(state);
            self.slide(state, lambda);
            self.prune(state);
            self.solve_weights(state, lambda);
            self.prune(state);
        }
        false
    }

    /// Moves along null vectors of `[A_S U]` until at most `bound` atoms remain;
    /// predictions are unchanged and the l1 norm does not increase.
    fn reduce(&self, state: &mut State, bound: usize) {
        while state.atoms.len() > bound {
            let k = state.atoms.len();
            let p = self.unpen.len();
            let m = self.y.len();
            let n = k + p;
            let rows = m.max(n);
            let g = DMatrix::from_fn(rows, n, |i, j| {
                if i >= m {
                    0.0
                } else if j < k {
                    state.cols[j][i]
                } else {
                    self.unpen[j - k][i]
                }
            });
            let svd = g.svd(false, true);
            let v_t = svd.v_t.expect("requested");
            let (idx, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (i, s)| if *s < best.1 { (i, *s) } else { best });
            let v: Vec<f64> = v_t.row(idx).iter().copied().collect();
            let slope: f64 = (0..k).map(|i| state.w[i].signum() * v[i]).sum();
            let dir: Vec<f64> = if slope <= 0.0 { v } else { v.iter().map(|x| -x).collect() };
            let hit = (0..k)
                .filter(|&i| state.w[i] * dir[i] < 0.0)
                .map(|i| (i, -state.w[i] / dir[i]))
                .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
                    Some((_, b)) if b <= s => best,
                    _ => Some((i, s)),
                });
            let Some((i_hit, step)) = hit else { break };
            for i in 0..k {
                state.w[i] += step * dir[i];
            }
            for j in 0..p {
                state.c[j] += step * dir[k + j];
            }
            state.w[i_hit] = 0.0;
            self.prune(state);
        }
    }

    fn max_abs_residual(&self, state: &State) -> f64 {
        let z = self.weights(state, 1.0).predict(&state.w, &state.c);
        self.y.iter().zip(&z).map(|(y, z)| (y - z).abs()).fold(0.0, f64::max)
    }

    fn finish(mut self, mut state: State, lambda: f64, converged: bool) -> FitOutcome {
        let lower_bound = self.lower_bound(&state, lambda, &[]);
        state.c.resize(self.unpen.len(), 0.0);
        for (c, s) in state.c.iter_mut().zip(&self.shift) {
            *c += s;
        }
        self.y = self.problem.data().iter().map(|p| p.value).collect();
        let pairs: Vec<(f64, Atom)> = state.w.iter().copied().zip(state.atoms.iter().cloned()).collect();
        let model = Model::assemble(self.problem.family(), &self.basis, &pairs, &state.c);
        let fitted = self.weights(&state, lambda).predict(&state.w, &state.c);
        let objective = self.weights(&state, lambda).objective(&state.w, &state.c);
        FitOutcome { model, converged, lambda, objective, lower_bound, fitted, diagnostics: self.trace }
    }
}

const MAX_CONTINUATION: usize = 80;
const MAX_SLIDE: usize = 50;
const RUNNERS_UP: usize = 64;

/// Fits a sparse atomic model to the data of `problem`.
///
/// In interpolation mode `lambda` starts at half the largest certificate of
/// the zero measure and is halved until every residual is below
/// `opts.interp_tol`; each stage is warm-started from the previous one.
pub fn fit(problem: &FitProblem, opts: &FitOptions) -> Result<FitOutcome> {
    opts.validate()?;
    let mut solver = Solver::new(problem, opts)?;
    let mut state = State { atoms: Vec::new(), cols: Vec::new(), w: Vec::new(), c: Vec::new() };
    let bound = problem.atom_bound();
    match problem.mode() {
        Mode::Regularized { lambda } => {
            let converged = solver.run(&mut state, lambda);
            solver.reduce(&mut state, bound);
            Ok(solver.finish(state, lambda, converged))
        }
        Mode::Interpolation => {
            solver.solve_weights(&mut state, 1.0);
            let r0 = solver.residual(&state);
            let peak = solver.eta_dictionary(&r0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut lambda = if peak > 0.0 { 0.5 * peak } else { 1.0 };
            let mut converged = true;
            for _ in 0..MAX_CONTINUATION {
                converged = solver.run(&mut state, lambda);
                solver.reduce(&mut state, bound);
                if solver.max_abs_residual(&state) <= opts.interp_tol {
                    return Ok(solver.finish(state, lambda, converged));
                }
                lambda *= 0.5;
            }
            let _ = converged;
            Err(SolverError::InfeasibleInterpolation { max_residual: solver.max_abs_residual(&state), lambda })
        }
    }
}

/// Largest `|eta|` of the residual of `fitted` over a candidate grid
/// `factor` times denser than the one used by [`fit`].
pub fn certificate_peak(problem: &FitProblem, fitted: &[f64], factor: usize, opts: &FitOptions) -> Result<f64> {
    if fitted.len() != problem.data().len() {
        return Err(SolverError::InvalidProblem(format!(
            "{} fitted values for {} data points",
            fitted.len(),
            problem.data().len()
        )));
    }
    let basis = Basis::new(problem)?;
    let loss = problem.loss();
    let r: Vec<f64> = problem.data().iter().zip(fitted).map(|(p, z)| loss.residual(p.value, *z)).collect();
    let atoms = basis.fine_candidates(opts.candidates, factor.max(1), opts.seed);
    let etas = par::map_slice(&atoms, |a| dot(&basis.column(a), &r).abs());
    Ok(etas.into_iter().fold(0.0, f64::max))
}
