use nalgebra::{DMatrix, DVector};

use super::dictionary::{Atom, Basis};
use super::{FitProblem, Result};

/// Solution of a fixed-dictionary LASSO.
#[derive(Debug, Clone)]
pub struct LassoResult {
    pub weights: Vec<f64>,
    pub unpenalized: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// `min_w,c 1/2 ||y - A w - U c||^2 + lambda ||w||_1` by FISTA on the
/// problem with `c` eliminated through the projection onto `range(U)^perp`.
pub fn grid_lasso(
    columns: &[Vec<f64>],
    unpenalized: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> LassoResult {
    let m = y.len();
    let n = columns.len();
    let yv = DVector::from_column_slice(y);
    let (cols, proj_y, back): (Vec<Vec<f64>>, Vec<f64>, _) = if unpenalized.is_empty() {
        (columns.to_vec(), y.to_vec(), None)
    } else {
        let u = DMatrix::from_fn(m, unpenalized.len(), |i, j| unpenalized[j][i]);
        let pinv = u.clone().pseudo_inverse(1e-12).expect("non-negative tolerance");
        let p = DMatrix::identity(m, m) - &u * &pinv;
        let project = |v: &[f64]| (&p * DVector::from_column_slice(v)).iter().copied().collect::<Vec<f64>>();
        (columns.iter().map(|c| project(c)).collect(), project(y), Some(pinv))
    };
    let apply = |x: &[f64]| {
        let mut out = vec![0.0; m];
        for (col, &v) in cols.iter().zip(x) {
            if v != 0.0 {
                for (o, a) in out.iter_mut().zip(col) {
                    *o += v * a;
                }
            }
        }
        out
    };
    let apply_t = |r: &[f64]| -> Vec<f64> { cols.iter().map(|c| c.iter().zip(r).map(|(a, b)| a * b).sum()).collect() };
    // Lipschitz constant of the gradient by power iteration.
    let mut v = vec![1.0 / (n.max(1) as f64).sqrt(); n];
    let mut lip: f64 = 0.0;
    for _ in 0..200 {
        let w = apply_t(&apply(&v));
        let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nw == 0.0 {
            break;
        }
        lip = nw;
        v = w.iter().map(|a| a / nw).collect();
    }
    let lip = lip.max(f64::MIN_POSITIVE) * 1.01;
    let thr = lambda / lip;
    let objective = |x: &[f64]| {
        let ax = apply(x);
        0.5 * proj_y.iter().zip(&ax).map(|(p, q)| (p - q).powi(2)).sum::<f64>()
            + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t: f64 = 1.0;
    let mut prev = objective(&x);
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let az = apply(&z);
        let r: Vec<f64> = az.iter().zip(&proj_y).map(|(a, b)| a - b).collect();
        let grad = apply_t(&r);
        let x_new: Vec<f64> = z
            .iter()
            .zip(&grad)
            .map(|(zi, gi)| {
                let v = zi - gi / lip;
                if v > thr {
                    v - thr
                } else if v < -thr {
                    v + thr
                } else {
                    0.0
                }
            })
            .collect();
        // Gradient-based adaptive restart of the momentum.
        let restart: f64 = (0..n).map(|i| (z[i] - x_new[i]) * (x_new[i] - x[i])).sum();
        if restart > 0.0 {
            t = 1.0;
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_new;
        for i in 0..n {
            z[i] = x_new[i] + beta * (x_new[i] - x[i]);
        }
        x = x_new;
        t = t_new;
        if it % 50 == 49 {
            let cur = objective(&x);
            if (prev - cur).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            prev = cur;
        }
    }
    let unpen = match back {
        Some(pinv) => {
            let ax = DVector::from_vec(columns.iter().zip(&x).fold(vec![0.0; m], |mut acc, (c, v)| {
                for (o, a) in acc.iter_mut().zip(c) {
                    *o += v * a;
                }
                acc
            }));
            (pinv * (&yv - ax)).iter().copied().collect()
        }
        None => Vec::new(),
    };
    let objective = objective(&x);
    LassoResult { weights: x, unpenalized: unpen, objective, iterations }
}

/// A dense dictionary for `problem` together with its columns and the
/// unpenalised columns, for use with [`grid_lasso`].
pub fn oracle_atoms(problem: &FitProblem, size: usize, seed: u64) -> Result<(Vec<Atom>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let basis = Basis::new(problem)?;
    let atoms = basis.fine_candidates(size, 1, seed);
    let cols = basis.columns(&atoms);
    Ok((atoms, cols, basis.unpenalized_columns()))
}
