use std::f64::consts::PI;
use std::path::Path;

use lizkit::kernels::{verify_growth_bound, FracLaplaceKernel};
use lizkit::radon::{radon, slice_check, SampledField, SinogramSpec};
use lizkit::solver::{fit as solve, mnorm_of_model, DataPoint, Family, FitOptions, FitOutcome, FitProblem, Loss, Mode};
use lizkit::verify::{self, CheckResult, VerifyOptions};

use crate::error::CliError;
use crate::io::{location_header, read_data, read_model, read_table, sibling, write_csv, write_model, write_text};
use crate::{seed_override, EvalArgs, FamilyName, FieldName, FitArgs, GrowthCheckArgs, LossName, RadonCheckArgs, VerifyArgs};

fn require_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::not_found(dir)),
        _ => Ok(()),
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::usage(format!("--{name} must be positive, got {v}")))
    }
}

fn family_of(a: &FitArgs, dim: usize) -> Result<Family, CliError> {
    let alpha = || a.alpha.ok_or_else(|| CliError::usage("--alpha is required for this family"));
    Ok(match a.family {
        FamilyName::Periodic => {
            if dim != 1 {
                return Err(CliError::new("SchemaMismatch", format!("periodic data has one location column, found {dim}")));
            }
            Family::Periodic { alpha: alpha()?, period: a.period, truncation: a.truncation }
        }
        FamilyName::Fraclap => Family::Fraclap { alpha: alpha()?, d: dim },
        FamilyName::Ridge => Family::Ridge { m: a.m, d: dim, polynomial: a.polynomial },
    })
}

fn family_name(f: FamilyName) -> &'static str {
    match f {
        FamilyName::Periodic => "periodic",
        FamilyName::Fraclap => "fraclap",
        FamilyName::Ridge => "ridge",
    }
}

pub fn fit(a: FitArgs) -> Result<u8, CliError> {
    let seed = seed_override(a.seed)?;
    for l in &a.lambda {
        positive("lambda", *l)?;
    }
    positive("period", a.period)?;
    if a.loss == LossName::Huber {
        positive("delta", a.delta)?;
    }
    if !a.data.exists() {
        return Err(CliError::not_found(&a.data));
    }
    require_parent(&a.out)?;
    let table_dim = read_table(&a.data)?.header.len().saturating_sub(1);
    let family = family_of(&a, table_dim)?;
    let (xs, ys) = read_data(&a.data, table_dim)?;
    let data: Vec<DataPoint> = xs.iter().cloned().zip(&ys).map(|(x, y)| DataPoint::new(x, *y)).collect();
    let loss = match a.loss {
        LossName::Quadratic => Loss::Quadratic,
        LossName::Huber => Loss::Huber { delta: a.delta },
    };
    let defaults = FitOptions::default();
    let opts = FitOptions {
        rel_gap: a.rel_gap.unwrap_or(defaults.rel_gap),
        max_iter: a.max_iter.unwrap_or(defaults.max_iter),
        candidates: a.candidates.unwrap_or(defaults.candidates),
        seed,
        ..defaults
    };
    opts.validate()?;

    let modes: Vec<Mode> = if a.interpolate {
        vec![Mode::Interpolation]
    } else {
        a.lambda.iter().map(|&lambda| Mode::Regularized { lambda }).collect()
    };
    let ladder = modes.len() > 1;
    let mut code = 0;
    for (i, mode) in modes.into_iter().enumerate() {
        let problem = FitProblem::new(data.clone(), loss, mode, family)?;
        let tag = if ladder { format!(".lambda{i}") } else { String::new() };
        let model_path = if ladder { sibling(&a.out, &format!("{tag}.json")) } else { a.out.clone() };
        let diag_path = match &a.diagnostics {
            Some(p) if ladder => sibling(p, &format!("{tag}.csv")),
            Some(p) => p.clone(),
            None => sibling(&a.out, &format!("{tag}.diagnostics.csv")),
        };
        let res_path = match &a.residuals {
            Some(p) if ladder => sibling(p, &format!("{tag}.csv")),
            Some(p) => p.clone(),
            None => sibling(&a.out, &format!("{tag}.residuals.csv")),
        };
        let out = solve(&problem, &opts)?;
        write_outputs(&out, &xs, &ys, &model_path, &diag_path, &res_path)?;
        let summary = serde_json::json!({
            "model": model_path.display().to_string(),
            "lambda": out.lambda,
            "converged": out.converged,
            "objective": out.objective,
            "relative_gap": out.relative_gap(),
            "n_atoms": out.model.n_atoms(),
            "mnorm": mnorm_of_model(&out.model)?,
        });
        println!("{summary}");
        if !out.converged {
            code = 2;
        }
    }
    Ok(code)
}

fn write_outputs(out: &FitOutcome, xs: &[Vec<f64>], ys: &[f64], model: &Path, diag: &Path, res: &Path) -> Result<(), CliError> {
    write_model(model, &out.model)?;
    let header: Vec<String> = ["iter", "lambda", "objective", "gap", "n_atoms", "certificate"].map(String::from).to_vec();
    let rows: Vec<Vec<f64>> = out
        .diagnostics
        .iter()
        .map(|r| vec![r.iter as f64, r.lambda, r.objective, r.gap, r.n_atoms as f64, r.certificate])
        .collect();
    write_csv(Some(diag), &header, &rows)?;
    let mut header = location_header(xs.first().map_or(1, Vec::len));
    header.extend(["y", "fitted", "residual"].map(String::from));
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(ys)
        .zip(&out.fitted)
        .map(|((x, y), z)| {
            let mut row = x.clone();
            row.extend([*y, *z, y - z]);
            row
        })
        .collect();
    write_csv(Some(res), &header, &rows)
}

fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("grid axis must be start:stop:count, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(if n == 1 { vec![a] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() })
}

pub fn eval(a: EvalArgs) -> Result<u8, CliError> {
    let model = read_model(&a.model)?;
    if let Some(f) = a.family {
        if model.family_name() != family_name(f) {
            return Err(CliError::new(
                "SchemaMismatch",
                format!("model family is {}, expected {}", model.family_name(), family_name(f)),
            ));
        }
    }
    let dim = model.dim();
    let points: Vec<Vec<f64>> = match &a.points {
        Some(path) => {
            let table = read_table(path)?;
            if table.header.len() < dim {
                return Err(CliError::new("SchemaMismatch", format!("{}: model needs {dim} location columns", path.display())));
            }
            table.rows.into_iter().map(|r| r[..dim].to_vec()).collect()
        }
        None => {
            if a.grid.len() != dim {
                return Err(CliError::new("SchemaMismatch", format!("model has dimension {dim}, got {} grid axes", a.grid.len())));
            }
            let axes = a.grid.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>, _>>()?;
            let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
            for axis in &axes {
                pts = pts.iter().flat_map(|p| axis.iter().map(move |v| [p.as_slice(), &[*v]].concat())).collect();
            }
            pts
        }
    };
    if let Some(p) = &a.out {
        require_parent(p)?;
    }
    let values = model.evaluate_many(&points)?;
    let mut header = location_header(dim);
    header.push("f".into());
    let rows: Vec<Vec<f64>> = points
        .into_iter()
        .zip(values)
        .map(|(mut p, v)| {
            p.push(v);
            p
        })
        .collect();
    write_csv(a.out.as_deref(), &header, &rows)?;
    Ok(0)
}

pub fn verify(a: VerifyArgs) -> Result<u8, CliError> {
    if let Some(p) = &a.out {
        require_parent(p)?;
    }
    let opts = VerifyOptions { only: a.only, tolerance_scale: a.tolerance_scale, seed: seed_override(a.seed)? };
    let rows = verify::run(&opts)?;
    write_text(a.out.as_deref(), &verify::to_csv(&rows))?;
    Ok(if rows.iter().all(|r| r.passed) { 0 } else { 2 })
}

fn test_field(name: FieldName, side: usize, h: f64) -> Result<SampledField, CliError> {
    let f: fn(f64, f64) -> f64 = match name {
        FieldName::Gaussian => |x, y| (-(x * x + y * y) / 2.0).exp(),
        FieldName::OddGaussian => |x, y| x * (-(x * x + y * y) / 2.0).exp(),
        FieldName::MexicanHat => |x, y| {
            let r2 = x * x + y * y;
            (r2 - 2.0) * (-r2 / 2.0).exp()
        },
    };
    Ok(SampledField::from_fn_2d(side, h, f)?)
}

fn row(name: &str, measured: f64, tolerance: f64) -> CheckResult {
    CheckResult { group: "radon", name: name.into(), measured, tolerance, passed: measured <= tolerance }
}

pub fn radon_check(a: RadonCheckArgs) -> Result<u8, CliError> {
    positive("spacing", a.spacing)?;
    positive("slice-tol", a.slice_tol)?;
    positive("inversion-tol", a.inversion_tol)?;
    if a.directions == 0 || a.refine == 0 {
        return Err(CliError::usage("--directions and --refine must be positive"));
    }
    for p in [&a.out, &a.dump_sinogram].into_iter().flatten() {
        require_parent(p)?;
    }
    let f = test_field(a.field, a.side, a.spacing)?;

    let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
    for j in 0..a.directions {
        let (s, c) = (PI * j as f64 / a.directions as f64).sin_cos();
        let r = slice_check(&f, [c, s])?;
        err = err.max(r.max_abs_error);
        scale = scale.max(r.reference_scale);
    }
    let slice = if scale > 0.0 { err / scale } else { err };

    let back = verify::filtered_backprojection(&f, a.directions, a.refine)?;
    let diff = f.values().iter().zip(back.values()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let inversion = diff / f.sup_norm();

    if let Some(path) = &a.dump_sinogram {
        let h = a.spacing;
        let reach = (a.side as f64 - 1.0) / 2.0 * h * std::f64::consts::SQRT_2 + 2.0 * h;
        let half = (reach / h).ceil() as usize;
        let g = radon(&f, SinogramSpec::symmetric(2 * half + 1, a.directions, half as f64 * h))?;
        g.write(path)?;
    }
    let rows = [row("radon.slice", slice, a.slice_tol), row("radon.inversion", inversion, a.inversion_tol)];
    write_text(a.out.as_deref(), &verify::to_csv(&rows))?;
    Ok(if rows.iter().all(|r| r.passed) { 0 } else { 2 })
}

pub fn growth_check(a: GrowthCheckArgs) -> Result<u8, CliError> {
    positive("rmin", a.rmin)?;
    positive("rmax", a.rmax)?;
    if a.rmax < a.rmin || a.radii < 2 || a.directions == 0 {
        return Err(CliError::usage("need rmin <= rmax, at least 2 radii and 1 direction"));
    }
    let k = if a.k.is_empty() { vec![0; a.d] } else { a.k.clone() };
    if k.len() != a.d {
        return Err(CliError::usage(format!("--k has {} entries, expected d = {}", k.len(), a.d)));
    }
    if let Some(p) = &a.out {
        require_parent(p)?;
    }
    let kern = FracLaplaceKernel::new(a.alpha, a.d)?;
    let dirs: Vec<Vec<f64>> = match a.d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..a.directions)
            .map(|j| {
                let (s, c) = (0.1 + 2.0 * PI * j as f64 / a.directions as f64).sin_cos();
                vec![c, s]
            })
            .collect(),
        _ => (0..a.d)
            .flat_map(|i| {
                [1.0, -1.0].map(|sgn| {
                    let mut u = vec![0.0; a.d];
                    u[i] = sgn;
                    u
                })
            })
            .collect(),
    };
    let ratio = (a.rmax / a.rmin).ln();
    let samples: Vec<Vec<f64>> = (0..a.radii)
        .flat_map(|i| {
            let r = a.rmin * (ratio * i as f64 / (a.radii - 1) as f64).exp();
            dirs.iter().map(move |u| u.iter().map(|c| r * c).collect::<Vec<f64>>())
        })
        .collect();
    let report = verify_growth_bound(&kern, &k, &samples)?;
    write_text(a.out.as_deref(), &report.to_csv())?;
    Ok(if report.bounded { 0 } else { 2 })
}
