use serde::{Deserialize, Serialize};

use super::dictionary::{Atom, Basis};
use super::{Family, Result, SolverError};
use crate::config::DEFAULT_TRUNCATION;
use crate::fourier::PeriodicGreen;
use crate::kernels::poly::monomial_value;
use crate::kernels::{FracLaplaceKernel, KernelError, RidgeKernel};

/// Periodic spline `b0 + sum_k a_k rho_perio(t - tau_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineModel {
    pub alpha: f64,
    pub period: f64,
    pub truncation: usize,
    pub offset: f64,
    /// `(a_k, tau_k)` with `tau_k` in `[0, T)`.
    pub atoms: Vec<(f64, f64)>,
}

/// Lizorkin spline `sum_k a_k h(x, x_k)` with the corrected
/// fractional-Laplacian kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct LizSplineModel {
    pub alpha: f64,
    pub d: usize,
    /// `(a_k, x_k)`
    pub atoms: Vec<(f64, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeAtom {
    pub weight: f64,
    pub t: f64,
    pub xi: Vec<f64>,
}

/// Ridge spline `sum_k a_k h(x, (t_k, xi_k)) + p(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub m: u32,
    pub d: usize,
    pub atoms: Vec<RidgeAtom>,
    /// Monomial exponents and coefficients of `p`, present in extended mode.
    pub poly: Option<Vec<(Vec<u32>, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub enum Model {
    Periodic(SplineModel),
    Fraclap(LizSplineModel),
    Ridge(RidgeModel),
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    exponents: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    family: String,
    params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<Vec<PolyTerm>>,
    atoms: Vec<Vec<f64>>,
}

fn param_f64(p: &serde_json::Map<String, serde_json::Value>, key: &str) -> std::result::Result<f64, String> {
    p.get(key).and_then(|v| v.as_f64()).ok_or_else(|| format!("missing numeric parameter {key:?}"))
}

fn param_u64(p: &serde_json::Map<String, serde_json::Value>, key: &str) -> std::result::Result<u64, String> {
    p.get(key).and_then(|v| v.as_u64()).ok_or_else(|| format!("missing integer parameter {key:?}"))
}

impl From<Model> for ModelRepr {
    fn from(m: Model) -> Self {
        let mut params = serde_json::Map::new();
        match m {
            Model::Periodic(s) => {
                params.insert("alpha".into(), s.alpha.into());
                params.insert("period".into(), s.period.into());
                params.insert("truncation".into(), (s.truncation as u64).into());
                ModelRepr {
                    family: "periodic".into(),
                    params,
                    offset: Some(s.offset),
                    poly: None,
                    atoms: s.atoms.iter().map(|(a, t)| vec![*a, *t]).collect(),
                }
            }
            Model::Fraclap(s) => {
                params.insert("alpha".into(), s.alpha.into());
                params.insert("d".into(), (s.d as u64).into());
                ModelRepr {
                    family: "fraclap".into(),
                    params,
                    offset: None,
                    poly: None,
                    atoms: s
                        .atoms
                        .iter()
                        .map(|(a, x)| std::iter::once(*a).chain(x.iter().copied()).collect())
                        .collect(),
                }
            }
            Model::Ridge(s) => {
                params.insert("m".into(), u64::from(s.m).into());
                params.insert("d".into(), (s.d as u64).into());
                ModelRepr {
                    family: "ridge".into(),
                    params,
                    offset: None,
                    poly: s.poly.map(|p| p.into_iter().map(|(exponents, coef)| PolyTerm { exponents, coef }).collect()),
                    atoms: s
                        .atoms
                        .iter()
                        .map(|a| [a.weight, a.t].into_iter().chain(a.xi.iter().copied()).collect())
                        .collect(),
                }
            }
        }
    }
}

impl TryFrom<ModelRepr> for Model {
    type Error = String;

    fn try_from(r: ModelRepr) -> std::result::Result<Self, String> {
        let check_width = |w: usize| -> std::result::Result<(), String> {
            match r.atoms.iter().find(|a| a.len() != w) {
                Some(a) => Err(format!("atom has {} entries, expected {w}", a.len())),
                None => Ok(()),
            }
        };
        let model = match r.family.as_str() {
            "periodic" => {
                check_width(2)?;
                Model::Periodic(SplineModel {
                    alpha: param_f64(&r.params, "alpha")?,
                    period: param_f64(&r.params, "period")?,
                    truncation: r.params.get("truncation").and_then(|v| v.as_u64()).map_or(DEFAULT_TRUNCATION, |v| v as usize),
                    offset: r.offset.unwrap_or(0.0),
                    atoms: r.atoms.iter().map(|a| (a[0], a[1])).collect(),
                })
            }
            "fraclap" => {
                let d = param_u64(&r.params, "d")? as usize;
                check_width(1 + d)?;
                Model::Fraclap(LizSplineModel {
                    alpha: param_f64(&r.params, "alpha")?,
                    d,
                    atoms: r.atoms.iter().map(|a| (a[0], a[1..].to_vec())).collect(),
                })
            }
            "ridge" => {
                let d = param_u64(&r.params, "d")? as usize;
                check_width(2 + d)?;
                Model::Ridge(RidgeModel {
                    m: param_u64(&r.params, "m")? as u32,
                    d,
                    atoms: r.atoms.iter().map(|a| RidgeAtom { weight: a[0], t: a[1], xi: a[2..].to_vec() }).collect(),
                    poly: r.poly.map(|p| p.into_iter().map(|t| (t.exponents, t.coef)).collect()),
                })
            }
            other => return Err(format!("unknown family {other:?}")),
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl Model {
    pub fn family_name(&self) -> &'static str {
        match self {
            Model::Periodic(_) => "periodic",
            Model::Fraclap(_) => "fraclap",
            Model::Ridge(_) => "ridge",
        }
    }

    /// Dimension of the evaluation points.
    pub fn dim(&self) -> usize {
        match self {
            Model::Periodic(_) => 1,
            Model::Fraclap(s) => s.d,
            Model::Ridge(s) => s.d,
        }
    }

    pub fn n_atoms(&self) -> usize {
        match self {
            Model::Periodic(s) => s.atoms.len(),
            Model::Fraclap(s) => s.atoms.len(),
            Model::Ridge(s) => s.atoms.len(),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match self {
            Model::Periodic(s) => s.atoms.iter().map(|a| a.0).collect(),
            Model::Fraclap(s) => s.atoms.iter().map(|a| a.0).collect(),
            Model::Ridge(s) => s.atoms.iter().map(|a| a.weight).collect(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Model::Periodic(s) => Family::Periodic { alpha: s.alpha, period: s.period, truncation: s.truncation },
            Model::Fraclap(s) => Family::Fraclap { alpha: s.alpha, d: s.d },
            Model::Ridge(s) => Family::Ridge { m: s.m, d: s.d, polynomial: s.poly.is_some() },
        }
    }

    /// Structural checks: parameters in range, finite numbers, unit directions,
    /// consistent dimensions.
    pub fn validate(&self) -> Result<()> {
        self.family().validate()?;
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Model::Periodic(s) => {
                if !s.offset.is_finite() || !s.atoms.iter().all(|(a, t)| a.is_finite() && t.is_finite()) {
                    return Err(SolverError::SchemaMismatch("non-finite periodic model entry".into()));
                }
            }
            Model::Fraclap(s) => {
                for (a, x) in &s.atoms {
                    if x.len() != s.d || !a.is_finite() || !finite(x) {
                        return Err(SolverError::SchemaMismatch("fraclap atom does not match d".into()));
                    }
                }
            }
            Model::Ridge(s) => {
                for a in &s.atoms {
                    if a.xi.len() != s.d || !a.weight.is_finite() || !a.t.is_finite() || !finite(&a.xi) {
                        return Err(SolverError::SchemaMismatch("ridge atom does not match d".into()));
                    }
                    let n = crate::kernels::norm(&a.xi);
                    if (n - 1.0).abs() > 1e-12 {
                        return Err(KernelError::NonUnitDirection(n).into());
                    }
                }
                if let Some(p) = &s.poly {
                    for (k, c) in p {
                        if k.len() != s.d || !c.is_finite() || k.iter().sum::<u32>() >= s.m {
                            return Err(SolverError::SchemaMismatch("polynomial term outside P_{m-1}".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn atoms_generic(&self) -> Vec<(f64, Atom)> {
        match self {
            Model::Periodic(s) => s.atoms.iter().map(|(a, t)| (*a, Atom::Periodic { tau: *t })).collect(),
            Model::Fraclap(s) => s.atoms.iter().map(|(a, x)| (*a, Atom::Point { x: x.clone() })).collect(),
            Model::Ridge(s) => s.atoms.iter().map(|a| (a.weight, Atom::Ridge { t: a.t, xi: a.xi.clone() })).collect(),
        }
    }

    /// Evaluates the model at many points, building the kernel once.
    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.validate()?;
        let dim = self.dim();
        if let Some(x) = xs.iter().find(|x| x.len() != dim) {
            return Err(KernelError::DimensionMismatch { expected: dim, got: x.len() }.into());
        }
        let values = match self {
            Model::Periodic(s) => {
                let g = PeriodicGreen::new(s.alpha, s.period, s.truncation)?;
                crate::par::map_slice(xs, |x| s.offset + s.atoms.iter().map(|(a, tau)| a * g.eval(x[0] - tau)).sum::<f64>())
            }
            Model::Fraclap(s) => {
                let k = FracLaplaceKernel::new(s.alpha, s.d)?;
                crate::par::map_slice(xs, |x| s.atoms.iter().map(|(a, y)| a * k.corrected_unchecked(x, y)).sum::<f64>())
            }
            Model::Ridge(s) => {
                let k = RidgeKernel::new(s.m, s.d)?;
                crate::par::map_slice(xs, |x| {
                    let atoms: f64 = s.atoms.iter().map(|a| a.weight * k.eval_unchecked(x, a.t, &a.xi)).sum();
                    let poly: f64 = s.poly.iter().flatten().map(|(e, c)| c * monomial_value(e, x)).sum();
                    atoms + poly
                })
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::SchemaMismatch("model evaluates to a non-finite value".into()));
        }
        Ok(values)
    }

    /// Builds a model of `family` from generic atoms and unpenalised coefficients.
    pub(crate) fn assemble(family: Family, basis: &Basis, atoms: &[(f64, Atom)], unpen: &[f64]) -> Model {
        match family {
            Family::Periodic { alpha, period, truncation } => Model::Periodic(SplineModel {
                alpha,
                period,
                truncation,
                offset: unpen.first().copied().unwrap_or(0.0),
                atoms: atoms
                    .iter()
                    .map(|(a, at)| match at {
                        Atom::Periodic { tau } => (*a, tau.rem_euclid(period)),
                        _ => unreachable!(),
                    })
                    .collect(),
            }),
            Family::Fraclap { alpha, d } => Model::Fraclap(LizSplineModel {
                alpha,
                d,
                atoms: atoms
                    .iter()
                    .map(|(a, at)| match at {
                        Atom::Point { x } => (*a, x.clone()),
                        _ => unreachable!(),
                    })
                    .collect(),
            }),
            Family::Ridge { m, d, polynomial } => Model::Ridge(RidgeModel {
                m,
                d,
                atoms: atoms
                    .iter()
                    .map(|(a, at)| match at {
                        Atom::Ridge { t, xi } => RidgeAtom { weight: *a, t: *t, xi: xi.clone() },
                        _ => unreachable!(),
                    })
                    .collect(),
                poly: polynomial.then(|| basis.unpenalized_terms().into_iter().zip(unpen.iter().copied()).collect()),
            }),
        }
    }
}

/// Evaluates a model at one point.
pub fn evaluate_model(model: &Model, x: &[f64]) -> Result<f64> {
    Ok(model.evaluate_many(&[x.to_vec()])?[0])
}

/// `sum_k |a_k|`, the M-norm of the model's innovation; the offset or
/// polynomial part lies in the null space and contributes nothing.
pub fn mnorm_of_model(model: &Model) -> Result<f64> {
    let atoms = model.atoms_generic();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let same = match (&atoms[i].1, &atoms[j].1) {
                (Atom::Periodic { tau: s }, Atom::Periodic { tau: t }) => {
                    let Model::Periodic(m) = model else { unreachable!() };
                    (s - t).rem_euclid(m.period) == 0.0
                }
                (a, b) => a == b,
            };
            if same {
                return Err(SolverError::DuplicateAtoms(i, j));
            }
        }
    }
    Ok(atoms.iter().map(|(a, _)| a.abs()).sum())
}
