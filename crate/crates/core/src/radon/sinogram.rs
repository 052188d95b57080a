use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{RadonError, Result};

/// Symmetry class of a sinogram: `g(-t, -xi) = +g(t, xi)` (even) or `-g(t, xi)` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Sampling layout of a planar sinogram: `n_t` uniform offsets on
/// `[t_min, t_max]` and `n_dir` angles `pi j / n_dir`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinogramSpec {
    pub n_t: usize,
    pub n_dir: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl SinogramSpec {
    /// Offsets symmetric about zero covering `[-radius, radius]`.
    pub fn symmetric(n_t: usize, n_dir: usize, radius: f64) -> Self {
        Self { n_t, n_dir, t_min: -radius, t_max: radius }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 2 || self.n_dir < 1 {
            return Err(RadonError::InvalidGrid(format!("n_t = {}, n_dir = {}", self.n_t, self.n_dir)));
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_max > self.t_min) {
            return Err(RadonError::InvalidGrid(format!("t range [{}, {}]", self.t_min, self.t_max)));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn dtheta(&self) -> f64 {
        std::f64::consts::PI / self.n_dir as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.dt()
    }

    pub fn angle(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn direction(&self, j: usize) -> [f64; 2] {
        let (s, c) = self.angle(j).sin_cos();
        [c, s]
    }
}

/// Real samples `g(t_k, xi_j)` stored as a `(n_t, n_dir)` matrix.
///
/// Only the half circle `[0, pi)` is stored; the other half follows from the
/// parity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct SinogramGrid {
    spec: SinogramSpec,
    parity: Parity,
    values: Array2<f64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    n_t: usize,
    n_dir: usize,
    t_min: f64,
    t_max: f64,
    parity: Parity,
    angles: Vec<f64>,
    layout: String,
}

const LAYOUT: &str = "little-endian f64; header [n_t, n_dir, t_min, t_max]; then values row-major (t, direction)";

impl SinogramGrid {
    pub fn new(spec: SinogramSpec, parity: Parity, values: Array2<f64>) -> Result<Self> {
        spec.validate()?;
        if values.dim() != (spec.n_t, spec.n_dir) {
            return Err(RadonError::InvalidGrid(format!(
                "values {:?} do not match ({}, {})",
                values.dim(),
                spec.n_t,
                spec.n_dir
            )));
        }
        Ok(Self { spec, parity, values })
    }

    pub fn zeros(spec: SinogramSpec, parity: Parity) -> Result<Self> {
        Self::new(spec, parity, Array2::zeros((spec.n_t, spec.n_dir)))
    }

    pub fn from_fn(spec: SinogramSpec, parity: Parity, f: impl Fn(f64, [f64; 2]) -> f64) -> Result<Self> {
        spec.validate()?;
        let values = Array2::from_shape_fn((spec.n_t, spec.n_dir), |(k, j)| f(spec.t(k), spec.direction(j)));
        Self::new(spec, parity, values)
    }

    pub fn spec(&self) -> &SinogramSpec {
        &self.spec
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn t_samples(&self) -> Vec<f64> {
        (0..self.spec.n_t).map(|k| self.spec.t(k)).collect()
    }

    pub fn directions(&self) -> Vec<[f64; 2]> {
        (0..self.spec.n_dir).map(|j| self.spec.direction(j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).to_vec()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { spec: self.spec, parity: self.parity, values: &self.values * a }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation of column `j` at offset `t`, zero outside the grid.
    pub fn interp(&self, j: usize, t: f64) -> f64 {
        let u = (t - self.spec.t_min) / self.spec.dt();
        if !(u >= 0.0) || u > (self.spec.n_t - 1) as f64 {
            return 0.0;
        }
        let k = (u.floor() as usize).min(self.spec.n_t - 2);
        let w = u - k as f64;
        (1.0 - w) * self.values[[k, j]] + w * self.values[[k + 1, j]]
    }

    /// Whether the offsets are mirror-symmetric about zero.
    pub fn symmetric_offsets(&self) -> bool {
        (self.spec.t_min + self.spec.t_max).abs() <= 1e-12 * self.spec.t_max.abs().max(1.0)
    }

    /// `max |g(-t, xi) - sign g(t, xi)|` over the stored columns. For an even
    /// (odd) sinogram this is the defect of its columns being even (odd) in `t`
    /// when the generating field is itself even (odd).
    pub fn column_reflection_defect(&self, sign: f64) -> Option<f64> {
        if !self.symmetric_offsets() {
            return None;
        }
        let n = self.spec.n_t;
        let mut worst: f64 = 0.0;
        for j in 0..self.spec.n_dir {
            for k in 0..n {
                let d = self.values[[n - 1 - k, j]] - sign * self.values[[k, j]];
                worst = worst.max(d.abs());
            }
        }
        Some(worst)
    }

    /// Largest deviation of any column from the first one.
    pub fn column_spread(&self) -> f64 {
        let first = self.values.column(0);
        self.values
            .columns()
            .into_iter()
            .flat_map(|c| c.iter().zip(first.iter()).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// Full-circle inner product `int int g h dt dxi`, using the parity to
    /// account for the unstored half circle.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b).sum();
        2.0 * s * self.spec.dt() * self.spec.dtheta()
    }

    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut p = path.as_os_str().to_owned();
        p.push(".json");
        PathBuf::from(p)
    }

    /// Writes the flat binary file at `path` and the JSON sidecar at `path.json`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(8 * (4 + self.values.len()));
        for h in [self.spec.n_t as f64, self.spec.n_dir as f64, self.spec.t_min, self.spec.t_max] {
            buf.extend_from_slice(&h.to_le_bytes());
        }
        for v in self.values.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(path, buf)?;
        let side = Sidecar {
            n_t: self.spec.n_t,
            n_dir: self.spec.n_dir,
            t_min: self.spec.t_min,
            t_max: self.spec.t_max,
            parity: self.parity,
            angles: (0..self.spec.n_dir).map(|j| self.spec.angle(j)).collect(),
            layout: LAYOUT.into(),
        };
        fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(Self::sidecar_path(path))?)?;
        if bytes.len() < 32 || bytes.len() % 8 != 0 {
            return Err(RadonError::Layout(format!("{} bytes", bytes.len())));
        }
        let floats: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        let (n_t, n_dir) = (floats[0] as usize, floats[1] as usize);
        let spec = SinogramSpec { n_t, n_dir, t_min: floats[2], t_max: floats[3] };
        if n_t != side.n_t || n_dir != side.n_dir || spec.t_min != side.t_min || spec.t_max != side.t_max {
            return Err(RadonError::Layout("header disagrees with sidecar".into()));
        }
        if floats.len() != 4 + n_t * n_dir {
            return Err(RadonError::Layout(format!("expected {} values, found {}", n_t * n_dir, floats.len() - 4)));
        }
        let values = Array2::from_shape_vec((n_t, n_dir), floats[4..].to_vec())
            .map_err(|e| RadonError::Layout(e.to_string()))?;
        Self::new(spec, side.parity, values)
    }
}
