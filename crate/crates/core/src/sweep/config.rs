use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SweepError;
use crate::channel::{exponential_correlation, ChannelDims, ChannelModel, CorrelationModel};
use crate::linalg::{self, CMatrix};
use crate::montecarlo::MIN_TRIALS;

/// A sweep over an SNR grid (in dB) and a list of multiplexing gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub model: ModelSpec,
    /// Label written to the `model_id` column; derived from `model` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    pub snr_db: DbGrid,
    pub r: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub c_mode: CMode,
    /// Diversity exponent for the piecewise curve. Required for correlated
    /// models whenever `c_mode` is not `omit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diversity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    #[default]
    Iid,
    /// Full `mn x mn` correlation read from a matrix file.
    Full { matrix: PathBuf },
    Kronecker { tx: SideSpec, rx: SideSpec },
}

/// One side of a Kronecker model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SideSpec {
    Exponential { rho: f64 },
    Matrix { matrix: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DbGrid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum CMode {
    /// User-supplied high-SNR constant: one value, or one per `r`.
    User { c: CValues },
    /// Fit `c` from Monte Carlo estimates at these SNRs (dB).
    Calibrate { anchors_db: Vec<f64> },
    #[default]
    Omit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CValues {
    One(f64),
    PerR(Vec<f64>),
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config; relative matrix paths resolve against its directory.
    pub fn from_file(path: &Path) -> Result<(Self, PathBuf), SweepError> {
        let text = fs::read_to_string(path).map_err(|source| SweepError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config = Self::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((config, base))
    }

    pub fn dims(&self) -> Result<ChannelDims, SweepError> {
        Ok(ChannelDims::new(self.m, self.n)?)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: String| Err(SweepError::Config(msg));
        self.dims()?;
        if self.r.is_empty() {
            return bad("the r grid is empty".into());
        }
        if let Some(r) = self.r.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return bad(format!("multiplexing gain {r} must be finite and nonnegative"));
        }
        let g = &self.snr_db;
        if !(g.step > 0.0) || !g.step.is_finite() {
            return bad(format!("SNR step must be positive, got {}", g.step));
        }
        if !(g.stop >= g.start) || !g.start.is_finite() || !g.stop.is_finite() {
            return bad(format!("SNR grid {}..{} is empty", g.start, g.stop));
        }
        if self.trials < MIN_TRIALS {
            return bad(format!(
                "trials = {} is below the floor of {MIN_TRIALS}",
                self.trials
            ));
        }
        match &self.c_mode {
            CMode::User { c: CValues::PerR(v) } if v.len() != self.r.len() => {
                return bad(format!(
                    "{} values of c given for {} values of r",
                    v.len(),
                    self.r.len()
                ));
            }
            CMode::User { c } => {
                let vals = match c {
                    CValues::One(v) => vec![*v],
                    CValues::PerR(v) => v.clone(),
                };
                if vals.iter().any(|v| !(*v > 0.0)) {
                    return bad("c must be positive".into());
                }
            }
            CMode::Calibrate { anchors_db } if anchors_db.is_empty() => {
                return bad("calibration needs at least one anchor SNR".into());
            }
            _ => {}
        }
        let needs_d = !matches!(self.c_mode, CMode::Omit);
        if needs_d && !matches!(self.model, ModelSpec::Iid) && self.diversity.is_none() {
            return bad("correlated models need an explicit `diversity` for the piecewise curve".into());
        }
        Ok(())
    }

    /// Value of `c` for the i-th multiplexing gain, when supplied by the user.
    pub fn user_c(&self, index: usize) -> Option<f64> {
        match &self.c_mode {
            CMode::User { c: CValues::One(c) } => Some(*c),
            CMode::User { c: CValues::PerR(v) } => v.get(index).copied(),
            _ => None,
        }
    }

    pub fn model_label(&self) -> String {
        if let Some(id) = &self.model_id {
            return id.clone();
        }
        let side = |s: &SideSpec| match s {
            SideSpec::Exponential { rho } => format!("rho{rho}"),
            SideSpec::Matrix { matrix } => stem(matrix),
        };
        match &self.model {
            ModelSpec::Iid => "iid".into(),
            ModelSpec::Full { matrix } => format!("full-{}", stem(matrix)),
            ModelSpec::Kronecker { tx, rx } => format!("kron-tx-{}-rx-{}", side(tx), side(rx)),
        }
    }

    pub fn build_model(&self, base: &Path) -> Result<ChannelModel, SweepError> {
        let dims = self.dims()?;
        let correlation = match &self.model {
            ModelSpec::Iid => CorrelationModel::Iid,
            ModelSpec::Full { matrix } => {
                CorrelationModel::Full(read_matrix_file(&base.join(matrix))?)
            }
            ModelSpec::Kronecker { tx, rx } => CorrelationModel::Kronecker {
                tx: side_matrix(tx, dims.m(), base)?,
                rx: side_matrix(rx, dims.n(), base)?,
            },
        };
        Ok(ChannelModel::new(dims, correlation)?)
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".into())
}

fn side_matrix(side: &SideSpec, size: usize, base: &Path) -> Result<CMatrix, SweepError> {
    match side {
        SideSpec::Exponential { rho } => Ok(linalg::to_complex(&exponential_correlation(size, *rho)?)),
        SideSpec::Matrix { matrix } => read_matrix_file(&base.join(matrix)),
    }
}

/// Parses a square complex matrix: one row per line, each row a
/// comma-separated list of `re,im` pairs. Blank lines and `#` lines are
/// skipped.
pub fn parse_matrix(text: &str) -> Result<CMatrix, String> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        if !values.len().is_multiple_of(2) {
            return Err(format!(
                "line {}: expected re,im pairs, found {} numbers",
                lineno + 1,
                values.len()
            ));
        }
        rows.push(values.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
    }
    let k = rows.len();
    if k == 0 {
        return Err("matrix file is empty".into());
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != k) {
        return Err(format!("row {} has {} entries, expected {k}", i + 1, row.len()));
    }
    Ok(CMatrix::from_fn(k, k, |i, j| rows[i][j]))
}

pub fn read_matrix_file(path: &Path) -> Result<CMatrix, SweepError> {
    let text = fs::read_to_string(path).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text).map_err(|msg| SweepError::Matrix {
        path: path.to_path_buf(),
        msg,
    })
}
