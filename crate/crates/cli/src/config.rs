//! Experiment configuration files.
//!
//! A config is a TOML document with `[model]`, `[bank]`, `[policy]`, `[run]`
//! and `[output]` tables. Matrices are written row-major as nested arrays.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qflqg_core::{QuantizerSpec, SystemModel};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelBlock,
    pub bank: BankBlock,
    #[serde(default)]
    pub policy: PolicyBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub state_dim: usize,
    pub input_dim: usize,
    pub horizon: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub noise_cov: Vec<Vec<f64>>,
    pub init_mean: Vec<f64>,
    pub init_cov: Vec<Vec<f64>>,
    pub q1: Vec<Vec<f64>>,
    pub q2: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankBlock {
    #[serde(default)]
    pub include_open_loop: bool,
    #[serde(default)]
    pub quantizer: Vec<QuantizerBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizerBlock {
    pub name: String,
    pub cost: f64,
    /// One breakpoint list per axis; an empty list leaves the axis whole.
    pub breakpoints: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Offline,
    Greedy,
    Rollout,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyBlock {
    #[serde(default = "default_flavor")]
    pub flavor: Flavor,
    /// Future-noise samples per rollout decision.
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    /// Sigma points per axis for the oracle (3 or 5).
    #[serde(default = "default_points")]
    pub oracle_points: usize,
}

fn default_flavor() -> Flavor {
    Flavor::Offline
}
fn default_samples() -> usize {
    64
}
fn default_points() -> usize {
    3
}

impl Default for PolicyBlock {
    fn default() -> Self {
        Self {
            flavor: default_flavor(),
            n_samples: default_samples(),
            oracle_points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    /// Full traces are written for this many leading runs.
    #[serde(default)]
    pub trace_runs: usize,
}

fn default_runs() -> usize {
    10_000
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            n_runs: default_runs(),
            seed: 0,
            betas: None,
            trace_runs: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_dir")]
    pub dir: String,
}

fn default_dir() -> String {
    "out".into()
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: default_dir() }
    }
}

fn invalid(field: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        msg: msg.into(),
    }
}

fn matrix(field: &str, rows: &[Vec<f64>], shape: (usize, usize)) -> Result<DMatrix<f64>, CliError> {
    let got_cols = rows.first().map_or(0, Vec::len);
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(invalid(
            field,
            format!(
                "expected {}x{} matrix, got {}x{}",
                shape.0,
                shape.1,
                rows.len(),
                got_cols
            ),
        ));
    }
    if let Some((i, j)) = rows
        .iter()
        .enumerate()
        .find_map(|(i, r)| r.iter().position(|x| !x.is_finite()).map(|j| (i, j)))
    {
        return Err(invalid(format!("{field}[{i}][{j}]"), "entry is not finite"));
    }
    Ok(DMatrix::from_fn(shape.0, shape.1, |i, j| rows[i][j]))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical TOML text of the whole config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical config without the output block, so that
    /// writing to a different directory keeps the hash.
    pub fn hash(&self) -> String {
        let mut copy = self.clone();
        copy.output = OutputBlock::default();
        let digest = Sha256::digest(copy.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn system_model(&self) -> Result<SystemModel, CliError> {
        let m = &self.model;
        let (n, k) = (m.state_dim, m.input_dim);
        if n == 0 {
            return Err(invalid("model.state_dim", "must be at least 1"));
        }
        if k == 0 {
            return Err(invalid("model.input_dim", "must be at least 1"));
        }
        if m.horizon == 0 {
            return Err(invalid("model.horizon", "must be at least 1"));
        }
        if m.init_mean.len() != n {
            return Err(invalid(
                "model.init_mean",
                format!("expected length {n}, got {}", m.init_mean.len()),
            ));
        }
        let model = SystemModel {
            a: matrix("model.a", &m.a, (n, n))?,
            b: matrix("model.b", &m.b, (n, k))?,
            noise_cov: matrix("model.noise_cov", &m.noise_cov, (n, n))?,
            init_mean: DVector::from_column_slice(&m.init_mean),
            init_cov: matrix("model.init_cov", &m.init_cov, (n, n))?,
            q1: matrix("model.q1", &m.q1, (n, n))?,
            q2: matrix("model.q2", &m.q2, (n, n))?,
            r: matrix("model.r", &m.r, (k, k))?,
            horizon: m.horizon,
            quantizer_costs: vec![],
        };
        model.validate().map_err(|e| invalid("model", e.to_string()))?;
        Ok(model)
    }

    pub fn quantizer_specs(&self) -> Result<Vec<QuantizerSpec>, CliError> {
        let n = self.model.state_dim;
        if self.bank.quantizer.is_empty() && !self.bank.include_open_loop {
            return Err(invalid("bank", "needs at least one quantizer"));
        }
        self.bank
            .quantizer
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let field = format!("bank.quantizer[{i}]");
                if q.breakpoints.len() != n {
                    return Err(invalid(
                        format!("{field}.breakpoints"),
                        format!("expected {n} axes, got {}", q.breakpoints.len()),
                    ));
                }
                if !(q.cost.is_finite() && q.cost >= 0.0) {
                    return Err(invalid(format!("{field}.cost"), "must be finite and nonnegative"));
                }
                let mut spec = QuantizerSpec::grid(&q.name, &q.breakpoints, q.cost)
                    .map_err(|e| invalid(format!("{field}.breakpoints"), e.to_string()))?;
                if let Some(reps) = &q.representatives {
                    if reps.len() != spec.cells.len() || reps.iter().any(|r| r.len() != n) {
                        return Err(invalid(
                            format!("{field}.representatives"),
                            format!("expected {} points of length {n}", spec.cells.len()),
                        ));
                    }
                    spec.representatives =
                        Some(reps.iter().map(|r| DVector::from_column_slice(r)).collect());
                }
                Ok(spec)
            })
            .collect()
    }

    pub fn betas(&self) -> Result<Vec<f64>, CliError> {
        let betas = self.run.betas.clone().unwrap_or_else(qflqg_core::default_betas);
        if betas.is_empty() {
            return Err(invalid("run.betas", "must not be empty"));
        }
        if let Some(i) = betas.iter().position(|b| !(*b > 0.0 && *b <= 1.0)) {
            return Err(invalid(format!("run.betas[{i}]"), "must lie in (0, 1]"));
        }
        Ok(betas)
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<(), CliError> {
        self.system_model()?;
        self.quantizer_specs()?;
        self.betas()?;
        if self.run.n_runs == 0 {
            return Err(invalid("run.n_runs", "must be at least 1"));
        }
        if self.policy.n_samples == 0 {
            return Err(invalid("policy.n_samples", "must be at least 1"));
        }
        if !matches!(self.policy.oracle_points, 3 | 5) {
            return Err(invalid("policy.oracle_points", "must be 3 or 5"));
        }
        Ok(())
    }
}
