//! Experiment configuration: a flat TOML file whose keys map one-to-one onto
//! [`ExperimentConfig`]. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dca_core::DimRule;

use crate::data::SyntheticSpec;
use crate::{HarnessError, Result};

/// Value of the `dataset` key that selects the built-in generator.
pub const SYNTHETIC: &str = "synthetic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Individual,
    Centralized,
    DcaMinPerturb,
    DcaGep,
    DcaGepWeighted,
    DcaQrSvd,
    DcaQrRandsvd,
    DcaMinPerturbRand,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Individual,
        Method::Centralized,
        Method::DcaMinPerturb,
        Method::DcaGep,
        Method::DcaGepWeighted,
        Method::DcaQrSvd,
        Method::DcaQrRandsvd,
        Method::DcaMinPerturbRand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Individual => "individual",
            Method::Centralized => "centralized",
            Method::DcaMinPerturb => "dca_min_perturb",
            Method::DcaGep => "dca_gep",
            Method::DcaGepWeighted => "dca_gep_weighted",
            Method::DcaQrSvd => "dca_qr_svd",
            Method::DcaQrRandsvd => "dca_qr_randsvd",
            Method::DcaMinPerturbRand => "dca_min_perturb_rand",
        }
    }

    pub fn is_collaborative(self) -> bool {
        !matches!(self, Method::Individual | Method::Centralized)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimRuleMode {
    /// Each institution applies the threshold to its own training rows.
    #[default]
    PerInstitution,
    /// Institution 0's count is imposed on everyone.
    InstitutionOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    #[default]
    Ridge,
    Centroid,
}

fn default_label_column() -> String {
    "label".into()
}
fn default_penalty() -> f64 {
    0.01
}
fn default_half() -> f64 {
    0.5
}
fn default_repetitions() -> usize {
    10
}
fn default_oversample() -> usize {
    10
}
fn default_power_iters() -> usize {
    2
}
fn default_timing_repeats() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV path (relative paths resolve against the config file) or `"synthetic"`.
    pub dataset: String,
    #[serde(default = "default_label_column")]
    pub label_column: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_classes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_dims: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_seed: Option<u64>,

    /// Institution counts N to sweep.
    pub institutions: Vec<usize>,
    pub rows_per_institution: usize,
    /// r = multiplier * m for each entry.
    pub anchor_multipliers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_fixed: Option<usize>,
    #[serde(default)]
    pub dim_rule: DimRuleMode,
    /// Collaborative dimension; defaults to the smallest reduced dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collab_dim: Option<usize>,

    pub methods: Vec<Method>,
    #[serde(default)]
    pub classifier: ClassifierKind,
    /// Relative to the mean per-feature sum of squares of the training matrix.
    #[serde(default = "default_penalty")]
    pub ridge_penalty: f64,

    pub distribution_seeds: Vec<u64>,
    #[serde(default = "default_repetitions")]
    pub holdout_repetitions: usize,
    /// Fraction of each institution's rows held out for testing.
    #[serde(default = "default_half")]
    pub holdout_ratio: f64,
    #[serde(default)]
    pub seed: u64,

    /// Initial shift on B for the generalized eigensolver.
    #[serde(default)]
    pub gep_ridge: f64,
    #[serde(default = "default_oversample")]
    pub rsvd_oversample: usize,
    #[serde(default = "default_power_iters")]
    pub rsvd_power_iters: usize,
    #[serde(default = "default_timing_repeats")]
    pub timing_repeats: usize,
    /// Wall times in accuracy mode; off keeps accuracy output byte-reproducible.
    #[serde(default)]
    pub record_timing: bool,

    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.institutions.is_empty() || self.institutions.contains(&0) {
            return Err(cfg_err("institutions must be a non-empty list of counts >= 1"));
        }
        if self.rows_per_institution < 2 {
            return Err(cfg_err("rows_per_institution must be >= 2"));
        }
        if self.anchor_multipliers.is_empty() || self.anchor_multipliers.contains(&0) {
            return Err(cfg_err("anchor_multipliers must be a non-empty list of values >= 1"));
        }
        match (self.dim_threshold, self.dim_fixed) {
            (Some(t), None) if t > 0.0 && t <= 1.0 => {}
            (Some(t), None) => return Err(cfg_err(format!("dim_threshold {t} outside (0, 1]"))),
            (None, Some(0)) => return Err(cfg_err("dim_fixed must be >= 1")),
            (None, Some(_)) => {}
            _ => return Err(cfg_err("set exactly one of dim_threshold and dim_fixed")),
        }
        if self.dim_rule == DimRuleMode::InstitutionOne && self.dim_threshold.is_none() {
            return Err(cfg_err("dim_rule = \"institution_one\" needs dim_threshold"));
        }
        if self.collab_dim == Some(0) {
            return Err(cfg_err("collab_dim must be >= 1"));
        }
        for (k, m) in self.methods.iter().enumerate() {
            if self.methods[..k].contains(m) {
                return Err(cfg_err(format!("method {m} listed twice")));
            }
        }
        if !(self.ridge_penalty > 0.0 && self.ridge_penalty.is_finite()) {
            return Err(cfg_err("ridge_penalty must be positive"));
        }
        if self.distribution_seeds.is_empty() {
            return Err(cfg_err("distribution_seeds must not be empty"));
        }
        if self.holdout_repetitions == 0 {
            return Err(cfg_err("holdout_repetitions must be >= 1"));
        }
        if !(self.holdout_ratio > 0.0 && self.holdout_ratio < 1.0) {
            return Err(cfg_err(format!("holdout_ratio {} outside (0, 1)", self.holdout_ratio)));
        }
        if !(self.gep_ridge >= 0.0 && self.gep_ridge.is_finite()) {
            return Err(cfg_err("gep_ridge must be >= 0"));
        }
        if self.timing_repeats == 0 {
            return Err(cfg_err("timing_repeats must be >= 1"));
        }
        if self.dataset == SYNTHETIC {
            self.synthetic_spec()?;
        }
        Ok(())
    }

    /// Requirements specific to timing runs.
    pub(crate) fn validate_timing(&self) -> Result<()> {
        if let Some(m) = self.methods.iter().find(|m| !m.is_collaborative()) {
            return Err(cfg_err(format!(
                "timing runs time collaborative-function estimation; {m} has none"
            )));
        }
        Ok(())
    }

    pub fn dim_rule(&self) -> DimRule {
        match (self.dim_threshold, self.dim_fixed) {
            (Some(t), _) => DimRule::Threshold(t),
            (None, Some(k)) => DimRule::Fixed(k),
            (None, None) => unreachable!("validated"),
        }
    }

    pub fn synthetic_spec(&self) -> Result<SyntheticSpec> {
        let missing = |key: &str| cfg_err(format!("dataset = \"synthetic\" needs {key}"));
        let spec = SyntheticSpec {
            classes: self.synthetic_classes.ok_or_else(|| missing("synthetic_classes"))?,
            dims: self.synthetic_dims.ok_or_else(|| missing("synthetic_dims"))?,
            rows: self.synthetic_rows.ok_or_else(|| missing("synthetic_rows"))?,
            spread: self.synthetic_spread.ok_or_else(|| missing("synthetic_spread"))?,
            seed: self.synthetic_seed.unwrap_or(0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dataset_path(&self) -> PathBuf {
        let p = PathBuf::from(&self.dataset);
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        }
    }

    /// `key = value` pairs in declaration order, values in TOML syntax.
    pub fn echo(&self) -> Vec<(String, String)> {
        let text = toml::to_string(self).expect("config serializes");
        text.lines()
            .filter_map(|line| line.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}
