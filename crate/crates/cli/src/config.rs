//! JSON run configurations with `--set key=value` overrides.
//!
//! Configs are strict: unknown keys are rejected, and every subcommand
//! validates its full configuration before doing any work.

use anyhow::{anyhow, bail, Context, Result};
use maxfun_core::classify::ComparisonConfig;
use serde::Deserialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

/// Read a JSON config and apply dotted-path overrides
/// (`--set experiment.cv_k=5`). Override values parse as JSON, falling
/// back to plain strings.
pub fn load_value(path: &Path, overrides: &[String]) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("--set needs key=value, got {item:?}"))?;
        let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut value, key, parsed)?;
    }
    Ok(value)
}

fn set_path(root: &mut Value, dotted: &str, new: Value) -> Result<()> {
    let mut cursor = root;
    let parts: Vec<&str> = dotted.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let object = cursor
            .as_object_mut()
            .ok_or_else(|| anyhow!("--set {dotted}: {} is not an object", parts[..i].join(".")))?;
        if i + 1 == parts.len() {
            object.insert(part.to_string(), new);
            return Ok(());
        }
        cursor = object
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one part")
}

pub fn parse<T: serde::de::DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| anyhow!("invalid configuration: {e}"))
}

/// `pool` subcommand configuration.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolConfig {
    /// PGM/PNG image or `MFPF` feature file.
    pub input: PathBuf,
    /// Pooled output, written as an `MFPF` feature file.
    pub output: PathBuf,
    /// One of `avg`, `max`, `mixed`, `stochastic`, `maxfun`,
    /// `maxfun_noncentered`.
    pub method: String,
    pub window: usize,
    pub stride: usize,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub r_min: Option<usize>,
    #[serde(default)]
    pub b: Option<usize>,
    /// Optional CSV of per-cell maxfun winners.
    #[serde(default)]
    pub provenance_output: Option<PathBuf>,
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        match self.method.as_str() {
            "avg" | "max" | "stochastic" => Ok(()),
            "mixed" => {
                let alpha = self.alpha.ok_or_else(|| anyhow!("mixed pooling needs `alpha`"))?;
                if !(0.0..=1.0).contains(&alpha) {
                    bail!("alpha must lie in [0, 1], got {alpha}");
                }
                Ok(())
            }
            "maxfun" | "maxfun_noncentered" => {
                let b = self.b.ok_or_else(|| anyhow!("maxfun pooling needs `b`"))?;
                let cfg = maxfun_core::pooling::MaxfunConfig {
                    r_min: self.r_min.unwrap_or(1),
                    b,
                    centered: self.method == "maxfun",
                };
                cfg.validate(self.window).map_err(|e| anyhow!("{e}"))?;
                Ok(())
            }
            other => bail!("unknown pooling method {other:?}"),
        }
    }
}

/// One layer of a `csc-verify` model.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    /// Local filters, each a length-`n0` vector; all must share a length.
    pub filters: Vec<Vec<f64>>,
    pub window: usize,
    pub stride: usize,
    pub b: usize,
    #[serde(default = "default_r_min")]
    pub r_min: usize,
    pub lambda: usize,
}

fn default_r_min() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Spatial length of the first layer's signal.
    pub signal_len: usize,
    pub layers: Vec<LayerConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Oracle,
    Greedy,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MuChoice {
    #[default]
    PerLayer,
    FirstLayer,
}

/// `csc-verify` subcommand configuration.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CscVerifyConfig {
    pub trials: u64,
    pub seed: u64,
    pub eps0: f64,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub mu_convention: MuChoice,
    #[serde(default = "default_amp_range")]
    pub amp_range: (f64, f64),
    pub report_output: PathBuf,
    pub model: ModelConfig,
}

fn default_amp_range() -> (f64, f64) {
    (1.0, 2.0)
}

/// Dataset source for `classify`.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// Built-in deterministic texture corpus.
    Synthetic {
        classes: usize,
        per_class: usize,
        seed: u64,
    },
    /// `path<TAB>label` manifest of PGM/PNG images.
    Manifest { path: PathBuf },
    /// Manifest of precomputed `MFPF` feature files (skips extraction).
    Features { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFilter {
    pub min_count: usize,
    pub max_count: usize,
}

/// `classify` subcommand configuration.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    pub dataset: DatasetConfig,
    #[serde(default = "default_image_size")]
    pub image_size: usize,
    #[serde(default)]
    pub bank_seed: u64,
    #[serde(default)]
    pub class_filter: Option<ClassFilter>,
    pub experiment: ComparisonConfig,
    pub csv_output: PathBuf,
    #[serde(default)]
    pub table_output: Option<PathBuf>,
}

fn default_image_size() -> usize {
    128
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.image_size < 4 {
            bail!("image_size must be at least 4");
        }
        self.experiment.validate().map_err(|e| anyhow!("{e}"))?;
        if let DatasetConfig::Synthetic { classes, per_class, .. } = self.dataset {
            if classes < 2 || per_class == 0 {
                bail!("synthetic dataset needs >= 2 classes and >= 1 image per class");
            }
        }
        Ok(())
    }
}
