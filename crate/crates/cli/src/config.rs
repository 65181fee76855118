use std::path::{Path, PathBuf};

use serde::Deserialize;
use welch_kernel::kernels::KernelSpec;
use welch_kernel::rank::DEFAULT_EPSILON;

use crate::output::{read_text, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

/// `rank-scan` configuration, read from JSON or (by extension) TOML.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankScanConfig {
    pub kernels: Vec<KernelSpec>,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub thresholds: Option<Vec<f64>>,
    /// Output prefix; `.csv` and `.json` are appended.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RankScanConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        Self::parse(&text, path.extension().and_then(|e| e.to_str()) == Some("toml"))
    }

    pub fn parse(text: &str, toml_syntax: bool) -> Result<Self, CliError> {
        let cfg: Self = if toml_syntax {
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?
        } else {
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?
        };
        for k in &cfg.kernels {
            k.validated()?;
        }
        Ok(cfg)
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds.clone().unwrap_or_else(|| vec![DEFAULT_EPSILON])
    }
}
