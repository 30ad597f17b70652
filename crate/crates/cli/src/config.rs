use std::path::{Path, PathBuf};

use serde::Deserialize;

use poincare_core::kloosterman::{KloostermanOptions, ORDER_CAP};
use poincare_core::residues::RESIDUE_BUDGET;

use crate::output::Format;

/// Settings read from `--config`. Every key is optional; unknown keys are
/// rejected.
///
/// ```toml
/// field = "Qsqrt:5"
/// order_cap = 1000000
/// residue_budget = 10000000
/// precision_bits = 128
/// cache_dir = "/var/cache/poincare"
/// format = "json"
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: Option<String>,
    pub order_cap: Option<u64>,
    pub residue_budget: Option<u64>,
    pub precision_bits: Option<u32>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub field: Option<i64>,
    pub order_cap: u64,
    pub residue_budget: u64,
    pub precision_bits: u32,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            field: None,
            order_cap: ORDER_CAP,
            residue_budget: RESIDUE_BUDGET,
            precision_bits: 128,
            cache_dir: None,
            format: Format::Json,
        }
    }
}

/// `Qsqrt:<d>` or a bare `d`.
pub fn parse_field_spec(s: &str) -> Result<i64, String> {
    let t = s.trim();
    let t = t.strip_prefix("Qsqrt:").unwrap_or(t);
    t.parse::<i64>().map_err(|_| format!("bad field spec \"{s}\", expected Qsqrt:<d>"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let file: ConfigFile = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::default().merge(file)
    }

    fn merge(mut self, file: ConfigFile) -> Result<Config, String> {
        if let Some(f) = file.field {
            self.field = Some(parse_field_spec(&f)?);
        }
        if let Some(v) = file.order_cap {
            self.order_cap = v;
        }
        if let Some(v) = file.residue_budget {
            self.residue_budget = v;
        }
        if let Some(v) = file.precision_bits {
            self.precision_bits = v;
        }
        if file.cache_dir.is_some() {
            self.cache_dir = file.cache_dir;
        }
        if let Some(v) = file.format {
            self.format = v;
        }
        if self.order_cap == 0 || self.residue_budget == 0 || self.precision_bits < 53 {
            return Err("order_cap and residue_budget must be positive, precision_bits at least 53".into());
        }
        Ok(self)
    }

    pub fn kloosterman(&self) -> KloostermanOptions {
        KloostermanOptions {
            order_cap: self.order_cap,
            residue_budget: self.residue_budget,
        }
    }
}
