use std::path::Path;

use meshplan_core::sweep::Rate;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub maxflow: MaxflowConfig,
    #[serde(default)]
    pub dimension: DimensionConfig,
    #[serde(default)]
    pub blocking: BlockingConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxflowConfig {
    pub engine: Option<String>,
    pub input_format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionConfig {
    pub granularity_kbps: Option<u64>,
    pub engine: Option<String>,
    pub input_format: Option<String>,
}

/// Scenario keys, shared by `blocking` and `simulate`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockingConfig {
    pub users: Option<u32>,
    pub rb_per_call: Option<u32>,
    pub rate: Option<Rate>,
    pub holding: Option<f64>,
    pub modulation: Option<String>,
    pub capacity_mbps: Option<f64>,
    pub simultaneous_rb: Option<u64>,
    pub format: Option<String>,
    pub ser: Option<f64>,
    pub ser_snr_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub calls: Option<u64>,
    pub warmup: Option<u64>,
    pub seed: Option<u64>,
    pub replications: Option<u64>,
    pub holding_dist: Option<String>,
    pub per_user: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub format: Option<String>,
    pub log_y: Option<bool>,
    pub title: Option<String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = crate::read_file(path)?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}
