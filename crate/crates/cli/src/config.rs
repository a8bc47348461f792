use std::net::IpAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tangram_core::verify::VerifyConfig;
use tangram_harness::GatewayConfig;

use crate::CliError;

pub const CONFIG_ENV: &str = "TCE_CONFIG";

/// Defaults for every subcommand; command-line flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub normalize: NormalizeSection,
    pub task2: Task2Section,
    pub solver: SolverSection,
    pub verify: VerifyConfig,
    pub gateway: GatewayConfig,
    pub service: ServiceSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeSection {
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Task2Section {
    pub variant: Option<String>,
    pub shots: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub max_nodes: Option<u64>,
    pub time_limit_secs: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceSection {
    pub host: Option<IpAddr>,
    pub port: Option<u16>,
    pub allow_remote: Option<bool>,
}

/// Reads the file named by `--config`, else by `TCE_CONFIG`, else defaults.
pub fn load(flag: Option<&Path>) -> Result<(Config, Option<PathBuf>), CliError> {
    let path = flag.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let Some(path) = path else {
        return Ok((Config::default(), None));
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let cfg = toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
    Ok((cfg, Some(path)))
}
