use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Provenance record written next to the outputs of every run.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub config_path: Option<PathBuf>,
    /// Effective settings after flags were applied over the config file.
    pub settings: Value,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub exit_code: Option<i32>,
}

impl RunManifest {
    pub fn start(subcommand: &str, args: Vec<String>) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            args,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            config_path: None,
            settings: Value::Null,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            started_at: now(),
            finished_at: None,
            exit_code: None,
        }
    }

    pub fn finish(&mut self, exit_code: i32) {
        self.finished_at = Some(now());
        self.exit_code = Some(exit_code);
    }

    /// `run_manifest.json` in the output directory, `<file>.manifest.json`
    /// beside an output file, or `tce-<subcommand>.manifest.json` in the
    /// working directory when the run has no outputs.
    pub fn default_path(&self, out_dir: Option<&Path>, out_file: Option<&Path>) -> PathBuf {
        if let Some(d) = out_dir {
            return d.join("run_manifest.json");
        }
        if let Some(f) = out_file {
            let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            return f.with_file_name(format!("{name}.manifest.json"));
        }
        PathBuf::from(format!("tce-{}.manifest.json", self.subcommand))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self).expect("manifests serialize") + "\n")
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
