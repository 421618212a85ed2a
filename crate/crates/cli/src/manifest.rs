use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::output;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
    pub total_topplings: Option<u64>,
    pub exit_code: i32,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            outputs: Vec::new(),
            duration_secs: 0.0,
            total_topplings: None,
            exit_code: 0,
        }
    }

    /// Writes the manifest next to `out`; the manifest lists itself last.
    pub fn write(mut self, out: &Path, elapsed: Duration) -> Result<PathBuf, CliError> {
        let path = manifest_path(out);
        self.duration_secs = elapsed.as_secs_f64();
        self.outputs.push(path.clone());
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes") + "\n";
        output::write_file(&path, text.as_bytes())?;
        Ok(path)
    }
}
