use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;

/// Settings read from `--config`. Every field is optional; flags given on
/// the command line take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<String>,
    pub expression: Option<String>,
    pub distortion: Option<String>,
    pub family: Option<String>,
    pub n: Option<Vec<usize>>,
    pub grid: Option<usize>,
    pub window: Option<[f64; 2]>,
    pub domain_max: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub c: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Fails when the file names a different subcommand.
    pub fn check_subcommand(&self, name: &str) -> anyhow::Result<()> {
        match &self.subcommand {
            Some(s) if s != name => bail!("config is for `{s}`, not `{name}`"),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_files_and_rejects_unknown_keys() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"distortion": "moebius", "n": [1, 2], "window": [0, 4]}"#).unwrap();
        assert_eq!(cfg.distortion.as_deref(), Some("moebius"));
        assert_eq!(cfg.window, Some([0.0, 4.0]));
        assert!(serde_json::from_str::<RunConfig>(r#"{"distrotion": "moebius"}"#).is_err());
        let cfg = RunConfig { subcommand: Some("korovkin".into()), ..Default::default() };
        assert!(cfg.check_subcommand("korovkin").is_ok());
        assert!(cfg.check_subcommand("operator").is_err());
    }
}
