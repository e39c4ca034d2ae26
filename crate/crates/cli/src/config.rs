//! The optional TOML run file for `optimize`. Every key is optional and
//! command-line flags win over it.
//!
//! ```toml
//! output = "run"
//! loss = "rho1"
//! lambda = 1.0
//! kernel = "uniform"
//! scale = 1.0
//! steps = 500
//! snapshot_interval = 50
//!
//! [dataset]
//! shape = "horseshoe"
//! n = 300
//! seed = 7
//! ```

use std::path::{Path, PathBuf};

use anyhow::Context;
use persgrad::experiments::DatasetSpec;
use persgrad::{KernelFamily, RadiusCap};
use serde::Deserialize;

use crate::failure::{CliResult, ExitCodeExt};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Points file. Relative paths are taken from the config file's
    /// directory.
    pub input: Option<PathBuf>,
    pub dataset: Option<DatasetSpec>,
    pub output: Option<PathBuf>,
    pub loss: Option<String>,
    pub lambda: Option<f64>,
    pub kernel: Option<KernelFamily>,
    pub scale: Option<f64>,
    pub learning_rate: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub steps: Option<usize>,
    pub snapshot_interval: Option<usize>,
    pub max_dim: Option<usize>,
    pub radius_cap: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .or_io()?;
        let mut config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))
            .or_usage()?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.input, &mut config.output]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn radius_cap(&self) -> CliResult<Option<RadiusCap>> {
        self.radius_cap
            .as_deref()
            .map(str::parse)
            .transpose()
            .or_usage()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let text = r#"
            output = "run"
            loss = "rho1"
            lambda = 1.0
            kernel = "uniform"
            scale = 1.0
            steps = 500
            snapshot_interval = 50

            [dataset]
            shape = "horseshoe"
            n = 300
            seed = 7
        "#;
        let c: RunConfig = toml::from_str(text).unwrap();
        let d = c.dataset.unwrap();
        assert_eq!((d.n, d.seed), (300, 7));
        assert_eq!(c.kernel, Some(KernelFamily::Uniform));
        assert_eq!(c.steps, Some(500));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("stepz = 3").is_err());
    }
}
