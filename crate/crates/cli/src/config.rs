//! TOML run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use triadic_core::analysis::Flavor;
use triadic_core::experiment::Experiment;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "OutputConfig::is_empty")]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative paths resolve against the config file's directory.
    pub dir: Option<PathBuf>,
}

impl OutputConfig {
    fn is_empty(&self) -> bool {
        self.dir.is_none()
    }
}

/// Command-line values that replace configured ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub delta: Option<f64>,
    pub flavor: Option<Flavor>,
    pub epsilon_rel: Option<f64>,
    pub window: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, e: &mut Experiment) {
        if let Some(v) = self.seed {
            e.seed = v;
        }
        if let Some(v) = self.dt {
            e.plan.dt = v;
        }
        if let Some(v) = self.delta {
            e.closure.delta = v;
        }
        if let Some(v) = self.flavor {
            e.closure.flavor = v;
        }
        if let Some(v) = self.epsilon_rel {
            e.regime.epsilon_rel = v;
        }
        if let Some(v) = self.window {
            e.regime.window_fraction = v;
        }
    }
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            output: OutputConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version: unsupported value {}, expected {SCHEMA_VERSION}",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let Some(dir) = &cfg.output.dir {
            if dir.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.output.dir = Some(base.join(dir));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))
    }
}
