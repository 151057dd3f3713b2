//! Shared experiment limits and defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natset::DEFAULT_MAX_PREFIX;
use crate::rational::Q;

pub const DEFAULT_HORIZON: u64 = 1000;
pub const DEFAULT_MAX_LEVEL: u32 = 3;
pub const DEFAULT_GENERATOR_LEVEL: u32 = 4;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub max_prefix: u64,
    pub horizon: u64,
    pub tol: Q,
    pub generator_level: u32,
    pub max_level: u32,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            max_prefix: DEFAULT_MAX_PREFIX,
            horizon: DEFAULT_HORIZON,
            tol: Q::new(1, 50),
            generator_level: DEFAULT_GENERATOR_LEVEL,
            max_level: DEFAULT_MAX_LEVEL,
            seed: DEFAULT_SEED,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_prefix == 0 || self.horizon == 0 || self.max_level == 0 {
            return Err(Error::InvalidArgument("bounds must be positive".into()));
        }
        if !self.tol.is_positive() || self.tol >= Q::one() {
            return Err(Error::InvalidArgument(format!("tol {} not in (0,1)", self.tol)));
        }
        Ok(())
    }
}
