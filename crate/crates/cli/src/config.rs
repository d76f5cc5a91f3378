use std::fs;
use std::path::Path;

use duopoly_core::sim::SimConfig;
use duopoly_core::{ModelParams, RegulatorLaw, RiskProfile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const BASELINE: &str = include_str!("../configs/baseline.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams<f64>,
    pub law: RegulatorLaw<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<RiskProfile<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSection {
    #[serde(flatten)]
    pub config: SimConfig<f64>,
    /// Fraction of trials allowed to end without anybody investing.
    #[serde(default = "default_unsettled")]
    pub max_unsettled_fraction: f64,
}

fn default_unsettled() -> f64 {
    0.5
}

impl RunConfig {
    pub fn baseline() -> Self {
        Self::parse(BASELINE).expect("shipped config parses")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::baseline()),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
