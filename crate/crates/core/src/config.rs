//! Run configuration shared by the experiments and the command line.

use crate::error::{DyadError, Result};
use crate::generators::SymbolSpec;
use crate::operator::ORACLE_DEPTH_CAP;
use crate::weights::WeightSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<String>,
    pub depth: u32,
    pub trials: usize,
    pub seed: u64,
    pub p: f64,
    pub weight: WeightSpec,
    pub symbols: SymbolSpec,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            depth: 8,
            trials: 100,
            seed: 1,
            p: 2.0,
            weight: WeightSpec::default(),
            symbols: SymbolSpec::default(),
            out: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| DyadError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=ORACLE_DEPTH_CAP).contains(&self.depth) {
            return Err(DyadError::Config(format!(
                "depth must lie in 1..={ORACLE_DEPTH_CAP}, got {}",
                self.depth
            )));
        }
        if self.trials == 0 {
            return Err(DyadError::Config("trials must be at least 1".into()));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(DyadError::Config(format!("p must satisfy 1 < p < ∞, got {}", self.p)));
        }
        match self.weight {
            WeightSpec::Cascade { rho, .. } if !(0.0..1.0).contains(&rho) => {
                Err(DyadError::Config(format!("cascade rho must lie in [0, 1), got {rho}")))
            }
            WeightSpec::Power { alpha, .. } if !(alpha > -1.0 && alpha < 1.0) => {
                Err(DyadError::Config(format!("power alpha must lie in (−1, 1), got {alpha}")))
            }
            _ => Ok(()),
        }
    }

    /// The configuration as echoed into reports (output location left out,
    /// so the same run written to two places produces identical reports).
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("out");
        }
        v
    }

    /// Even depths from 4 up to the configured depth (which is always
    /// included); just the configured depth when it is below 4.
    pub fn depth_sweep(&self) -> Vec<u32> {
        if self.depth < 4 {
            return vec![self.depth];
        }
        let mut out: Vec<u32> = (4..=self.depth).step_by(2).collect();
        if out.last() != Some(&self.depth) {
            out.push(self.depth);
        }
        out
    }
}
