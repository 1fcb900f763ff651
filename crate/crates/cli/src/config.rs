use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{find_target, Mode, Params, TargetInfo};
use crate::error::{CliError, CliResult};

fn default_id() -> String {
    "experiment".into()
}

/// The mode a target runs in when none is given: its first supported one.
fn default_mode(target: &str) -> Mode {
    find_target(target).map(|t| t.modes[0]).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawConfig")]
pub struct ExperimentConfig {
    pub id: String,
    pub target: String,
    pub mode: Mode,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    /// Sampled-mode trial count; the target's default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Fail with exit code 3 when any check in the report fails.
    pub check: bool,
    /// Keep one row per trial in the report.
    pub record_trials: bool,
}

/// On-disk shape, where `mode` may be omitted.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_id")]
    id: String,
    target: String,
    #[serde(default)]
    mode: Option<Mode>,
    #[serde(default)]
    params: BTreeMap<String, Value>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    trials: Option<usize>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    check: bool,
    #[serde(default)]
    record_trials: bool,
}

impl From<RawConfig> for ExperimentConfig {
    fn from(r: RawConfig) -> Self {
        ExperimentConfig {
            mode: r.mode.unwrap_or_else(|| default_mode(&r.target)),
            id: r.id,
            target: r.target,
            params: r.params,
            seed: r.seed,
            trials: r.trials,
            out: r.out,
            check: r.check,
            record_trials: r.record_trials,
        }
    }
}

impl ExperimentConfig {
    pub fn new(target: impl Into<String>) -> Self {
        let target = target.into();
        ExperimentConfig {
            id: default_id(),
            mode: default_mode(&target),
            target,
            params: BTreeMap::new(),
            seed: 0,
            trials: None,
            out: None,
            check: false,
            record_trials: false,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn param(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        ExperimentConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks the target, mode, parameter names and kinds, and the trial
    /// count; returns the resolved parameters.
    pub fn validate(&self) -> CliResult<(TargetInfo, Params)> {
        let info = find_target(&self.target)?;
        if !info.modes.contains(&self.mode) {
            return Err(CliError::invalid("mode", format!("`{}` supports {:?}", info.name, info.modes)));
        }
        if self.trials == Some(0) {
            return Err(CliError::invalid("trials", "must be positive"));
        }
        let params = Params::resolve(&info, &self.params)?;
        Ok((info, params))
    }

    pub fn trial_count(&self, info: &TargetInfo) -> usize {
        self.trials.unwrap_or(info.default_trials)
    }
}
