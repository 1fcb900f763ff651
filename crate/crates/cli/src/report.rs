use std::io::Write;

use qnlcc::ccproto::CostLedger;
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::CliResult;

/// Standard errors used for every confidence radius.
pub const RADIUS_Z: f64 = 4.0;

/// Headline number of a run. Exact results never carry a confidence radius;
/// sampled results always do.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Exact {
        metric: String,
        value: f64,
    },
    Sampled {
        metric: String,
        trials: usize,
        mean: f64,
        std_error: f64,
        confidence_radius: f64,
    },
}

impl Outcome {
    pub fn exact(metric: impl Into<String>, value: f64) -> Self {
        Outcome::Exact {
            metric: metric.into(),
            value,
        }
    }

    /// Bernoulli rate. The standard error is the Agresti-Coull one, which
    /// stays positive when every trial (or none) succeeds.
    pub fn rate(metric: impl Into<String>, successes: usize, trials: usize) -> Self {
        let mean = successes as f64 / trials as f64;
        let n = trials as f64 + 4.0;
        let adjusted = (successes as f64 + 2.0) / n;
        Outcome::with_error(metric, trials, mean, (adjusted * (1.0 - adjusted) / n).sqrt())
    }

    pub fn with_error(metric: impl Into<String>, trials: usize, mean: f64, std_error: f64) -> Self {
        Outcome::Sampled {
            metric: metric.into(),
            trials,
            mean,
            std_error,
            confidence_radius: RADIUS_Z * std_error,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Outcome::Exact { value, .. } => *value,
            Outcome::Sampled { mean, .. } => *mean,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            Outcome::Exact { .. } => None,
            Outcome::Sampled { confidence_radius, .. } => Some(*confidence_radius),
        }
    }

    pub fn metric(&self) -> &str {
        match self {
            Outcome::Exact { metric, .. } | Outcome::Sampled { metric, .. } => metric,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub label: String,
    pub ledger: CostLedger,
}

/// One flat row per trial; also the CSV layout.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub success: Option<bool>,
    pub value: Option<f64>,
    pub classical_bits: u64,
    pub qubits: u64,
    pub ebits: u64,
    pub public_coin_bits: u64,
    pub nl_boxes: u64,
    pub note: String,
}

impl TrialRow {
    pub fn new(trial: usize, seed: u64) -> Self {
        TrialRow {
            trial,
            seed,
            success: None,
            value: None,
            classical_bits: 0,
            qubits: 0,
            ebits: 0,
            public_coin_bits: 0,
            nl_boxes: 0,
            note: String::new(),
        }
    }

    pub fn with_ledger(mut self, l: &CostLedger) -> Self {
        self.classical_bits = l.classical_bits;
        self.qubits = l.qubits;
        self.ebits = l.ebits;
        self.public_coin_bits = l.public_coin_bits;
        self.nl_boxes = l.nl_boxes;
        self
    }
}

/// Run metadata that legitimately differs between identical runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMeta {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub artifact_version: String,
    pub config: ExperimentConfig,
    pub outcome: Outcome,
    /// Closed-form reference value, when one exists.
    pub reference: Option<f64>,
    pub ledgers: Vec<LedgerEntry>,
    pub checks: Vec<Check>,
    pub details: Value,
    pub trials: Vec<TrialRow>,
    pub meta: RunMeta,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Everything except `meta`, serialized. Two runs of the same config
    /// give identical payloads.
    pub fn payload(&self) -> CliResult<String> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut v {
            map.remove("meta");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Trial rows as CSV, or a single summary row for exact runs.
    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.trials.is_empty() {
            #[derive(Serialize)]
            struct Summary<'a> {
                target: &'a str,
                metric: &'a str,
                value: f64,
                reference: Option<f64>,
                passed: bool,
            }
            w.serialize(Summary {
                target: &self.config.target,
                metric: self.outcome.metric(),
                value: self.outcome.value(),
                reference: self.reference,
                passed: self.passed(),
            })?;
        } else {
            for row in &self.trials {
                w.serialize(row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
