//! Experiment runner for the `qnlcc` library: JSON configurations in,
//! JSON (or CSV) reports out.
//!
//! A configuration names a target from [`list_targets`], a mode, a seed and
//! target parameters. [`run`] validates it, evaluates the target and returns
//! a [`Report`]. Reports are deterministic in the configuration apart from
//! the `meta` block.

mod catalog;
mod config;
mod error;
mod report;
mod targets;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub use catalog::{find_target, list_targets, Mode, ParamKind, ParamSpec, Params, TargetInfo};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use report::{Check, LedgerEntry, Outcome, Report, RunMeta, TrialRow, RADIUS_Z};

/// JSON Schema that every report satisfies.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    let start = Instant::now();
    let (info, params) = config.validate()?;
    let ctx = targets::Ctx {
        cfg: config,
        p: &params,
        trials: config.trial_count(&info),
    };
    let draft = targets::dispatch(&ctx)?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    Ok(Report {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        outcome: draft.outcome,
        reference: draft.reference,
        ledgers: draft.ledgers,
        checks: draft.checks,
        details: draft.details,
        trials: if config.record_trials { draft.rows } else { Vec::new() },
        meta: RunMeta {
            timestamp,
            wall_time_ms: start.elapsed().as_millis() as u64,
        },
    })
}
