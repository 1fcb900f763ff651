//! One runner per catalog target. Every runner returns a [`Draft`]; trials
//! fan out over the worker pool with per-trial derived seeds and are
//! reassembled in trial order.

mod boxes;
mod detection;
mod games;
mod lower_bounds;
mod protocols;

use qnlcc::ccproto::CostLedger;
use qnlcc::par::map_indexed;
use qnlcc::rng::derive_seed;
use qnlcc::{Bits, Execution, SeededRng};
use serde_json::Value;

use crate::catalog::{Mode, Params};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::report::{Check, LedgerEntry, Outcome, TrialRow};

/// Stream id for per-trial generators; setup randomness uses other ids.
const TRIAL_STREAM: u64 = 1;
const SETUP_STREAM: u64 = 2;

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub p: &'a Params,
    pub trials: usize,
}

impl Ctx<'_> {
    pub fn mode(&self) -> Mode {
        self.cfg.mode
    }

    pub fn setup_rng(&self) -> SeededRng {
        SeededRng::derive(self.cfg.seed, SETUP_STREAM, 0)
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.cfg.seed, TRIAL_STREAM, trial as u64)
    }

    /// Runs `f` for trials `0..count`, each with its own derived generator.
    pub fn fan_out<T, F>(&self, count: usize, f: F) -> CliResult<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut SeededRng) -> CliResult<T> + Sync + Send,
    {
        map_indexed(Execution::Parallel, count, |i| f(i, &mut SeededRng::new(self.trial_seed(i))))
            .into_iter()
            .collect()
    }
}

pub(crate) struct Draft {
    pub outcome: Outcome,
    pub reference: Option<f64>,
    pub ledgers: Vec<LedgerEntry>,
    pub checks: Vec<Check>,
    pub details: Value,
    pub rows: Vec<TrialRow>,
}

impl Draft {
    pub fn new(outcome: Outcome) -> Self {
        Draft {
            outcome,
            reference: None,
            ledgers: Vec::new(),
            checks: Vec::new(),
            details: Value::Null,
            rows: Vec::new(),
        }
    }

    pub fn reference(mut self, v: f64) -> Self {
        self.reference = Some(v);
        self
    }

    pub fn ledger(mut self, label: impl Into<String>, l: &CostLedger) -> Self {
        self.ledgers.push(LedgerEntry {
            label: label.into(),
            ledger: l.clone(),
        });
        self
    }

    pub fn check(mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
        self
    }

    /// `|value − reference| <= tol`.
    pub fn check_close(self, name: &str, value: f64, reference: f64, tol: f64) -> Self {
        let pass = (value - reference).abs() <= tol;
        self.check(name, pass, format!("{value} vs {reference} (tol {tol:e})"))
    }

    /// Sampled outcome within its confidence radius of the reference.
    pub fn check_agreement(self, reference: f64) -> Self {
        let (value, radius) = (self.outcome.value(), self.outcome.radius().unwrap_or(0.0));
        let pass = (value - reference).abs() <= radius.max(1e-12);
        self.check(
            "sampled value within confidence radius of the exact value",
            pass,
            format!("{value} vs {reference} (radius {radius:e})"),
        )
    }

    pub fn details(mut self, v: Value) -> Self {
        self.details = v;
        self
    }

    pub fn rows(mut self, rows: Vec<TrialRow>) -> Self {
        self.rows = rows;
        self
    }
}

pub(crate) fn dispatch(ctx: &Ctx) -> CliResult<Draft> {
    match ctx.cfg.target.as_str() {
        "ghz" | "chsh" | "magic-square" => games::game(ctx),
        "tsirelson" => games::tsirelson(ctx),
        "xor-chsh" => games::xor_chsh(ctx),
        "dj" => protocols::dj(ctx),
        "dj-nonlocal" => protocols::dj_nonlocal(ctx),
        "hm" => protocols::hm(ctx),
        "hm-nonlocal" => protocols::hm_nonlocal(ctx),
        "intersection" => protocols::intersection(ctx),
        "raz" => protocols::raz(ctx),
        "eq-deterministic" | "eq-public-coin" | "eq-private-coin" | "smp-quantum" | "smp-classical" => {
            protocols::equality(ctx)
        }
        "swap-test" => protocols::swap_test(ctx),
        "ip-transfer" => protocols::ip_transfer(ctx),
        "vandam" => boxes::vandam(ctx),
        "pr-table" => boxes::pr_table(ctx),
        "detect-threshold" => detection::threshold(ctx),
        "detect-protocol" => detection::protocol(ctx),
        "detect-asym" => detection::asym(ctx),
        "lb-rank" => lower_bounds::rank(ctx),
        "lb-discrepancy" => lower_bounds::discrepancy(ctx),
        "lb-lindsey" => lower_bounds::lindsey(ctx),
        "lb-nayak" => lower_bounds::nayak(ctx),
        other => Err(CliError::UnknownTarget(other.to_string())),
    }
}

/// A power of two `>= 2` read from `params.<name>`.
pub(crate) fn pow2_param(p: &Params, name: &str, max: usize) -> CliResult<usize> {
    let n = p.usize(name)?;
    p.ensure(n >= 2 && n.is_power_of_two() && n <= max, name, format!("must be a power of two in [2, {max}]"))?;
    Ok(n)
}

pub(crate) fn parse_bits(p: &Params, name: &str, n: usize) -> CliResult<Option<Bits>> {
    match p.opt_str(name) {
        None => Ok(None),
        Some(s) => {
            let b: Bits = s.parse().map_err(|e: qnlcc::Error| CliError::invalid(format!("params.{name}"), e.to_string()))?;
            p.ensure(b.len() == n, name, format!("expected {n} bits"))?;
            Ok(Some(b))
        }
    }
}
