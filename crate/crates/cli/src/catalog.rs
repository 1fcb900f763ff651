use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form or exhaustive evaluation.
    #[default]
    Exact,
    /// Monte Carlo over seeded trials.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Int,
    Float,
    Str,
    Bool,
    /// Free-form JSON (circuits, explicit instances) or a fixture name.
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: Value,
    pub help: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub modes: Vec<Mode>,
    pub params: Vec<ParamSpec>,
    /// Trials used in sampled mode when the config gives none.
    pub default_trials: usize,
}

fn p(name: &'static str, kind: ParamKind, default: Value, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        default,
        help,
    }
}

fn target(
    name: &'static str,
    summary: &'static str,
    modes: &[Mode],
    default_trials: usize,
    params: Vec<ParamSpec>,
) -> TargetInfo {
    TargetInfo {
        name,
        summary,
        modes: modes.to_vec(),
        params,
        default_trials,
    }
}

use Mode::{Exact, Sampled};
use ParamKind::{Bool, Float, Int, Json, Str};

/// Every runnable target with its parameter schema.
pub fn list_targets() -> Vec<TargetInfo> {
    let both = &[Exact, Sampled];
    let exact = &[Exact];
    let sampled = &[Sampled];
    let n = |d: u64| p("n", Int, json!(d), "input length in bits");
    let equal = p("equal", Bool, json!(false), "give both parties the same string");
    vec![
        target("ghz", "three-party GHZ game: quantum value and classical optimum", both, 10_000, vec![]),
        target("chsh", "CHSH game: rotation strategy and classical optimum", both, 10_000, vec![]),
        target("magic-square", "magic square game: two-singlet strategy and classical optimum", both, 10_000, vec![]),
        target("tsirelson", "largest eigenvalue of the CHSH operator on random ±1 observables", exact, 0, vec![
            p("draws", Int, json!(200), "random observable quadruples"),
        ]),
        target("xor-chsh", "CHSH as an XOR game: local, no-signalling and seesaw quantum values", exact, 0, vec![]),
        target("dj", "distributed Deutsch-Jozsa on the promise pairs", exact, 0, vec![
            n(4),
            p("samples", Int, json!(1000), "sampled promise pairs when n > 8"),
        ]),
        target("dj-nonlocal", "entanglement-only Deutsch-Jozsa: support of the joint outputs", exact, 0, vec![n(4)]),
        target("hm", "hidden matching, quantum or classical one-way", both, 2_000, vec![
            n(8),
            p("variant", Str, json!("quantum"), "quantum | classical"),
            p("matching", Str, json!("random"), "adjacent | halves | random"),
            p("sample_size", Int, Value::Null, "positions Alice reveals (classical); default ceil(2 sqrt n)"),
        ]),
        target("hm-nonlocal", "entanglement-only hidden matching: parity constraint and k marginal", exact, 0, vec![
            n(8),
            p("instances", Int, json!(8), "random (x, matching) pairs"),
        ]),
        target("intersection", "Grover search for a common 1 with classical verification", sampled, 500, vec![n(16)]),
        target("raz", "Raz's vector-in-subspace problem", sampled, 2_000, vec![
            p("m", Int, json!(8), "vector dimension, a power of two"),
            p("overlap", Float, json!(0.9), "target overlap in [2/3, 1]"),
        ]),
        target("eq-deterministic", "equality: Bob sends his input", sampled, 1_000, vec![n(16), equal.clone()]),
        target("eq-public-coin", "equality: random parities from shared coins", sampled, 10_000, vec![
            n(16),
            p("k", Int, json!(3), "rounds"),
            equal.clone(),
        ]),
        target("eq-private-coin", "equality: one polynomial evaluation over F_p", sampled, 10_000, vec![n(16), equal.clone()]),
        target("smp-quantum", "simultaneous-message equality with quantum fingerprints", sampled, 2_000, vec![
            n(4),
            p("reps", Int, json!(3), "fingerprint copies per party"),
            equal.clone(),
        ]),
        target("smp-classical", "simultaneous-message equality with random evaluation points", sampled, 2_000, vec![
            n(16),
            p("k", Int, Value::Null, "points per party; default ceil(2 sqrt n)"),
            equal,
        ]),
        target("swap-test", "SWAP test on two fingerprints", both, 10_000, vec![
            n(4),
            p("x", Str, Value::Null, "Alice's string; random when absent"),
            p("y", Str, Value::Null, "Bob's string; random when absent"),
        ]),
        target("vandam", "circuit evaluation with PR boxes and one bit", both, 10_000, vec![
            p("circuit", Json, json!("single-and"), "single-and | inner-product:<n> | random:<n>:<ands>:<nots> | circuit JSON"),
            p("p", Float, json!(1.0), "box quality in [1/2, 1]"),
        ]),
        target("pr-table", "PR box table: no-signalling and CHSH value", both, 10_000, vec![
            p("p", Json, json!("1"), "box quality, a decimal or a fraction such as \"17/20\""),
        ]),
        target("ip-transfer", "inner-product phase kickback transfers x to Bob", exact, 0, vec![n(4)]),
        target("detect-threshold", "critical detector efficiency of the quantum CHSH table", exact, 0, vec![
            p("tol", Float, json!(1e-3), "bisection bracket width"),
        ]),
        target("detect-protocol", "hidden-variable model from a deterministic protocol", exact, 0, vec![
            n(2),
            p("function", Str, json!("eq"), "eq | ip | disj: Bob's output after Alice sends x"),
        ]),
        target("detect-asym", "one-way protocol from an LHV model with one inefficient detector", sampled, 100_000, vec![
            p("eta", Float, json!(0.5), "Alice's efficiency in (0, 1/2]"),
            p("epsilon", Float, json!(0.25), "target error"),
        ]),
        target("lb-rank", "rank of a communication matrix", exact, 0, vec![
            n(4),
            p("function", Str, json!("eq"), "eq | ip | disj | ones"),
        ]),
        target("lb-discrepancy", "discrepancy under the uniform distribution", exact, 0, vec![
            n(2),
            p("function", Str, json!("ip"), "eq | ip | disj | ones"),
            p("search", Str, json!("exact"), "exact | enumerate | sampled"),
            p("samples", Int, json!(200), "random starts for the sampled search"),
        ]),
        target("lb-lindsey", "Lindsey's lemma on random rectangles", exact, 0, vec![
            n(8),
            p("rectangles", Int, json!(10_000), "random rectangles"),
        ]),
        target("lb-nayak", "average recovery probability against d / 2^n", exact, 0, vec![
            n(2),
            p("d", Int, json!(2), "Hilbert-space dimension"),
            p("draws", Int, json!(100), "random encoding and decoder draws"),
        ]),
    ]
}

pub fn find_target(name: &str) -> CliResult<TargetInfo> {
    list_targets()
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| CliError::UnknownTarget(name.to_string()))
}

fn kind_matches(kind: ParamKind, v: &Value) -> bool {
    match kind {
        Int => v.as_u64().is_some(),
        Float => v.is_number(),
        Str => v.is_string(),
        Bool => v.is_boolean(),
        Json => true,
    }
}

/// Parameters after defaults are filled in and kinds are checked.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    values: BTreeMap<String, Value>,
}

impl Params {
    pub fn resolve(info: &TargetInfo, given: &BTreeMap<String, Value>) -> CliResult<Self> {
        if let Some(k) = given.keys().find(|k| !info.params.iter().any(|s| s.name == k.as_str())) {
            return Err(CliError::invalid(
                format!("params.{k}"),
                format!("`{}` takes no such parameter", info.name),
            ));
        }
        let mut values = BTreeMap::new();
        for spec in &info.params {
            let v = given.get(spec.name).cloned().unwrap_or_else(|| spec.default.clone());
            if !v.is_null() && !kind_matches(spec.kind, &v) {
                return Err(CliError::invalid(format!("params.{}", spec.name), format!("expected {:?}, got {v}", spec.kind)));
            }
            values.insert(spec.name.to_string(), v);
        }
        Ok(Params { values })
    }

    fn get(&self, name: &str) -> &Value {
        self.values.get(name).unwrap_or(&Value::Null)
    }

    pub fn is_set(&self, name: &str) -> bool {
        !self.get(name).is_null()
    }

    pub fn usize(&self, name: &str) -> CliResult<usize> {
        self.get(name)
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| CliError::invalid(format!("params.{name}"), "expected a non-negative integer"))
    }

    pub fn opt_usize(&self, name: &str) -> CliResult<Option<usize>> {
        if self.is_set(name) {
            self.usize(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn f64(&self, name: &str) -> CliResult<f64> {
        self.get(name)
            .as_f64()
            .ok_or_else(|| CliError::invalid(format!("params.{name}"), "expected a number"))
    }

    pub fn str(&self, name: &str) -> CliResult<&str> {
        self.get(name)
            .as_str()
            .ok_or_else(|| CliError::invalid(format!("params.{name}"), "expected a string"))
    }

    pub fn opt_str(&self, name: &str) -> Option<&str> {
        self.get(name).as_str()
    }

    pub fn bool(&self, name: &str) -> CliResult<bool> {
        self.get(name)
            .as_bool()
            .ok_or_else(|| CliError::invalid(format!("params.{name}"), "expected true or false"))
    }

    pub fn json(&self, name: &str) -> &Value {
        self.get(name)
    }

    /// Fails with the field name when `ok` is false.
    pub fn ensure(&self, ok: bool, name: &str, reason: impl Into<String>) -> CliResult<()> {
        if ok {
            Ok(())
        } else {
            Err(CliError::invalid(format!("params.{name}"), reason))
        }
    }
}
