use serde::Serialize;

use super::LhvModel;
use crate::bell::CorrelationTable;
use crate::ccproto::{Channel, Party, ProtocolResult};
use crate::error::{Error, Result};
use crate::field::ceil_log2;
use crate::rng::SeededRng;

/// One-way protocol built from an LHV model in which only Alice's detector is
/// inefficient. The parties share `k` hidden values; Alice announces the first
/// index on which she clicks, or a random index (and a random output) if she
/// clicks on none.
#[derive(Clone, Debug, Serialize)]
pub struct AsymOneWay {
    lhv: LhvModel,
    eta: f64,
    epsilon: f64,
    k: usize,
    bits: usize,
}

/// `k = ⌈ln ε / ln(1 − η)⌉` shared instances, `⌈log₂ k⌉` bits.
pub fn asym_lhv_to_oneway(lhv: &LhvModel, epsilon: f64) -> Result<AsymOneWay> {
    let eta = lhv.efficiency();
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", format!("{eta} is outside (0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", format!("{epsilon} is outside (0, 1)")));
    }
    if (0..lhv.hidden_values()).any(|l| (0..lhv.inputs_b()).any(|y| lhv.bob_response(l, y).is_none())) {
        return Err(Error::param("lhv", "Bob's detector must be perfect"));
    }
    // The ratio is exact for powers such as ln(1/4)/ln(1/2); shave rounding noise.
    let ratio = epsilon.ln() / (1.0 - eta).ln();
    let k = ((ratio - 1e-9).ceil() as usize).max(1);
    Ok(AsymOneWay {
        lhv: lhv.clone(),
        eta,
        epsilon,
        k,
        bits: ceil_log2(k as u64),
    })
}

impl AsymOneWay {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// `ε + (1 − η)^k`.
    pub fn error_bound(&self) -> f64 {
        self.epsilon + (1.0 - self.eta).powi(self.k as i32)
    }

    pub fn run(&self, x: usize, y: usize, rng: &mut SeededRng) -> ProtocolResult<(usize, usize)> {
        let shared: Vec<usize> = (0..self.k).map(|_| self.lhv.sample_hidden(rng)).collect();
        let hit = shared.iter().position(|&l| self.lhv.alice_response(l, x).is_some());
        let (j, a) = match hit {
            Some(j) => (j, self.lhv.alice_response(shared[j], x).expect("clicked")),
            None => (rng.below(self.k), rng.below(self.lhv.outputs().0)),
        };
        let b = self.lhv.bob_response(shared[j], y).expect("Bob's detector is perfect");
        let mut ch = Channel::new();
        if self.bits > 0 {
            ch.send_bits(Party::Alice, format!("index {j}"), self.bits as u64);
        }
        ch.finish((a, b), None, None)
    }

    /// Exact `P(a, b | x, y)` of the protocol, row-major in `(a, b)`.
    pub fn exact_distribution(&self, x: usize, y: usize) -> Vec<f64> {
        let (oa, ob) = self.lhv.outputs();
        let q = self.lhv.alice_click(x);
        let fail = (1.0 - q).powi(self.k as i32);
        let mut p = vec![0.0; oa * ob];
        for l in 0..self.lhv.hidden_values() {
            let w = self.lhv.weights()[l];
            let b = self.lhv.bob_response(l, y).expect("Bob's detector is perfect");
            match self.lhv.alice_response(l, x) {
                Some(a) => p[a * ob + b] += (1.0 - fail) * w / q,
                None => {
                    for a in 0..oa {
                        p[a * ob + b] += fail * w / (1.0 - q) / oa as f64;
                    }
                }
            }
        }
        p
    }

    /// `max_{x,y} Σ_{a,b} |P_protocol − target|` computed exactly.
    pub fn exact_distance(&self, target: &CorrelationTable<f64>) -> f64 {
        let s = target.shape();
        let mut worst: f64 = 0.0;
        for x in 0..s.inputs_a {
            for y in 0..s.inputs_b {
                let p = self.exact_distribution(x, y);
                let d: f64 = (0..s.outputs_a)
                    .flat_map(|a| (0..s.outputs_b).map(move |b| (a, b)))
                    .map(|(a, b)| (p[a * s.outputs_b + b] - target.get(x, y, a, b)).abs())
                    .sum();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Same distance, estimated from `trials` runs spread evenly over the
    /// input pairs.
    pub fn measured_distance(&self, target: &CorrelationTable<f64>, trials: usize, rng: &mut SeededRng) -> f64 {
        let s = target.shape();
        let per = (trials / (s.inputs_a * s.inputs_b)).max(1);
        let mut worst: f64 = 0.0;
        for x in 0..s.inputs_a {
            for y in 0..s.inputs_b {
                let mut counts = vec![0usize; s.outputs_a * s.outputs_b];
                for _ in 0..per {
                    let (a, b) = self.run(x, y, rng).output;
                    counts[a * s.outputs_b + b] += 1;
                }
                let d: f64 = (0..s.outputs_a)
                    .flat_map(|a| (0..s.outputs_b).map(move |b| (a, b)))
                    .map(|(a, b)| (counts[a * s.outputs_b + b] as f64 / per as f64 - target.get(x, y, a, b)).abs())
                    .sum();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Toy LHV for the perfect PR correlations with Alice efficiency
/// `η ≤ 1/2`: with probability `2η` Alice guesses an input `x'` and a bit
/// `a`, clicks only if `x = x'`, and Bob answers `a ⊕ (x' ∧ y)`; otherwise
/// Alice never clicks and Bob answers a uniform bit.
pub fn pr_toy_lhv(eta: f64) -> Result<LhvModel> {
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::param("eta", "the toy model needs 0 < η ≤ 1/2"));
    }
    let mut weights = Vec::new();
    let mut alice = Vec::new();
    let mut bob = Vec::new();
    for guess in 0..2usize {
        for a in 0..2usize {
            weights.push(eta / 2.0);
            alice.push((0..2).map(|x| (x == guess).then_some(a)).collect());
            bob.push((0..2).map(|y| Some(a ^ (guess & y))).collect());
        }
    }
    if eta < 0.5 {
        for b in 0..2usize {
            weights.push((1.0 - 2.0 * eta) / 2.0);
            alice.push(vec![None, None]);
            bob.push(vec![Some(b), Some(b)]);
        }
    }
    LhvModel::new(weights, alice, bob, (2, 2), eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlbox::pr_correlation_table;

    #[test]
    fn closed_form_k() {
        let lhv = pr_toy_lhv(0.5).unwrap();
        let p = asym_lhv_to_oneway(&lhv, 0.25).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.bits(), 1);
        let lhv = pr_toy_lhv(0.3).unwrap();
        assert_eq!(asym_lhv_to_oneway(&lhv, 0.1).unwrap().k(), 7);
    }

    #[test]
    fn toy_model_is_exact_in_the_lhv_metric() {
        let target = pr_correlation_table(1.0).unwrap();
        for eta in [0.1, 0.3, 0.5] {
            let lhv = pr_toy_lhv(eta).unwrap();
            assert!(lhv.efficiency_error(&target).unwrap() < 1e-12);
            for x in 0..2 {
                assert!((lhv.alice_click(x) - eta).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_distance_within_bound() {
        let target = pr_correlation_table(1.0).unwrap();
        for (eta, eps) in [(0.3, 0.1), (0.5, 0.25)] {
            let p = asym_lhv_to_oneway(&pr_toy_lhv(eta).unwrap(), eps).unwrap();
            let d = p.exact_distance(&target);
            assert!(d <= 2.0 * eps, "{d}");
            for x in 0..2 {
                for y in 0..2 {
                    assert!((p.exact_distribution(x, y).iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let lhv = pr_toy_lhv(0.5).unwrap();
        assert!(asym_lhv_to_oneway(&lhv, 0.0).is_err());
        assert!(pr_toy_lhv(0.7).is_err());
    }
}
