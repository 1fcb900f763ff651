use serde::Serialize;

use super::{log2_exact, Channel, CostLedger, Party, ProtocolResult};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::qstate::{Operator, StateVector};
use crate::rng::SeededRng;

/// `x = y`, or `x` and `y` differ in exactly half of the positions.
pub fn dj_promise_holds(x: &Bits, y: &Bits) -> Result<bool> {
    let d = x.hamming(y)?;
    Ok(d == 0 || 2 * d == x.len())
}

fn check_promise(x: &Bits, y: &Bits) -> Result<usize> {
    x.check_len(y)?;
    let m = log2_exact(x.len(), "n")?;
    if !dj_promise_holds(x, y)? {
        return Err(Error::PromiseViolated(format!(
            "{x} and {y} are neither equal nor at distance n/2"
        )));
    }
    Ok(m)
}

fn phase_state(m: usize, x: &Bits) -> Result<StateVector> {
    Ok(StateVector::uniform(m)?.apply_sign(|i| x.get(i)))
}

/// Alice sends `(1/√n) Σ (−1)^{x_i} |i>` on `log n` qubits; Bob applies
/// `(−1)^{y_i}`, Hadamards every qubit and outputs 1 iff he sees `|0…0>`.
/// Evaluated exactly: the output is the more likely answer, and
/// `exact_success` is the probability of the correct one.
pub fn dj_quantum(x: &Bits, y: &Bits) -> Result<ProtocolResult<bool>> {
    let m = check_promise(x, y)?;
    let mut ch = Channel::new();
    let sent = phase_state(m, x)?;
    ch.send_qubits(Party::Alice, "(1/sqrt n) sum (-1)^{x_i} |i>", m as u64);
    let received = sent.apply_sign(|i| y.get(i)).apply_all(&Operator::hadamard_n(m))?;
    let p_one = received.probability(0);
    let out = p_one > 0.5;
    let equal = x == y;
    let exact = if equal { p_one } else { 1.0 - p_one };
    Ok(ch.finish(out, Some(out == equal), Some(exact)))
}

#[derive(Clone, Debug, Serialize)]
pub struct NonlocalDjRun {
    /// `probabilities[a][b]` for Alice's outcome `a` and Bob's `b`.
    pub probabilities: Vec<Vec<f64>>,
    /// One sampled pair of outcomes.
    pub sample: (usize, usize),
    pub ledger: CostLedger,
}

impl NonlocalDjRun {
    /// `P(a = b)`.
    pub fn agree_probability(&self) -> f64 {
        (0..self.probabilities.len()).map(|a| self.probabilities[a][a]).sum()
    }
}

/// Shared `(1/√n) Σ |i>|i>`; each party applies its phase `(−1)^{x_i}` or
/// `(−1)^{y_i}`, Hadamards its register and measures. Returns the exact joint
/// outcome distribution and one sample; no communication is used.
pub fn dj_nonlocal(x: &Bits, y: &Bits, rng: &mut SeededRng) -> Result<NonlocalDjRun> {
    let m = check_promise(x, y)?;
    let n = 1usize << m;
    let mut ch = Channel::new();
    ch.share_ebits(m as u64);
    let mut amp = vec![0.0; n * n];
    for i in 0..n {
        amp[i * n + i] = (n as f64).sqrt().recip();
    }
    let shared = StateVector::from_real(&amp)?;
    let phased = shared.apply_sign(|idx| x.get(idx / n) ^ y.get(idx % n));
    let all: Vec<usize> = (0..2 * m).collect();
    let fin = phased.apply_each(&Operator::hadamard(), &all)?;
    let probabilities: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| fin.probability(a * n + b)).collect()).collect();
    let k = rng.weighted_index(&fin.probabilities());
    let sample = (k / n, k % n);
    Ok(NonlocalDjRun {
        probabilities,
        sample,
        ledger: ch.ledger().clone(),
    })
}
