//! Simultaneous message passing: classical and quantum fingerprints for
//! equality, the SWAP test and the referee.

use num_rational::Ratio;
use serde::Serialize;

use crate::bits::Bits;
use crate::ccproto::{Channel, Party, ProtocolResult};
use crate::error::{Error, Result};
use crate::field::{agreement_count, ceil_log2, modulus_for, poly_eval};
use crate::qstate::{Operator, StateVector, ONE, ZERO};
use crate::rng::SeededRng;

/// Points `(a, p_x(a))` over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalFingerprint {
    pub modulus: u64,
    pub points: Vec<(u64, u64)>,
}

impl ClassicalFingerprint {
    /// `k` independent uniform field points.
    pub fn sample(x: &Bits, k: usize, rng: &mut SeededRng) -> Self {
        let p = modulus_for(x.len());
        let points = (0..k)
            .map(|_| {
                let a = rng.below(p as usize) as u64;
                (a, poly_eval(x, a, p))
            })
            .collect();
        ClassicalFingerprint { modulus: p, points }
    }

    pub fn consistent_with(&self, x: &Bits) -> bool {
        self.modulus == modulus_for(x.len()) && self.points.iter().all(|&(a, v)| poly_eval(x, a, self.modulus) == v)
    }
}

/// `|F_x> = (1/√m) Σ_a |a>|p_x(a)>` on two registers of `ceil(log₂ m)`
/// qubits each.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumFingerprint {
    pub modulus: u64,
    pub width: usize,
    pub state: StateVector,
}

impl QuantumFingerprint {
    pub fn qubits(&self) -> usize {
        2 * self.width
    }
}

pub fn quantum_fingerprint(x: &Bits) -> Result<QuantumFingerprint> {
    if x.is_empty() {
        return Err(Error::param("n", "strings must be non-empty"));
    }
    let m = modulus_for(x.len());
    let width = ceil_log2(m);
    let mut amp = vec![ZERO; 1usize << (2 * width)];
    let c = ONE * (m as f64).sqrt().recip();
    for a in 0..m {
        amp[((a as usize) << width) | poly_eval(x, a, m) as usize] = c;
    }
    Ok(QuantumFingerprint {
        modulus: m,
        width,
        state: StateVector::new(amp)?,
    })
}

/// `<F_x|F_y> = |{a : p_x(a) = p_y(a)}| / m`, exactly.
pub fn fingerprint_overlap(x: &Bits, y: &Bits) -> Result<Ratio<u64>> {
    x.check_len(y)?;
    if x.is_empty() {
        return Err(Error::param("n", "strings must be non-empty"));
    }
    let m = modulus_for(x.len());
    Ok(Ratio::new(agreement_count(x, y, m), m))
}

/// Probability that the SWAP test outputs 1, computed by running the
/// circuit `H – controlled-SWAP – H – measure` on `|0>|φ>|ψ>`.
pub fn swap_test_probability(phi: &StateVector, psi: &StateVector) -> Result<f64> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            actual: psi.dim(),
        });
    }
    let w = phi.qubits();
    let start = StateVector::zero(1)?.tensor(&phi.tensor(psi)?)?;
    let h = Operator::hadamard();
    let mask = (1usize << w) - 1;
    let control = 1usize << (2 * w);
    let swapped = start.apply(&h, &[0])?.permute(|i| {
        if i & control == 0 {
            i
        } else {
            let (a, b) = ((i >> w) & mask, i & mask);
            control | (b << w) | a
        }
    })?;
    let fin = swapped.apply(&h, &[0])?;
    // Qubit 0 is the most significant bit, so outcome 1 is the upper half.
    Ok(fin.amplitudes()[control..].iter().map(|a| a.norm_sqr()).sum())
}

/// SWAP test between two fixed states; the circuit runs once and each call to
/// [`SwapTest::sample`] draws a fresh outcome.
#[derive(Clone, Debug)]
pub struct SwapTest {
    p_one: f64,
}

impl SwapTest {
    pub fn new(phi: &StateVector, psi: &StateVector) -> Result<Self> {
        Ok(SwapTest {
            p_one: swap_test_probability(phi, psi)?,
        })
    }

    pub fn p_one(&self) -> f64 {
        self.p_one
    }

    pub fn sample(&self, rng: &mut SeededRng) -> u8 {
        u8::from(rng.bernoulli(self.p_one))
    }
}

/// One SWAP test on the given states.
pub fn swap_test(phi: &StateVector, psi: &StateVector, rng: &mut SeededRng) -> Result<u8> {
    Ok(SwapTest::new(phi, psi)?.sample(rng))
}

/// Referee for the quantum SMP equality protocol on a fixed input pair.
#[derive(Clone, Debug)]
pub struct QuantumEqualityReferee {
    equal: bool,
    fingerprint_qubits: usize,
    test: SwapTest,
}

impl QuantumEqualityReferee {
    pub fn new(x: &Bits, y: &Bits) -> Result<Self> {
        x.check_len(y)?;
        let fx = quantum_fingerprint(x)?;
        let fy = quantum_fingerprint(y)?;
        Ok(QuantumEqualityReferee {
            equal: x == y,
            fingerprint_qubits: fx.qubits(),
            test: SwapTest::new(&fx.state, &fy.state)?,
        })
    }

    /// Probability that all `reps` tests output 0, i.e. "equal" is declared.
    pub fn accept_probability(&self, reps: usize) -> f64 {
        (1.0 - self.test.p_one()).powi(reps as i32)
    }

    pub fn swap_test(&self) -> &SwapTest {
        &self.test
    }

    /// Alice and Bob each send `reps` fingerprints; the referee declares
    /// "equal" iff every SWAP test outputs 0.
    pub fn run(&self, reps: usize, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
        if reps == 0 {
            return Err(Error::param("reps", "at least one repetition is needed"));
        }
        let mut ch = Channel::new();
        let size = (reps * self.fingerprint_qubits) as u64;
        ch.send_qubits(Party::Alice, format!("{reps} copies of |F_x>"), size);
        ch.send_qubits(Party::Bob, format!("{reps} copies of |F_y>"), size);
        let mut accept = true;
        for _ in 0..reps {
            if self.test.sample(rng) == 1 {
                accept = false;
            }
        }
        let p_acc = self.accept_probability(reps);
        let exact = if self.equal { p_acc } else { 1.0 - p_acc };
        Ok(ch.finish(accept, Some(accept == self.equal), Some(exact)))
    }
}

pub fn smp_quantum_eq(x: &Bits, y: &Bits, reps: usize, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
    QuantumEqualityReferee::new(x, y)?.run(reps, rng)
}

/// Default list length `ceil(2√n)` for the classical SMP protocol.
pub fn default_list_length(n: usize) -> usize {
    (2.0 * (n as f64).sqrt()).ceil() as usize
}

/// Probability that two independent lists of `k` uniform points of `F_p`
/// share a point. The number of distinct values in a list is counted by
/// inclusion–exclusion over surjections.
pub fn common_point_probability(p: u64, k: usize) -> f64 {
    let pf = p as f64;
    let mut miss = 0.0;
    for j in 1..=(k.min(p as usize)) {
        // Surjections from k draws onto a fixed j-set.
        let mut onto = 0.0;
        for i in 0..=j {
            let term = binom(j, i) * ((j - i) as f64 / pf).powi(k as i32);
            onto += if i % 2 == 0 { term } else { -term };
        }
        let p_j = binom(p as usize, j) * onto;
        miss += p_j * (1.0 - j as f64 / pf).powi(k as i32);
    }
    1.0 - miss
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k.min(n - k)).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// Both parties send `k` random points with their polynomial values. If the
/// lists share a point `d` (the first such point in Alice's list), the
/// referee outputs `[p_x(d) = p_y(d)]`; otherwise 0.
pub fn smp_classical_eq(x: &Bits, y: &Bits, k: usize, rng: &mut SeededRng) -> Result<ProtocolResult<bool>> {
    x.check_len(y)?;
    if k == 0 {
        return Err(Error::param("k", "at least one point is needed"));
    }
    if x.is_empty() {
        return Err(Error::param("n", "strings must be non-empty"));
    }
    let fa = ClassicalFingerprint::sample(x, k, rng);
    let fb = ClassicalFingerprint::sample(y, k, rng);
    let width = 2 * k as u64 * ceil_log2(fa.modulus) as u64;
    let mut ch = Channel::new();
    ch.send_bits(Party::Alice, format!("{} points of p_x", k), width);
    ch.send_bits(Party::Bob, format!("{} points of p_y", k), width);
    let common = fa
        .points
        .iter()
        .find_map(|&(a, va)| fb.points.iter().find(|&&(b, _)| b == a).map(|&(_, vb)| va == vb));
    let out = common.unwrap_or(false);
    let equal = x == y;
    let exact = equal.then(|| common_point_probability(fa.modulus, k));
    Ok(ch.finish(out, Some(out == equal), exact))
}
