use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::qstate::{Operator, StateVector};

#[derive(Clone, Debug, Serialize)]
pub struct IpTransfer {
    pub recovered: Bits,
    /// Probability that Bob's measurement yields `recovered`.
    pub probability: f64,
}

/// Starting from `|x> ⊗ (uniform superposition)`, applies
/// `|x>|y> ↦ (−1)^{x·y}|x>|y>` and Hadamards Bob's register; Bob then holds
/// `|x>` exactly.
pub fn ip_transfer_demo(x: &Bits) -> Result<IpTransfer> {
    let n = x.len();
    if n == 0 || n > 10 {
        return Err(Error::param("n", format!("{n} must be between 1 and 10")));
    }
    let alice = StateVector::basis(n, x.to_index())?;
    let joint = alice.tensor(&StateVector::uniform(n)?)?;
    let mask = (1usize << n) - 1;
    let phased = joint.apply_sign(|idx| ((idx >> n) & idx & mask).count_ones() % 2 == 1);
    let bob: Vec<usize> = (n..2 * n).collect();
    let fin = phased.apply_each(&Operator::hadamard(), &bob)?;
    let mut marginal = vec![0.0; 1 << n];
    for (idx, p) in fin.probabilities().into_iter().enumerate() {
        marginal[idx & mask] += p;
    }
    let (best, &probability) = marginal
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    Ok(IpTransfer {
        recovered: Bits::from_index(best, n),
        probability,
    })
}
