use std::f64::consts::PI;

use super::{log2_exact, Channel, Party, ProtocolResult};
use crate::bits::Bits;
use crate::error::Result;
use crate::qstate::{Operator, StateVector};
use crate::rng::SeededRng;

/// Iteration counts tried in order: `⌈(π/4)√(n/2^j)⌉` for `j = 0..=log n`,
/// cycled, at most `3·log₂ n` attempts in total.
pub fn grover_schedule(n: usize) -> Result<Vec<usize>> {
    let m = log2_exact(n, "n")?;
    let sweep: Vec<usize> = (0..=m)
        .map(|j| (PI / 4.0 * ((n >> j) as f64).sqrt()).ceil() as usize)
        .collect();
    Ok((0..3 * m).map(|a| sweep[a % sweep.len()]).collect())
}

/// Distributed Grover search for an index with `x_i = y_i = 1`.
///
/// Alice runs the search on `log n` qubits. Each oracle call `O_z` is two
/// messages of `log n + 1` qubits: Alice attaches `x_i`, Bob applies
/// `(−1)^{x_i ∧ y_i}` and returns the state. Every measured candidate is
/// checked classically (Alice sends `i` and `x_i`, Bob answers `y_i`), so a
/// returned index is always a true intersection.
pub fn intersection_grover(x: &Bits, y: &Bits, rng: &mut SeededRng) -> Result<ProtocolResult<Option<usize>>> {
    x.check_len(y)?;
    let n = x.len();
    let m = log2_exact(n, "n")?;
    let z = x.and(y)?;
    let diffusion = {
        let h = Operator::hadamard_n(m);
        let mut o0 = Operator::identity(n);
        o0.set(0, 0, -crate::qstate::ONE);
        &(&h * &o0) * &h
    };
    let evolve = |r: usize| -> Result<StateVector> {
        let mut state = StateVector::uniform(m)?;
        for _ in 0..r {
            state = state.apply_sign(|i| z.get(i)).apply_all(&diffusion)?;
        }
        Ok(state)
    };
    let schedule = grover_schedule(n)?;
    // Probability that every attempt of the full schedule misses.
    let states = schedule.iter().map(|&r| evolve(r)).collect::<Result<Vec<_>>>()?;
    let mut fail_all = 1.0;
    for state in &states {
        let p_hit: f64 = (0..n).filter(|&i| z.get(i)).map(|i| state.probability(i)).sum();
        fail_all *= 1.0 - p_hit.min(1.0);
    }
    let mut ch = Channel::new();
    let mut found = None;
    for (&r, state) in schedule.iter().zip(&states) {
        for _ in 0..r {
            ch.send_qubits(Party::Alice, "sum a_i |i>|x_i>", m as u64 + 1);
            ch.send_qubits(Party::Bob, "sum (-1)^{x_i y_i} a_i |i>|x_i>", m as u64 + 1);
        }
        let cand = rng.weighted_index(&state.probabilities());
        ch.send_bits(Party::Alice, format!("candidate i = {}, x_i = {}", cand + 1, u8::from(x.get(cand))), m as u64 + 1);
        ch.send_bits(Party::Bob, format!("y_i = {}", u8::from(y.get(cand))), 1);
        if x.get(cand) && y.get(cand) {
            found = Some(cand);
            break;
        }
    }
    let intersecting = z.weight() > 0;
    let correct = found.is_some() == intersecting;
    let exact = if intersecting { 1.0 - fail_all } else { 1.0 };
    Ok(ch.finish(found, Some(correct), Some(exact)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_shape() {
        assert_eq!(grover_schedule(16).unwrap(), vec![4, 3, 2, 2, 1, 4, 3, 2, 2, 1, 4, 3]);
        assert_eq!(grover_schedule(2).unwrap().len(), 3);
    }

    #[test]
    fn no_intersection_gives_none() {
        let x: Bits = "1010101010101010".parse().unwrap();
        let y: Bits = "0101010101010101".parse().unwrap();
        for seed in 0..20 {
            let r = intersection_grover(&x, &y, &mut SeededRng::new(seed)).unwrap();
            assert_eq!(r.output, None);
            assert_eq!(r.correct, Some(true));
        }
    }

    #[test]
    fn all_ones_always_found() {
        let x: Bits = "1111".parse().unwrap();
        for seed in 0..20 {
            let r = intersection_grover(&x, &x, &mut SeededRng::new(seed)).unwrap();
            assert!(r.output.is_some());
            assert!((r.exact_success.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_cost_per_call() {
        let mut x = Bits::zeros(16);
        x.set(6, true);
        let r = intersection_grover(&x, &x, &mut SeededRng::new(3)).unwrap();
        let calls = r
            .transcript
            .messages
            .iter()
            .filter(|m| m.kind == super::super::MessageKind::Qubit)
            .count() as u64
            / 2;
        assert_eq!(r.ledger.qubits, calls * 2 * 5);
    }
}
