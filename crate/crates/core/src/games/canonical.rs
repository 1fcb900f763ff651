use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use super::{DeterministicStrategy, GameSpec, QuantumStrategy};
use crate::error::Result;
use crate::qstate::{max_eigenvalue, Operator, ProjectiveMeasurement, StateVector};
use crate::CONTRACT_TOL;

/// Rotation angles applied on input 0 and input 1 in the CHSH strategy.
pub const CHSH_ANGLES: [f64; 2] = [-PI / 16.0, 3.0 * PI / 16.0];

fn bit_measurements(ops: &[Operator]) -> Vec<Vec<ProjectiveMeasurement>> {
    ops.iter()
        .map(|u| vec![ProjectiveMeasurement::after_unitary(u).expect("unitary gate")])
        .collect()
}

/// Three players get `s, t, u` with `s ⊕ t ⊕ u = 0` and must answer with
/// `a ⊕ b ⊕ c = s ∨ t ∨ u`.
pub fn ghz_game() -> GameSpec {
    GameSpec::uniform_on_promise(
        "ghz",
        vec![2, 2, 2],
        vec![2, 2, 2],
        Arc::new(|x: &[usize]| x[0] ^ x[1] ^ x[2] == 0),
        Arc::new(|x: &[usize], o: &[usize]| (o[0] ^ o[1] ^ o[2]) == (x[0] | x[1] | x[2])),
    )
    .expect("valid game")
}

/// Shared `½|000> − ½|011> − ½|101> − ½|110>`; input 0 measures in the
/// computational basis, input 1 in the Hadamard basis.
pub fn ghz_quantum() -> QuantumStrategy {
    let mut amp = [0.0; 8];
    amp[0] = 0.5;
    amp[3] = -0.5;
    amp[5] = -0.5;
    amp[6] = -0.5;
    let state = StateVector::from_real(&amp).expect("normalized");
    let per_party = bit_measurements(&[Operator::identity(2), Operator::hadamard()]);
    QuantumStrategy::new(
        state,
        vec![vec![0], vec![1], vec![2]],
        vec![per_party.clone(), per_party.clone(), per_party],
        "ghz: computational basis on 0, Hadamard basis on 1",
    )
    .expect("valid strategy")
}

/// Win iff `a ⊕ b = s ∧ t`, inputs uniform.
pub fn chsh_game() -> GameSpec {
    GameSpec::uniform_on_promise(
        "chsh",
        vec![2, 2],
        vec![2, 2],
        Arc::new(|_: &[usize]| true),
        Arc::new(|x: &[usize], o: &[usize]| (o[0] ^ o[1]) == (x[0] & x[1])),
    )
    .expect("valid game")
}

/// Shared `(|00> − |11>)/√2`; each party rotates by `CHSH_ANGLES[input]`
/// and measures, reading `|0>` as output 0.
pub fn chsh_quantum() -> QuantumStrategy {
    let state = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).expect("normalized");
    let per_party = bit_measurements(&CHSH_ANGLES.map(Operator::rotation));
    QuantumStrategy::new(
        state,
        vec![vec![0], vec![1]],
        vec![per_party.clone(), per_party],
        "chsh: rotations by -pi/16 and 3pi/16",
    )
    .expect("valid strategy")
}

fn parity(v: usize) -> usize {
    (v.count_ones() % 2) as usize
}

/// Bit `k` (0-based, leftmost first) of a 3-bit answer.
fn answer_bit(v: usize, k: usize) -> usize {
    (v >> (2 - k)) & 1
}

/// Alice gets a row `s`, Bob a column `t`. Answers are 3-bit strings
/// encoded as `4·a₁ + 2·a₂ + a₃`; Alice's must have even parity, Bob's odd,
/// and `a_t = b_s`.
pub fn magic_square_game() -> GameSpec {
    GameSpec::uniform_on_promise(
        "magic-square",
        vec![3, 3],
        vec![8, 8],
        Arc::new(|_: &[usize]| true),
        Arc::new(|x: &[usize], o: &[usize]| {
            parity(o[0]) == 0 && parity(o[1]) == 1 && answer_bit(o[0], x[1]) == answer_bit(o[1], x[0])
        }),
    )
    .expect("valid game")
}

/// The 3×3 table of two-qubit Pauli observables. Rows multiply to `+I`,
/// columns to `−I`.
pub fn pauli_table() -> [[Operator; 3]; 3] {
    let (x, y, z) = (Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z());
    [
        [x.tensor(&x), y.tensor(&z), z.tensor(&y)],
        [y.tensor(&y), z.tensor(&x), x.tensor(&z)],
        [z.tensor(&z), x.tensor(&y), y.tensor(&x)],
    ]
}

/// Two singlets shared as (A₁,B₁) and (A₂,B₂); Alice measures the
/// observables of her row in order, Bob those of his column. Outcome `+1`
/// is bit 0, `−1` is bit 1.
pub fn magic_square_quantum() -> QuantumStrategy {
    let singlet = StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("normalized");
    // singlet ⊗ singlet is ordered (A1, B1, A2, B2); reorder to (A1, A2, B1, B2).
    let pairs = singlet.tensor(&singlet).expect("4 qubits");
    let state = pairs
        .permute(|i| {
            let (a1, b1, a2, b2) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
            (a1 << 3) | (a2 << 2) | (b1 << 1) | b2
        })
        .expect("bijection");
    let table = pauli_table();
    let obs = |o: &Operator| ProjectiveMeasurement::from_observable(o).expect("±1 observable");
    let alice = (0..3).map(|s| (0..3).map(|c| obs(&table[s][c])).collect()).collect();
    let bob = (0..3).map(|t| (0..3).map(|r| obs(&table[r][t])).collect()).collect();
    QuantumStrategy::new(
        state,
        vec![vec![0, 1], vec![2, 3]],
        vec![alice, bob],
        "magic square: two singlets, Pauli row/column measurements",
    )
    .expect("valid strategy")
}

/// Alice answers with the rows of
/// `[[0,0,0],[0,0,0],[1,1,0]]`, Bob with the columns of
/// `[[0,0,0],[0,0,0],[1,1,1]]`. Loses only on `s = t = 3`.
pub fn magic_square_classical_example() -> DeterministicStrategy {
    DeterministicStrategy::new(vec![vec![0b000, 0b000, 0b110], vec![0b001, 0b001, 0b001]])
}

/// `M = ¼(A₀⊗B₀ + A₀⊗B₁ + A₁⊗B₀ − A₁⊗B₁)`.
pub fn tsirelson_operator(a0: &Operator, a1: &Operator, b0: &Operator, b1: &Operator) -> Result<Operator> {
    for o in [a0, a1, b0, b1] {
        o.check_plus_minus_one(CONTRACT_TOL)?;
    }
    let sum = &(&(&a0.tensor(b0) + &a0.tensor(b1)) + &a1.tensor(b0)) - &a1.tensor(b1);
    Ok(sum.scale_real(0.25))
}

/// Largest eigenvalue of the CHSH operator `M`; at most `1/√2` for any
/// `±1` observables.
pub fn tsirelson_check(a0: &Operator, a1: &Operator, b0: &Operator, b1: &Operator) -> Result<f64> {
    max_eigenvalue(&tsirelson_operator(a0, a1, b0, b1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{best_classical, eval_exact, Strategy};
    use crate::Execution;

    #[test]
    fn ghz_values() {
        let g = ghz_game();
        let q = eval_exact(&g, &ghz_quantum()).unwrap();
        assert!((q.win_probability - 1.0).abs() < 1e-12);
        let (v, _) = best_classical(&g, Execution::Sequential).unwrap();
        assert_eq!(v, 0.75);
        let zero = DeterministicStrategy::constant(&g, &[0, 0, 0]);
        assert_eq!(eval_exact(&g, &zero).unwrap().win_probability, 0.25);
    }

    #[test]
    fn ghz_state_after_hadamards_on_b_and_c() {
        let s = ghz_quantum().state().apply_each(&Operator::hadamard(), &[1, 2]).unwrap();
        let want = [0.0, 0.5, 0.5, 0.0, -0.5, 0.0, 0.0, 0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_values() {
        let g = chsh_game();
        let r = eval_exact(&g, &chsh_quantum()).unwrap();
        let target = (PI / 8.0).cos().powi(2);
        for row in &r.per_input {
            assert!((row.win_probability - target).abs() < 1e-12);
        }
        let zero = DeterministicStrategy::constant(&g, &[0, 0]);
        assert_eq!(eval_exact(&g, &zero).unwrap().win_probability, 0.75);
        let swapped = chsh_quantum().swap_parties(0, 1);
        assert!((eval_exact(&g, &swapped).unwrap().win_probability - target).abs() < 1e-12);
    }

    #[test]
    fn magic_square_quantum_parities() {
        let g = magic_square_game();
        let q = magic_square_quantum();
        for s in 0..3 {
            for t in 0..3 {
                for (o, p) in q.outcome_distribution(&g, &[s, t]).unwrap() {
                    if p > 1e-12 {
                        assert_eq!(parity(o[0]), 0);
                        assert_eq!(parity(o[1]), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_table_products() {
        let t = pauli_table();
        let id = Operator::identity(4);
        for i in 0..3 {
            let row = &(&t[i][0] * &t[i][1]) * &t[i][2];
            assert!(row.max_abs_diff(&id) < 1e-12);
            let col = &(&t[0][i] * &t[1][i]) * &t[2][i];
            assert!(col.max_abs_diff(&id.scale_real(-1.0)) < 1e-12);
        }
    }

    #[test]
    fn tsirelson_examples() {
        let id = Operator::identity(2);
        assert!((tsirelson_check(&id, &id, &id, &id).unwrap() - 0.5).abs() < 1e-12);
        let z = Operator::pauli_z();
        let x = Operator::pauli_x();
        let b0 = (&z + &x).scale_real(FRAC_1_SQRT_2);
        let b1 = (&z - &x).scale_real(FRAC_1_SQRT_2);
        assert!((tsirelson_check(&z, &x, &b0, &b1).unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
        let h = Operator::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(tsirelson_check(&h, &x, &b0, &b1).is_err());
    }
}
