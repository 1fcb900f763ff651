use proptest::prelude::*;
use qnlcc::games::{
    best_classical, chsh_game, chsh_quantum, eval_exact, ghz_game, ghz_quantum, magic_square_classical_example,
    magic_square_game, magic_square_quantum, strategy_space_size, DeterministicStrategy, Strategy,
};
use qnlcc::Execution;

#[test]
fn ghz_equations_are_never_all_satisfied() {
    let promise = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)];
    let mut best = 0;
    for bits in 0u32..64 {
        let bit = |k: u32| (bits >> k) & 1;
        let (a, b, c) = ([bit(0), bit(1)], [bit(2), bit(3)], [bit(4), bit(5)]);
        let held = promise
            .iter()
            .filter(|&&(s, t, u)| a[s] ^ b[t] ^ c[u] == u32::from(s | t | u != 0))
            .count();
        best = best.max(held);
    }
    assert_eq!(best, 3);
}

#[test]
fn chsh_equations_are_never_all_satisfied() {
    let mut best = 0;
    for bits in 0usize..16 {
        let held = (0..4)
            .filter(|&xy| {
                let (x, y) = (xy >> 1, xy & 1);
                let a = (bits >> x) & 1;
                let b = (bits >> (2 + y)) & 1;
                a ^ b == x & y
            })
            .count();
        best = best.max(held);
    }
    assert_eq!(best, 3);
}

#[test]
fn canonical_values() {
    let chsh = eval_exact(&chsh_game(), &chsh_quantum()).unwrap();
    assert!((chsh.win_probability - (std::f64::consts::PI / 8.0).cos().powi(2)).abs() < 1e-9);
    let ghz = eval_exact(&ghz_game(), &ghz_quantum()).unwrap();
    assert!(ghz.per_input.iter().all(|w| (w.win_probability - 1.0).abs() < 1e-9));
    let ms = eval_exact(&magic_square_game(), &magic_square_quantum()).unwrap();
    assert_eq!(ms.per_input.len(), 9);
    assert!(ms.per_input.iter().all(|w| (w.win_probability - 1.0).abs() < 1e-9));

    let (c, _) = best_classical(&chsh_game(), Execution::Parallel).unwrap();
    assert_eq!(c, 0.75);
    let (g, _) = best_classical(&ghz_game(), Execution::Sequential).unwrap();
    assert_eq!(g, 0.75);
    assert_eq!(strategy_space_size(&ghz_game()), 64.0);
    let example = eval_exact(&magic_square_game(), &magic_square_classical_example()).unwrap();
    assert!((example.win_probability - 8.0 / 9.0).abs() < 1e-12);
}

#[test]
fn ghz_single_outputs_are_uniform() {
    let s = ghz_quantum();
    for inputs in [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]] {
        let dist = s.joint_distribution(&inputs).unwrap();
        for party in 0..3 {
            let p1: f64 = dist.iter().filter(|(o, _)| o[party] == 1).map(|(_, p)| p).sum();
            assert!((p1 - 0.5).abs() < 1e-9, "party {party} at {inputs:?}");
        }
    }
}

#[test]
fn magic_square_parities_hold_with_certainty() {
    let s = magic_square_quantum();
    for r in 0..3 {
        for c in 0..3 {
            for (o, p) in s.joint_distribution(&[r, c]).unwrap() {
                if p > 1e-12 {
                    assert_eq!(o[0].count_ones() % 2, 0);
                    assert_eq!(o[1].count_ones() % 2, 1);
                }
            }
        }
    }
}

#[test]
fn sequential_and_parallel_search_agree() {
    let g = magic_square_game();
    let (a, sa) = best_classical(&g, Execution::Sequential).unwrap();
    let (b, sb) = best_classical(&g, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(sa.encoding(), sb.encoding());
    assert!((a - 8.0 / 9.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn classical_search_dominates_every_strategy(index in 0u64..64) {
        for g in [chsh_game(), ghz_game()] {
            let size = strategy_space_size(&g) as u64;
            let s = DeterministicStrategy::from_index(&g, index % size);
            let v = eval_exact(&g, &s).unwrap().win_probability;
            let (best, _) = best_classical(&g, Execution::Sequential).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v <= best + 1e-12);
        }
    }

    #[test]
    fn magic_square_strategies_never_beat_eight_ninths(index in 0u64..(1u64 << 18)) {
        let g = magic_square_game();
        let s = DeterministicStrategy::from_index(&g, index);
        let v = eval_exact(&g, &s).unwrap().win_probability;
        prop_assert!(v <= 8.0 / 9.0 + 1e-12);
        prop_assert!(!s.describe().is_empty());
    }
}
