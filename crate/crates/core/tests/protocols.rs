use proptest::prelude::*;
use qnlcc::ccproto::{
    dj_nonlocal, dj_promise_holds, dj_quantum, eq_private_coin_poly, eq_public_coin, hm_classical_oneway,
    hm_classical_success_exact, hm_nonlocal, hm_quantum, hm_quantum_distribution, intersection_grover,
    ip_transfer_demo, raz_instance_gen, raz_quantum, Channel, MatchingSpec, Party,
};
use qnlcc::{Bits, SeededRng};

fn promise_pairs(n: usize) -> Vec<(Bits, Bits)> {
    let mut out = Vec::new();
    for xi in 0..1usize << n {
        for yi in 0..1usize << n {
            let (x, y) = (Bits::from_index(xi, n), Bits::from_index(yi, n));
            if dj_promise_holds(&x, &y).unwrap() {
                out.push((x, y));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Op {
    Bits(bool, u64),
    Qubits(bool, u64),
    Ebits(u64),
    Coins(u64),
    Boxes(u64),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (any::<bool>(), 0u64..50).prop_map(|(a, s)| Op::Bits(a, s)),
        (any::<bool>(), 0u64..50).prop_map(|(a, s)| Op::Qubits(a, s)),
        (0u64..10).prop_map(Op::Ebits),
        (0u64..10).prop_map(Op::Coins),
        (0u64..10).prop_map(Op::Boxes),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ledger_counts_every_message_once(ops in proptest::collection::vec(op(), 0..40)) {
        let mut ch = Channel::new();
        let party = |alice: bool| if alice { Party::Alice } else { Party::Bob };
        let mut expected = [0u64; 5];
        for o in &ops {
            let before = ch.ledger().clone();
            match *o {
                Op::Bits(a, s) => { ch.send_bits(party(a), "m", s); expected[0] += s; }
                Op::Qubits(a, s) => { ch.send_qubits(party(a), "m", s); expected[1] += s; }
                Op::Ebits(s) => { ch.share_ebits(s); expected[2] += s; }
                Op::Coins(s) => { ch.toss_public_coins(s); expected[3] += s; }
                Op::Boxes(s) => { ch.use_boxes(s); expected[4] += s; }
            }
            let after = ch.ledger();
            let deltas = [
                after.classical_bits - before.classical_bits,
                after.qubits - before.qubits,
                after.ebits - before.ebits,
                after.public_coin_bits - before.public_coin_bits,
                after.nl_boxes - before.nl_boxes,
            ];
            prop_assert!(deltas.iter().filter(|&&d| d > 0).count() <= 1);
        }
        let r = ch.finish((), None, None);
        let l = &r.ledger;
        prop_assert_eq!([l.classical_bits, l.qubits, l.ebits, l.public_coin_bits, l.nl_boxes], expected);
        prop_assert_eq!(r.transcript.totals(), (l.classical_bits, l.qubits));
    }

    #[test]
    fn equality_protocols_never_reject_equal_inputs(seed in any::<u64>(), n in 1usize..24) {
        let mut rng = SeededRng::new(seed);
        let x = Bits::random(n, &mut rng);
        let a = eq_public_coin(&x, &x, 3, &mut rng).unwrap();
        let b = eq_private_coin_poly(&x, &x, &mut rng).unwrap();
        prop_assert!(a.output && b.output);
        prop_assert_eq!(a.correct, Some(true));
        prop_assert_eq!(b.correct, Some(true));
    }

    #[test]
    fn grover_never_reports_a_false_intersection(seed in any::<u64>(), log_n in 1usize..6) {
        let n = 1 << log_n;
        let mut rng = SeededRng::new(seed);
        let x = Bits::random(n, &mut rng);
        let y = Bits::random(n, &mut rng);
        let r = intersection_grover(&x, &y, &mut rng).unwrap();
        if let Some(i) = r.output {
            prop_assert!(x.get(i) && y.get(i));
        }
        if x.and(&y).unwrap().weight() == 0 {
            prop_assert_eq!(r.output, None);
        }
    }

    #[test]
    fn hm_quantum_is_always_right(seed in any::<u64>(), log_n in 1usize..5) {
        let n = 1 << log_n;
        let mut rng = SeededRng::new(seed);
        let x = Bits::random(n, &mut rng);
        let m = MatchingSpec::random(n, &mut rng).unwrap();
        let dist = hm_quantum_distribution(&x, &m).unwrap();
        let right: f64 = dist.iter().filter(|(a, _)| a.is_correct(&x, &m)).map(|(_, p)| p).sum();
        prop_assert!((right - 1.0).abs() < 1e-9);
        let r = hm_quantum(&x, &m, &mut rng).unwrap();
        prop_assert_eq!(r.ledger.qubits, log_n as u64);
        prop_assert_eq!(r.correct, Some(true));
    }
}

#[test]
fn dj_is_exact_with_log_n_qubits() {
    for n in [2usize, 4, 8] {
        for (x, y) in promise_pairs(n) {
            let r = dj_quantum(&x, &y).unwrap();
            assert_eq!(r.ledger.qubits, n.trailing_zeros() as u64);
            assert_eq!(r.output, x == y);
            assert!((r.exact_success.unwrap() - 1.0).abs() < 1e-9);
        }
    }
    let x: Bits = "0000".parse().unwrap();
    let y: Bits = "0011".parse().unwrap();
    assert!(!dj_quantum(&x, &y).unwrap().output);
    let off: (Bits, Bits) = ("01".parse().unwrap(), "10".parse().unwrap());
    assert!(dj_quantum(&off.0, &off.1).is_err());
}

#[test]
fn nonlocal_dj_support() {
    let mut rng = SeededRng::new(3);
    for (x, y) in promise_pairs(4) {
        let run = dj_nonlocal(&x, &y, &mut rng).unwrap();
        assert_eq!(run.ledger.ebits, 2);
        assert_eq!(run.ledger.classical_bits + run.ledger.qubits, 0);
        let expected = if x == y { 1.0 } else { 0.0 };
        assert!((run.agree_probability() - expected).abs() < 1e-12);
        if x == y {
            for a in 0..4 {
                assert!((run.probabilities[a][a] - 0.25).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn nonlocal_hm_support_and_marginal() {
    let mut rng = SeededRng::new(5);
    for n in [4usize, 8] {
        for _ in 0..4 {
            let x = Bits::random(n, &mut rng);
            let m = MatchingSpec::random(n, &mut rng).unwrap();
            let run = hm_nonlocal(&x, &m, &mut rng).unwrap();
            assert_eq!(run.ledger.ebits, n.trailing_zeros() as u64);
            let mut k_marginal = vec![0.0; n];
            for p in &run.distribution {
                if !p.satisfies(&x) {
                    assert!(p.probability < 1e-12);
                }
                k_marginal[p.k] += p.probability;
            }
            for v in k_marginal {
                assert!((v - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }
}

fn subsets_hitting_pair(n: usize, k: usize, m: &MatchingSpec) -> f64 {
    let (mut hit, mut total) = (0u64, 0u64);
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        total += 1;
        if m.pairs().iter().any(|&(i, j)| mask >> i & 1 == 1 && mask >> j & 1 == 1) {
            hit += 1;
        }
    }
    hit as f64 / total as f64
}

#[test]
fn classical_hm_oracle_matches_enumeration() {
    for (n, k) in [(8, 3), (12, 4), (16, 8)] {
        let m = MatchingSpec::adjacent(n).unwrap();
        let exact = hm_classical_success_exact(n, k).unwrap();
        assert!((exact - subsets_hitting_pair(n, k, &m)).abs() < 1e-12);
    }
    let mut rng = SeededRng::new(1);
    let x = Bits::random(16, &mut rng);
    let m = MatchingSpec::halves(16).unwrap();
    assert!(hm_classical_oneway(&x, &m, 1, &mut rng).unwrap().output.is_none());
    let full = hm_classical_oneway(&x, &m, 16, &mut rng).unwrap();
    assert!(full.output.is_some_and(|a| a.is_correct(&x, &m)));
    assert_eq!(full.ledger.classical_bits, 16 * 5);
}

#[test]
fn raz_instances_meet_their_overlap() {
    let mut rng = SeededRng::new(9);
    for target in [2.0 / 3.0, 0.9, 1.0] {
        let inst = raz_instance_gen(8, target, &mut rng).unwrap();
        assert!((inst.overlap - target).abs() < 1e-9);
        let r = raz_quantum(&inst, &mut rng).unwrap();
        assert!(r.exact_success.unwrap() >= 2.0 / 3.0 - 1e-9);
        assert_eq!(r.ledger.qubits, 6);
        assert_eq!(r.ledger.rounds, 2);
    }
}

#[test]
fn inner_product_transfer_recovers_every_string() {
    for xi in 0..16 {
        let x = Bits::from_index(xi, 4);
        let t = ip_transfer_demo(&x).unwrap();
        assert_eq!(t.recovered, x);
        assert!((t.probability - 1.0).abs() < 1e-12);
    }
}
