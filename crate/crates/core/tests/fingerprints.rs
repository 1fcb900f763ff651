use num_complex::Complex64;
use proptest::prelude::*;
use qnlcc::field::{modulus_for, poly_eval};
use qnlcc::qstate::StateVector;
use qnlcc::smp::{
    common_point_probability, default_list_length, fingerprint_overlap, quantum_fingerprint, smp_classical_eq,
    smp_quantum_eq, swap_test_probability, QuantumEqualityReferee, SwapTest,
};
use qnlcc::{Bits, SeededRng};

fn random_state(qubits: usize, rng: &mut SeededRng) -> StateVector {
    let amp = (0..1usize << qubits).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    StateVector::normalized(amp).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_is_the_fingerprint_inner_product(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = SeededRng::new(seed);
        let x = Bits::random(n, &mut rng);
        let y = Bits::random(n, &mut rng);
        let fx = quantum_fingerprint(&x).unwrap();
        let fy = quantum_fingerprint(&y).unwrap();
        let inner = fx.state.inner(&fy.state).unwrap();
        let r = fingerprint_overlap(&x, &y).unwrap();
        let exact = *r.numer() as f64 / *r.denom() as f64;
        prop_assert!((inner.re - exact).abs() < 1e-12);
        prop_assert!(inner.im.abs() < 1e-12);
        // Agreement points counted directly.
        let p = modulus_for(n);
        let agree = (0..p).filter(|&a| poly_eval(&x, a, p) == poly_eval(&y, a, p)).count() as f64;
        prop_assert!((exact - agree / p as f64).abs() < 1e-15);
    }

    #[test]
    fn swap_circuit_matches_closed_form(seed in any::<u64>(), q in 1usize..5) {
        let mut rng = SeededRng::new(seed);
        let a = random_state(q, &mut rng);
        let b = random_state(q, &mut rng);
        let ov = a.inner(&b).unwrap().norm_sqr();
        let p = swap_test_probability(&a, &b).unwrap();
        prop_assert!((p - (1.0 - ov) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn equal_inputs_are_always_accepted(seed in any::<u64>(), n in 1usize..6, reps in 1usize..5) {
        let mut rng = SeededRng::new(seed);
        let x = Bits::random(n, &mut rng);
        let referee = QuantumEqualityReferee::new(&x, &x).unwrap();
        prop_assert!((referee.accept_probability(reps) - 1.0).abs() < 1e-12);
        let r = referee.run(reps, &mut rng).unwrap();
        prop_assert!(r.output);
        let c = smp_classical_eq(&x, &x, default_list_length(n), &mut rng).unwrap();
        prop_assert!(!c.output || c.correct == Some(true));
    }
}

#[test]
fn swap_test_sampling_agrees_with_probability() {
    let mut rng = SeededRng::new(17);
    let a = random_state(2, &mut rng);
    let b = random_state(2, &mut rng);
    let t = SwapTest::new(&a, &b).unwrap();
    let trials = 40_000;
    let ones = (0..trials).filter(|_| t.sample(&mut rng) == 1).count() as f64;
    let p = t.p_one();
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((ones / trials as f64 - p).abs() < 4.0 * sd);
}

#[test]
fn referee_rejects_unequal_inputs_with_bounded_error() {
    let mut rng = SeededRng::new(4);
    for n in [4usize, 8] {
        let x = Bits::random(n, &mut rng);
        let mut y = x.clone();
        y.set(0, !y.get(0));
        let referee = QuantumEqualityReferee::new(&x, &y).unwrap();
        let r = fingerprint_overlap(&x, &y).unwrap();
        let ov = *r.numer() as f64 / *r.denom() as f64;
        let p_acc = (1.0 - (1.0 - ov * ov) / 2.0).powi(3);
        assert!((referee.accept_probability(3) - p_acc).abs() < 1e-12);
        let run = smp_quantum_eq(&x, &y, 3, &mut rng).unwrap();
        let fp = quantum_fingerprint(&x).unwrap();
        assert_eq!(run.ledger.qubits, 2 * 3 * fp.qubits() as u64);
        assert_eq!(run.ledger.classical_bits, 0);
    }
}

/// Brute force over every ordered pair of `k`-lists when `p^(2k)` is small.
fn common_point_brute(p: u64, k: usize) -> f64 {
    let lists: Vec<Vec<u64>> = (0..p.pow(k as u32))
        .map(|mut c| {
            (0..k)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        })
        .collect();
    let mut hits = 0u64;
    for a in &lists {
        for b in &lists {
            if a.iter().any(|v| b.contains(v)) {
                hits += 1;
            }
        }
    }
    hits as f64 / (lists.len() * lists.len()) as f64
}

#[test]
fn common_point_probability_matches_enumeration() {
    for (p, k) in [(2, 1), (3, 2), (5, 2), (5, 3), (7, 3), (11, 2)] {
        assert!((common_point_probability(p, k) - common_point_brute(p, k)).abs() < 1e-12, "p={p} k={k}");
    }
}

#[test]
fn common_point_probability_matches_simulation() {
    let mut rng = SeededRng::new(23);
    let n = 16;
    let x = Bits::random(n, &mut rng);
    let k = default_list_length(n);
    let p = modulus_for(n);
    let trials = 20_000;
    let accepted = (0..trials)
        .filter(|_| smp_classical_eq(&x, &x, k, &mut rng).unwrap().output)
        .count() as f64;
    let expect = common_point_probability(p, k);
    let sd = (expect * (1.0 - expect) / trials as f64).sqrt();
    assert!((accepted / trials as f64 - expect).abs() < 4.0 * sd);
}
