use num_rational::BigRational;
use num_traits::{FromPrimitive, One};
use qnlcc::bell::{no_signalling_check, BellExpression};
use qnlcc::nlbox::{
    collapse_threshold, noisy_vandam_success, pr_box_query, pr_correlation_table, pr_correlation_table_generic,
    single_and_success, vandam_eval, vandam_run, BooleanCircuit, BoxSupply, PRBox, Wire,
};
use qnlcc::{Bits, Error, SeededRng};

#[test]
fn perfect_boxes_compute_random_circuits() {
    let mut rng = SeededRng::new(2024);
    for case in 0..50 {
        let n = 1 + case % 5;
        let c = BooleanCircuit::random(n, 1 + case % 7, case % 4, &mut rng).unwrap();
        let x = Bits::random(n, &mut rng);
        let y = Bits::random(n, &mut rng);
        let mut supply = BoxSupply::new(1.0).unwrap();
        let run = vandam_run(&c, &x, &y, &mut supply, &mut rng).unwrap();
        assert_eq!(run.result.output, c.evaluate(&x, &y).unwrap());
        assert_eq!(run.result.ledger.nl_boxes, 2 * c.and_count() as u64);
        assert_eq!(run.result.ledger.classical_bits, 1);
        // Every intermediate share pair must XOR to the plain value of that gate.
        let sub = |k: usize| {
            BooleanCircuit::new(n, c.gates()[..=k].to_vec(), Wire::Gate(k)).unwrap()
        };
        for (k, s) in run.shares.iter().enumerate() {
            assert_eq!(s.value(), sub(k).evaluate(&x, &y).unwrap(), "case {case} gate {k}");
        }
        let round_trip = BooleanCircuit::from_json(&c.to_json()).unwrap();
        assert_eq!(round_trip.evaluate(&x, &y).unwrap(), c.evaluate(&x, &y).unwrap());
    }
}

#[test]
fn inner_product_circuit_with_perfect_boxes() {
    let mut rng = SeededRng::new(8);
    let c = BooleanCircuit::inner_product(4).unwrap();
    for _ in 0..32 {
        let x = Bits::random(4, &mut rng);
        let y = Bits::random(4, &mut rng);
        let r = vandam_eval(&c, &x, &y, 1.0, &mut rng).unwrap();
        assert_eq!(r.output, x.dot(&y).unwrap());
        assert_eq!(r.exact_success, Some(1.0));
    }
}

/// Each of the two boxes errs independently with probability `1 − p`; the
/// output is right iff an even number of them err.
fn single_and_oracle(p: f64) -> f64 {
    let mut total = 0.0;
    for e1 in [false, true] {
        for e2 in [false, true] {
            let w = (if e1 { 1.0 - p } else { p }) * (if e2 { 1.0 - p } else { p });
            if e1 == e2 {
                total += w;
            }
        }
    }
    total
}

#[test]
fn noisy_single_and_matches_closed_form() {
    let c = BooleanCircuit::single_and();
    for p in [0.5, 0.75, 0.85, 0.95] {
        let exact = single_and_success(p);
        assert!((exact - single_and_oracle(p)).abs() < 1e-15);
        let mut rng = SeededRng::new((p * 1000.0) as u64);
        let est = noisy_vandam_success(&c, p, 20_000, &mut rng).unwrap();
        let sd = (exact * (1.0 - exact) / est.trials as f64).sqrt();
        assert!((est.rate - exact).abs() <= 4.0 * sd, "p={p} rate={} exact={exact}", est.rate);
    }
}

#[test]
fn success_rises_with_box_quality() {
    let c = BooleanCircuit::single_and();
    let grid: Vec<f64> = (0..=10).map(|i| 0.5 + 0.05 * i as f64).collect();
    let exact: Vec<f64> = grid.iter().map(|&p| single_and_success(p)).collect();
    assert!(exact.windows(2).all(|w| w[1] >= w[0]));
    let rates: Vec<_> = grid
        .iter()
        .map(|&p| noisy_vandam_success(&c, p, 5_000, &mut SeededRng::new(77)).unwrap())
        .collect();
    for w in rates.windows(2) {
        let slack = 4.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        assert!(w[1].rate + slack >= w[0].rate);
    }
    assert_eq!(rates.last().unwrap().rate, 1.0);
}

#[test]
fn pr_tables_are_exactly_no_signalling() {
    for i in 0..=10 {
        let p = BigRational::new((10 + i).into(), 20.into());
        let t = pr_correlation_table_generic(p.clone()).unwrap();
        let report = no_signalling_check(&t);
        assert!(report.exact_zero && report.pass);
        let sum = t.data().iter().fold(BigRational::from_u8(0).unwrap(), |acc, v| acc + v);
        assert_eq!(sum, BigRational::from_u8(4).unwrap());
        let chsh = BellExpression::<BigRational>::chsh().evaluate(&t).unwrap();
        let two = BigRational::from_u8(2).unwrap();
        assert_eq!(chsh, BigRational::from_u8(4).unwrap() * (two * p - BigRational::one()));
    }
    assert!(pr_correlation_table(0.4).is_err());
    assert!(pr_correlation_table(1.01).is_err());
}

#[test]
fn chsh_values_of_pr_boxes() {
    let chsh = BellExpression::<f64>::chsh();
    let v = chsh.evaluate(&pr_correlation_table(1.0).unwrap()).unwrap();
    assert!((v - 4.0).abs() < 1e-12);
    let q = (std::f64::consts::PI / 8.0).cos().powi(2);
    let v = chsh.evaluate(&pr_correlation_table(q).unwrap()).unwrap();
    assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!((collapse_threshold() - (3.0 + 6f64.sqrt()) / 6.0).abs() < 1e-15);
    assert!(collapse_threshold() > q);
}

#[test]
fn sampled_boxes_have_uniform_marginals_and_the_pr_rule() {
    let mut rng = SeededRng::new(31);
    let trials = 40_000;
    let mut a_ones = 0usize;
    let mut b_ones = 0usize;
    for t in 0..trials {
        let (x, y) = (t % 2 == 1, t / 2 % 2 == 1);
        let (a, b) = pr_box_query(&mut PRBox::perfect(t), x, y, &mut rng).unwrap();
        assert_eq!(a ^ b, x & y);
        a_ones += a as usize;
        b_ones += b as usize;
    }
    let sd = (0.25 / trials as f64).sqrt();
    assert!((a_ones as f64 / trials as f64 - 0.5).abs() < 4.0 * sd);
    assert!((b_ones as f64 / trials as f64 - 0.5).abs() < 4.0 * sd);
}

#[test]
fn a_box_answers_once() {
    let mut rng = SeededRng::new(0);
    let mut pr = PRBox::new(3, 0.9).unwrap();
    pr_box_query(&mut pr, true, true, &mut rng).unwrap();
    assert!(matches!(pr_box_query(&mut pr, true, true, &mut rng), Err(Error::BoxReused(3))));
}
