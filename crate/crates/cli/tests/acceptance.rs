//! End-to-end acceptance run. Each criterion drives the experiment runner
//! (and, where a runner does not expose the quantity, the library directly),
//! prints one PASS/FAIL line with its wall time against the limit, and the
//! process exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_8, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use qnlcc::games::{ghz_game, strategy_space_size};
use qnlcc::field::modulus_for;
use qnlcc::smp::fingerprint_overlap;
use qnlcc::{Bits, SeededRng};
use qnlcc_cli::{run, ExperimentConfig, Mode, Report};
use serde_json::Value;

type Verdict = Result<(), String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    body: fn() -> Verdict,
}

fn execute(cfg: ExperimentConfig) -> Result<Report, String> {
    let label = format!("{} {:?} {:?}", cfg.target, cfg.mode, cfg.params);
    let report = run(&cfg).map_err(|e| format!("{label}: {e}"))?;
    if let Some(c) = report.failed_checks().next() {
        return Err(format!("{label}: check `{}` failed ({})", c.name, c.detail));
    }
    Ok(report)
}

fn detail<'a>(r: &'a Report, key: &str) -> &'a Value {
    &r.details[key]
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Verdict {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_game(target: &str, quantum: f64, classical: f64, inputs: usize) -> Verdict {
    let r = execute(ExperimentConfig::new(target))?;
    let q = r.outcome.value();
    ensure((q - quantum).abs() <= 1e-9, || format!("{target}: quantum value {q}"))?;
    let c = detail(&r, "classical_optimum").as_f64().unwrap_or(f64::NAN);
    ensure((c - classical).abs() <= 1e-12,|| format!("{target}: classical optimum {c}"))?;
    let per_input = detail(&r, "per_input").as_array().map_or(0, Vec::len);
    ensure(per_input == inputs, || format!("{target}: {per_input} inputs evaluated"))
}

fn chsh() -> Verdict {
    exact_game("chsh", FRAC_PI_8.cos().powi(2), 0.75, 4)
}

fn ghz() -> Verdict {
    let space = strategy_space_size(&ghz_game());
    ensure(space == 64.0, || format!("GHZ strategy space {space}"))?;
    exact_game("ghz", 1.0, 0.75, 4)
}

fn magic_square() -> Verdict {
    exact_game("magic-square", 1.0, 8.0 / 9.0, 9)
}

fn tsirelson() -> Verdict {
    let r = execute(ExperimentConfig::new("tsirelson").param("draws", 200))?;
    let worst = r.outcome.value();
    ensure(worst <= 0.5f64.sqrt() + 1e-9, || format!("max eigenvalue {worst}"))
}

fn xor_values() -> Verdict {
    let r = execute(ExperimentConfig::new("xor-chsh"))?;
    ensure(detail(&r, "lhv_value").as_f64() == Some(2.0), || "local value".into())?;
    ensure(detail(&r, "ns_value").as_f64() == Some(4.0), || "no-signalling value".into())?;
    let q = r.outcome.value();
    ensure((q - 2.0 * SQRT_2).abs() <= 1e-6, || format!("seesaw value {q}"))?;
    let it = detail(&r, "iterations").as_u64().unwrap_or(u64::MAX);
    ensure(it <= 1000, || format!("{it} seesaw iterations"))
}

fn deutsch_jozsa() -> Verdict {
    for n in [2u64, 4, 8, 16] {
        let r = execute(ExperimentConfig::new("dj").param("n", n).param("samples", 1000))?;
        let exhaustive = detail(&r, "exhaustive").as_bool() == Some(true);
        let pairs = detail(&r, "pairs").as_u64().unwrap_or(0);
        ensure(exhaustive == (n <= 8), || format!("n={n}: exhaustive={exhaustive}"))?;
        ensure(n <= 8 || pairs == 1000, || format!("n={n}: {pairs} sampled pairs"))?;
        let q = r.ledgers[0].ledger.qubits;
        ensure(q == u64::from(n.trailing_zeros()), || format!("n={n}: {q} qubits"))?;
    }
    Ok(())
}

fn nonlocal_supports() -> Verdict {
    for n in [4u64, 8] {
        for target in ["dj-nonlocal", "hm-nonlocal"] {
            let r = execute(ExperimentConfig::new(target).param("n", n))?;
            let v = r.outcome.value();
            ensure(v <= 1e-12, || format!("{target} n={n}: violating mass {v:e}"))?;
        }
    }
    Ok(())
}

fn hidden_matching() -> Verdict {
    for n in [2u64, 4, 8, 16] {
        let r = execute(ExperimentConfig::new("hm").param("n", n))?;
        let v = r.outcome.value();
        ensure((v - 1.0).abs() <= 1e-9, || format!("quantum n={n}: {v}"))?;
    }
    let r = execute(ExperimentConfig::new("hm").mode(Mode::Sampled).param("n", 16).param("variant", "classical"))?;
    let (v, reference, radius) = (r.outcome.value(), r.reference.unwrap_or(f64::NAN), r.outcome.radius().unwrap_or(0.0));
    ensure((v - reference).abs() <= radius, || format!("classical {v} vs {reference} ± {radius}"))
}

fn grover() -> Verdict {
    for n in [16u64, 32] {
        execute(ExperimentConfig::new("intersection").mode(Mode::Sampled).param("n", n).trials(500))?;
    }
    Ok(())
}

fn fingerprints() -> Verdict {
    let mut rng = SeededRng::new(10);
    for n in [4usize, 8, 16] {
        let m = modulus_for(n);
        let bound = Ratio::new(n as u64 - 1, m);
        for _ in 0..1000 {
            let x = Bits::random(n, &mut rng);
            let mut y = Bits::random(n, &mut rng);
            if x == y {
                y.flip(rng.below(n));
            }
            let ov = fingerprint_overlap(&x, &y).map_err(|e| e.to_string())?;
            ensure(ov <= bound, || format!("n={n}: overlap {ov} above {bound}"))?;
        }
    }
    for pair in 0..20u64 {
        let n = if pair < 10 { 4 } else { 8 };
        execute(ExperimentConfig::new("swap-test").mode(Mode::Sampled).param("n", n).seed(pair).trials(10_000))?;
    }
    for reps in [1u64, 2, 3] {
        for equal in [true, false] {
            let cfg = ExperimentConfig::new("smp-quantum")
                .mode(Mode::Sampled)
                .param("n", 4)
                .param("reps", reps)
                .param("equal", equal)
                .trials(2000);
            execute(cfg)?;
        }
    }
    Ok(())
}

fn van_dam() -> Verdict {
    for seed in 0..50u64 {
        let circuit = format!("random:{}:{}:{}", 1 + seed % 6, 1 + seed % 8, seed % 3);
        let r = execute(ExperimentConfig::new("vandam").param("circuit", circuit.clone()).seed(seed))?;
        ensure(r.outcome.value() == 1.0, || format!("{circuit} seed {seed}: {}", r.outcome.value()))?;
        let ands = detail(&r, "ands").as_u64().unwrap_or(0);
        let l = &r.ledgers[0].ledger;
        ensure(l.nl_boxes == 2 * ands && l.classical_bits == 1, || format!("{circuit}: ledger {l:?}"))?;
    }
    for p in [0.7, 0.85, 0.908] {
        let r = execute(ExperimentConfig::new("vandam").mode(Mode::Sampled).param("p", p).trials(20_000))?;
        let closed = p * p + (1.0 - p) * (1.0 - p);
        let (v, radius) = (r.outcome.value(), r.outcome.radius().unwrap_or(0.0));
        ensure((v - closed).abs() <= radius, || format!("p={p}: {v} vs {closed} ± {radius}"))?;
    }
    Ok(())
}

fn pr_no_signalling() -> Verdict {
    for i in 0..=10 {
        let p = format!("{}/20", 10 + i);
        let r = execute(ExperimentConfig::new("pr-table").param("p", p.clone()))?;
        if i == 10 {
            ensure(detail(&r, "chsh").as_str() == Some("4"), || format!("CHSH at p=1: {}", detail(&r, "chsh")))?;
        }
    }
    let p = FRAC_PI_8.cos().powi(2);
    let r = execute(ExperimentConfig::new("pr-table").param("p", p))?;
    let chsh = detail(&r, "chsh_f64").as_f64().unwrap_or(f64::NAN);
    ensure((chsh - 2.0 * SQRT_2).abs() <= 1e-12, || format!("CHSH at cos^2(pi/8): {chsh}"))
}

fn detection() -> Verdict {
    for n in 1..=4u64 {
        for f in ["eq", "ip", "disj"] {
            execute(ExperimentConfig::new("detect-protocol").param("n", n).param("function", f))?;
        }
    }
    let r = execute(ExperimentConfig::new("detect-threshold"))?;
    let eta = r.outcome.value();
    ensure((eta - 2.0 / (SQRT_2 + 1.0)).abs() <= 0.01, || format!("threshold {eta}"))?;
    for (eta, eps) in [(0.3, 0.1), (0.5, 0.25)] {
        let r = execute(ExperimentConfig::new("detect-asym").param("eta", eta).param("epsilon", eps).trials(100_000))?;
        let d = r.outcome.value();
        ensure(d <= 2.0 * eps, || format!("(eta, eps) = ({eta}, {eps}): distance {d}"))?;
    }
    Ok(())
}

fn tooling() -> Verdict {
    for n in 1..=8u64 {
        let r = execute(ExperimentConfig::new("lb-rank").param("n", n).param("function", "eq"))?;
        ensure(r.outcome.value() == (1u64 << n) as f64, || format!("rank(EQ) at n={n}: {}", r.outcome.value()))?;
    }
    let r = execute(ExperimentConfig::new("lb-discrepancy").param("n", 2).param("function", "ip"))?;
    ensure(r.outcome.value() <= 0.5, || format!("disc(IP) {}", r.outcome.value()))?;
    ensure(detail(&r, "exact").as_bool() == Some(true), || "discrepancy search was not exact".into())?;
    ensure(detail(&r, "witness").is_object(), || "no maximizing rectangle".into())?;
    execute(ExperimentConfig::new("lb-lindsey").param("n", 8).param("rectangles", 10_000))?;
    execute(ExperimentConfig::new("lb-nayak").param("n", 2).param("d", 2).param("draws", 100))?;
    Ok(())
}

fn determinism() -> Verdict {
    let configs = [
        ExperimentConfig::new("chsh").mode(Mode::Sampled).seed(7),
        ExperimentConfig::new("vandam").mode(Mode::Sampled).param("p", 0.85).seed(7),
        ExperimentConfig::new("smp-classical").mode(Mode::Sampled).seed(7),
        ExperimentConfig::new("lb-discrepancy").param("n", 3).param("search", "sampled").seed(7),
        ExperimentConfig::new("detect-asym").trials(5000).seed(7),
    ];
    for mut cfg in configs {
        cfg.record_trials = true;
        let a = run(&cfg).map_err(|e| e.to_string())?.payload().map_err(|e| e.to_string())?;
        let b = run(&cfg).map_err(|e| e.to_string())?.payload().map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{}: payloads differ", cfg.target))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, title: "CHSH values", limit: secs(1), body: chsh },
        Criterion { id: 2, title: "GHZ values", limit: secs(1), body: ghz },
        Criterion { id: 3, title: "magic square values", limit: secs(10), body: magic_square },
        Criterion { id: 4, title: "Tsirelson bound", limit: secs(10), body: tsirelson },
        Criterion { id: 5, title: "XOR game values", limit: secs(5), body: xor_values },
        Criterion { id: 6, title: "distributed Deutsch-Jozsa", limit: secs(30), body: deutsch_jozsa },
        Criterion { id: 7, title: "non-local DJ and HM supports", limit: secs(30), body: nonlocal_supports },
        Criterion { id: 8, title: "hidden matching", limit: secs(60), body: hidden_matching },
        Criterion { id: 9, title: "intersection via Grover", limit: secs(60), body: grover },
        Criterion { id: 10, title: "fingerprinting", limit: secs(120), body: fingerprints },
        Criterion { id: 11, title: "van Dam circuit evaluation", limit: secs(60), body: van_dam },
        Criterion { id: 12, title: "PR box no-signalling", limit: secs(5), body: pr_no_signalling },
        Criterion { id: 13, title: "detection efficiency", limit: secs(120), body: detection },
        Criterion { id: 14, title: "lower-bound tooling", limit: secs(60), body: tooling },
        Criterion { id: 15, title: "determinism", limit: secs(60), body: determinism },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.body)();
        let elapsed = start.elapsed();
        let verdict = verdict.and_then(|()| {
            ensure(elapsed <= c.limit, || format!("took {:.2}s, limit {}s", elapsed.as_secs_f64(), c.limit.as_secs()))
        });
        let time = format!("{:.2}s / {}s", elapsed.as_secs_f64(), c.limit.as_secs());
        match verdict {
            Ok(()) => println!("PASS {:>2} {:<30} {time}", c.id, c.title),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {:<30} {time}: {why}", c.id, c.title);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
