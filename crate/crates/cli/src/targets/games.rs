use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use qnlcc::bell::{qm_value_xor, SeesawConfig, XorGame};
use qnlcc::games::{
    best_classical, chsh_game, chsh_quantum, eval_exact, ghz_game, ghz_quantum, magic_square_game,
    magic_square_quantum, tsirelson_check, GameSpec, QuantumStrategy, Strategy,
};
use qnlcc::qstate::Operator;
use qnlcc::Execution;
use serde_json::json;

use super::{Ctx, Draft};
use crate::catalog::Mode;
use crate::error::CliResult;
use crate::report::{Outcome, TrialRow};

struct Setup {
    game: GameSpec,
    quantum: QuantumStrategy,
    quantum_value: f64,
    classical_value: f64,
}

fn setup(name: &str) -> Setup {
    match name {
        "ghz" => Setup {
            game: ghz_game(),
            quantum: ghz_quantum(),
            quantum_value: 1.0,
            classical_value: 0.75,
        },
        "chsh" => Setup {
            game: chsh_game(),
            quantum: chsh_quantum(),
            quantum_value: (PI / 8.0).cos().powi(2),
            classical_value: 0.75,
        },
        _ => Setup {
            game: magic_square_game(),
            quantum: magic_square_quantum(),
            quantum_value: 1.0,
            classical_value: 8.0 / 9.0,
        },
    }
}

pub(super) fn game(ctx: &Ctx) -> CliResult<Draft> {
    let s = setup(&ctx.cfg.target);
    match ctx.mode() {
        Mode::Exact => {
            let q = eval_exact(&s.game, &s.quantum)?;
            let (classical, best) = best_classical(&s.game, Execution::Parallel)?;
            let perfect_inputs = q.per_input.iter().all(|w| (w.win_probability - 1.0).abs() < 1e-9);
            let mut d = Draft::new(Outcome::exact("win_probability", q.win_probability))
                .reference(s.quantum_value)
                .check_close("quantum value", q.win_probability, s.quantum_value, 1e-9)
                .check_close("classical optimum", classical, s.classical_value, 1e-12);
            if s.quantum_value == 1.0 {
                d = d.check("every input won with certainty", perfect_inputs, format!("{} inputs", q.per_input.len()));
            }
            Ok(d.details(json!({
                "game": s.game.name(),
                "per_input": q.per_input,
                "strategy": q.strategy,
                "classical_optimum": classical,
                "classical_reference": s.classical_value,
                "classical_strategy": best.encoding(),
            })))
        }
        Mode::Sampled => {
            let dist: Vec<f64> = s.game.distribution().iter().map(|(_, w)| *w).collect();
            let outcomes = s
                .game
                .distribution()
                .iter()
                .map(|(inputs, _)| s.quantum.outcome_distribution(&s.game, inputs))
                .collect::<qnlcc::Result<Vec<_>>>()?;
            let rows = ctx.fan_out(ctx.trials, |i, rng| {
                let k = rng.weighted_index(&dist);
                let weights: Vec<f64> = outcomes[k].iter().map(|(_, p)| *p).collect();
                let (out, _) = &outcomes[k][rng.weighted_index(&weights)];
                let inputs = &s.game.distribution()[k].0;
                let mut row = TrialRow::new(i, ctx.trial_seed(i));
                row.success = Some(s.game.wins(inputs, out));
                row.note = format!("in={inputs:?} out={out:?}");
                Ok(row)
            })?;
            let wins = rows.iter().filter(|r| r.success == Some(true)).count();
            Ok(Draft::new(Outcome::rate("win_probability", wins, ctx.trials))
                .reference(s.quantum_value)
                .check_agreement(s.quantum_value)
                .details(json!({ "game": s.game.name(), "wins": wins }))
                .rows(rows))
        }
    }
}

pub(super) fn tsirelson(ctx: &Ctx) -> CliResult<Draft> {
    let draws = ctx.p.usize("draws")?;
    ctx.p.ensure(draws > 0, "draws", "must be positive")?;
    let values = ctx.fan_out(draws, |i, rng| {
        let d = if i % 2 == 0 { 2 } else { 4 };
        let obs: Vec<Operator> = (0..4).map(|_| Operator::random_plus_minus_one(d, rng)).collect();
        Ok(tsirelson_check(&obs[0], &obs[1], &obs[2], &obs[3])?)
    })?;
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (z, x) = (Operator::pauli_z(), Operator::pauli_x());
    let b0 = (&z + &x).scale_real(FRAC_1_SQRT_2);
    let b1 = (&z - &x).scale_real(FRAC_1_SQRT_2);
    let saturating = tsirelson_check(&z, &x, &b0, &b1)?;
    Ok(Draft::new(Outcome::exact("max_eigenvalue", worst))
        .reference(FRAC_1_SQRT_2)
        .check("random quadruples within the bound", worst <= FRAC_1_SQRT_2 + 1e-9, format!("max {worst} over {draws} draws"))
        .check_close("saturating quadruple", saturating, FRAC_1_SQRT_2, 1e-9)
        .details(json!({ "draws": draws, "dimensions": [2, 4], "saturating_value": saturating })))
}

pub(super) fn xor_chsh(ctx: &Ctx) -> CliResult<Draft> {
    let g = XorGame::chsh();
    let lhv = g.lhv_value()?;
    let ns = g.ns_value();
    let q = qm_value_xor(&g, &SeesawConfig::for_game(&g, ctx.cfg.seed), Execution::Parallel)?;
    let iterations = q.best().iterations();
    Ok(Draft::new(Outcome::exact("qm_value", q.value))
        .reference(2.0 * SQRT_2)
        .check_close("local value", lhv, 2.0, 0.0)
        .check_close("no-signalling value", ns, 4.0, 0.0)
        .check_close("seesaw value", q.value, 2.0 * SQRT_2, 1e-6)
        .check("seesaw iterations", iterations <= 1000, format!("{iterations} iterations"))
        .details(json!({ "lhv_value": lhv, "ns_value": ns, "qm_value": q.value, "iterations": iterations, "best_restart": q.best_restart })))
}
