use num_rational::BigRational;
use num_traits::ToPrimitive;
use qnlcc::bell::{no_signalling_check, BellExpression};
use qnlcc::nlbox::{pr_box_query, pr_correlation_table_generic, single_and_success, vandam_run, BooleanCircuit, BoxSupply, PRBox};
use qnlcc::{Bits, SeededRng};
use serde_json::{json, Value};

use super::{Ctx, Draft};
use crate::catalog::{Mode, Params};
use crate::error::{CliError, CliResult};
use crate::report::{Outcome, TrialRow};

/// Exhaustive input enumeration is limited to this many input bits per party.
const MAX_EXHAUSTIVE_N: usize = 6;

fn circuit(p: &Params, rng: &mut SeededRng) -> CliResult<(BooleanCircuit, String)> {
    let bad = |reason: String| CliError::invalid("params.circuit", reason);
    let v = p.json("circuit");
    if v.is_object() {
        let c = BooleanCircuit::from_json(&v.to_string()).map_err(|e| bad(e.to_string()))?;
        return Ok((c, "inline".into()));
    }
    let name = v.as_str().ok_or_else(|| bad("expected a fixture name or a circuit object".into()))?;
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("`{s}` is not a count")));
    let c = match parts.as_slice() {
        ["single-and"] => BooleanCircuit::single_and(),
        ["inner-product", n] => BooleanCircuit::inner_product(num(n)?)?,
        ["random", n, ands, nots] => BooleanCircuit::random(num(n)?, num(ands)?, num(nots)?, rng)?,
        _ => return Err(bad(format!("unknown circuit fixture `{name}`"))),
    };
    Ok((c, name.to_string()))
}

pub(super) fn vandam(ctx: &Ctx) -> CliResult<Draft> {
    let p = ctx.p.f64("p")?;
    ctx.p.ensure((0.5..=1.0).contains(&p), "p", "must lie in [1/2, 1]")?;
    let (c, label) = circuit(ctx.p, &mut ctx.setup_rng())?;
    let single = c.n() == 1 && c.and_count() == 1 && c.gates().len() == 1;
    let closed = if p == 1.0 {
        Some(1.0)
    } else if single {
        Some(single_and_success(p))
    } else {
        None
    };
    let n = c.n();
    let boxes = 2 * c.and_count() as u64;
    let details = json!({ "circuit": label, "n": n, "ands": c.and_count(), "gates": c.gates().len(), "p": p });
    let run_one = |x: &Bits, y: &Bits, rng: &mut SeededRng| vandam_run(&c, x, y, &mut BoxSupply::new(p)?, rng);
    match ctx.mode() {
        Mode::Exact => {
            if p < 1.0 {
                let value = closed.ok_or_else(|| {
                    CliError::invalid("mode", "exact mode needs p = 1 or the single-AND circuit; use sampled")
                })?;
                return Ok(Draft::new(Outcome::exact("success_probability", value)).reference(value).details(details));
            }
            ctx.p.ensure(n <= MAX_EXHAUSTIVE_N, "circuit", format!("exhaustive inputs need n <= {MAX_EXHAUSTIVE_N}"))?;
            let size = 1usize << n;
            let runs = ctx.fan_out(size * size, |i, rng| {
                let (x, y) = (Bits::from_index(i / size, n), Bits::from_index(i % size, n));
                let r = run_one(&x, &y, rng)?.result;
                Ok((r.correct == Some(true), r.ledger))
            })?;
            let right = runs.iter().filter(|r| r.0).count();
            let costs_ok = runs.iter().all(|r| r.1.nl_boxes == boxes && r.1.classical_bits == 1);
            Ok(Draft::new(Outcome::exact("success_probability", right as f64 / runs.len() as f64))
                .reference(1.0)
                .ledger("per evaluation", &runs[0].1)
                .check("agrees with the evaluator on every input", right == runs.len(), format!("{right}/{}", runs.len()))
                .check("2 boxes per AND and one bit", costs_ok, format!("{boxes} boxes"))
                .details(details))
        }
        Mode::Sampled => {
            let rows = ctx.fan_out(ctx.trials, |i, rng| {
                let x = Bits::random(n, rng);
                let y = Bits::random(n, rng);
                let r = run_one(&x, &y, rng)?.result;
                let mut row = TrialRow::new(i, ctx.trial_seed(i)).with_ledger(&r.ledger);
                row.success = r.correct;
                Ok(row)
            })?;
            let wins = rows.iter().filter(|r| r.success == Some(true)).count();
            let costs_ok = rows.iter().all(|r| r.nl_boxes == boxes && r.classical_bits == 1);
            let mut d = Draft::new(Outcome::rate("success_rate", wins, ctx.trials))
                .check("2 boxes per AND and one bit", costs_ok, format!("{boxes} boxes"));
            if let Some(v) = closed {
                d = d.reference(v).check_agreement(v);
            }
            Ok(d.details(details).rows(rows))
        }
    }
}

/// Accepts a JSON number, a decimal string or a fraction `a/b`.
fn rational_param(p: &Params, name: &str) -> CliResult<BigRational> {
    let bad = |s: &str| CliError::invalid(format!("params.{name}"), format!("`{s}` is not a decimal or a fraction"));
    let text = match p.json(name) {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(bad(&other.to_string())),
    };
    let text = text.trim();
    if text.contains('/') {
        return text.parse::<BigRational>().map_err(|_| bad(text));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if whole.is_empty() && frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad(text));
    }
    format!("{whole}{frac}/1{}", "0".repeat(frac.len())).parse::<BigRational>().map_err(|_| bad(text))
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(super) fn pr_table(ctx: &Ctx) -> CliResult<Draft> {
    let p = rational_param(ctx.p, "p")?;
    let table = pr_correlation_table_generic(p.clone())?;
    let pf = ratio_to_f64(&p);
    match ctx.mode() {
        Mode::Exact => {
            let ns = no_signalling_check(&table);
            let one = BigRational::from_integer(1.into());
            let two = BigRational::from_integer(2.into());
            let four = BigRational::from_integer(4.into());
            let chsh = BellExpression::<BigRational>::chsh().evaluate(&table)?;
            let expected = &four * (&two * &p - &one);
            let total = table.data().iter().fold(BigRational::from_integer(0.into()), |acc, v| acc + v);
            Ok(Draft::new(Outcome::exact("win_probability", pf))
                .reference(pf)
                .check("exact no-signalling", ns.exact_zero, format!("deviations {} / {}", ns.alice_deviation, ns.bob_deviation))
                .check("normalized", total == four, format!("total mass {total} over four input pairs"))
                .check("CHSH = 4(2p - 1)", chsh == expected, format!("{chsh}"))
                .details(json!({ "p": p.to_string(), "chsh": chsh.to_string(), "chsh_f64": ratio_to_f64(&chsh), "table": table.to_f64().data() })))
        }
        Mode::Sampled => {
            let rows = ctx.fan_out(ctx.trials, |i, rng| {
                let (x, y) = (rng.bit(), rng.bit());
                let mut pr = PRBox::new(i, pf)?;
                let (a, b) = pr_box_query(&mut pr, x, y, rng)?;
                let mut row = TrialRow::new(i, ctx.trial_seed(i));
                row.success = Some(a ^ b == (x & y));
                row.note = format!("x={} y={} a={} b={}", u8::from(x), u8::from(y), u8::from(a), u8::from(b));
                Ok((row, a))
            })?;
            let alice_ones = rows.iter().filter(|r| r.1).count();
            let rows: Vec<TrialRow> = rows.into_iter().map(|r| r.0).collect();
            let wins = rows.iter().filter(|r| r.success == Some(true)).count();
            let marginal = Outcome::rate("alice_marginal", alice_ones, ctx.trials);
            let radius = marginal.radius().unwrap_or(0.0);
            Ok(Draft::new(Outcome::rate("win_probability", wins, ctx.trials))
                .reference(pf)
                .check_agreement(pf)
                .check(
                    "uniform marginal",
                    (marginal.value() - 0.5).abs() <= radius,
                    format!("P(a=1) = {}", marginal.value()),
                )
                .details(json!({ "p": p.to_string(), "alice_marginal": marginal.value() }))
                .rows(rows))
        }
    }
}
