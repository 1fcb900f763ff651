use qnlcc::lbtools::{
    comm_matrix, discrepancy as run_discrepancy, disjointness, equality, inner_product, lindsey_check, nayak_check,
    random_density, random_povm, saturating_example, DiscrepancyMode, InputDistribution, Rectangle, MAX_RANK_N,
};
use qnlcc::Execution;
use serde_json::json;

use super::{Ctx, Draft};
use crate::catalog::Params;
use crate::error::{CliError, CliResult};
use crate::report::Outcome;

fn function(p: &Params) -> CliResult<(fn(usize, usize) -> bool, &str)> {
    let name = p.str("function")?;
    let f: fn(usize, usize) -> bool = match name {
        "eq" => equality,
        "ip" => inner_product,
        "disj" => disjointness,
        "ones" => |_, _| true,
        other => return Err(CliError::invalid("params.function", format!("unknown function `{other}`"))),
    };
    Ok((f, name))
}

pub(super) fn rank(ctx: &Ctx) -> CliResult<Draft> {
    let n = ctx.p.usize("n")?;
    ctx.p.ensure((1..=MAX_RANK_N).contains(&n), "n", format!("must lie in [1, {MAX_RANK_N}]"))?;
    let (f, name) = function(ctx.p)?;
    let r = comm_matrix(n, f)?.rank()?;
    let size = 1usize << n;
    let known = match name {
        "eq" | "disj" => size,
        "ip" => size - 1,
        _ => 1,
    };
    Ok(Draft::new(Outcome::exact("rank", r as f64))
        .reference(known as f64)
        .check("rank matches the closed form", r == known, format!("{r} vs {known}"))
        .details(json!({ "n": n, "function": name, "log2_rank": (r as f64).log2() })))
}

pub(super) fn discrepancy(ctx: &Ctx) -> CliResult<Draft> {
    let n = ctx.p.usize("n")?;
    let (f, name) = function(ctx.p)?;
    let mode = match ctx.p.str("search")? {
        "exact" => DiscrepancyMode::Exact,
        "enumerate" => DiscrepancyMode::Enumerate,
        "sampled" => DiscrepancyMode::Sampled {
            samples: ctx.p.usize("samples")?,
            greedy: true,
        },
        other => return Err(CliError::invalid("params.search", format!("unknown search `{other}`"))),
    };
    ctx.p.ensure((1..=6).contains(&n), "n", "must lie in [1, 6]")?;
    let m = comm_matrix(n, f)?;
    let d = run_discrepancy(&m, &InputDistribution::uniform(n), mode, &mut ctx.setup_rng(), Execution::Parallel)?;
    let mut draft = Draft::new(Outcome::exact("discrepancy", d.value));
    if name == "ip" {
        // Lindsey: every rectangle has imbalance at most 2^{-n/2}.
        let bound = 0.5f64.powf(n as f64 / 2.0);
        draft = draft.check("inner product within 2^{-n/2}", d.value <= bound + 1e-12, format!("{} vs {bound}", d.value));
    }
    Ok(draft.details(json!({
        "n": n,
        "function": name,
        "exact": d.exact,
        "rectangles": d.rectangles,
        "witness": d.witness,
    })))
}

pub(super) fn lindsey(ctx: &Ctx) -> CliResult<Draft> {
    let n = ctx.p.usize("n")?;
    ctx.p.ensure((1..=12).contains(&n), "n", "must lie in [1, 12]")?;
    let count = ctx.p.usize("rectangles")?;
    ctx.p.ensure(count > 0, "rectangles", "must be positive")?;
    let ratios = ctx.fan_out(count, |_, rng| {
        let c = lindsey_check(&Rectangle::random(n, rng))?;
        Ok((c.pass, if c.rhs > 0.0 { c.lhs as f64 / c.rhs } else { 0.0 }))
    })?;
    let worst = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let failures = ratios.iter().filter(|r| !r.0).count();
    let full = lindsey_check(&Rectangle::full(n))?;
    Ok(Draft::new(Outcome::exact("max_lhs_over_rhs", worst))
        .check("every rectangle within the bound", failures == 0, format!("{failures} failures of {count}"))
        .check("full rectangle sums to 2^n", full.lhs == 1 << n, format!("{}", full.lhs))
        .details(json!({ "n": n, "rectangles": count })))
}

pub(super) fn nayak(ctx: &Ctx) -> CliResult<Draft> {
    let n = ctx.p.usize("n")?;
    let d = ctx.p.usize("d")?;
    let draws = ctx.p.usize("draws")?;
    ctx.p.ensure((1..=6).contains(&n), "n", "must lie in [1, 6]")?;
    ctx.p.ensure((1..=16).contains(&d), "d", "must lie in [1, 16]")?;
    ctx.p.ensure(draws > 0, "draws", "must be positive")?;
    let count = 1usize << n;
    let results = ctx.fan_out(draws, |_, rng| {
        let enc: Vec<_> = (0..count).map(|_| random_density(d, rng)).collect();
        let dec = random_povm(count, d, rng)?;
        Ok(nayak_check(&enc, &dec, d)?)
    })?;
    let worst = results.iter().map(|r| r.avg_success / r.bound).fold(0.0, f64::max);
    let failures = results.iter().filter(|r| !r.pass).count();
    let (enc, dec) = saturating_example();
    let sat = nayak_check(&enc, &dec, 2)?;
    Ok(Draft::new(Outcome::exact("max_success_over_bound", worst))
        .check("random draws within d / 2^n", failures == 0, format!("{failures} failures of {draws}"))
        .check_close("saturating example", sat.avg_success, sat.bound, 1e-12)
        .details(json!({ "n": n, "d": d, "draws": draws, "bound": results[0].bound })))
}
