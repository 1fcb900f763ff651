use std::f64::consts::SQRT_2;

use qnlcc::detect::{
    asym_lhv_to_oneway, efficiency_threshold, lhv_feasibility, pr_toy_lhv, protocol_to_lhv, quantum_chsh_table,
    ConversationCatalog, Feasibility,
};
use qnlcc::lbtools::{disjointness, equality, inner_product};
use qnlcc::nlbox::pr_correlation_table;
use serde_json::json;

use super::{Ctx, Draft};
use crate::error::{CliError, CliResult};
use crate::report::Outcome;

pub(super) fn threshold(ctx: &Ctx) -> CliResult<Draft> {
    let tol = ctx.p.f64("tol")?;
    ctx.p.ensure(tol > 0.0 && tol < 0.5, "tol", "must lie in (0, 1/2)")?;
    let target = quantum_chsh_table()?;
    let t = efficiency_threshold(&target, tol)?;
    let reference = 2.0 / (SQRT_2 + 1.0);
    let certificate = match lhv_feasibility(&target, t.infeasible_above, t.infeasible_above)? {
        Feasibility::Infeasible(c) => Some(c),
        Feasibility::Feasible(_) => None,
    };
    let violation = certificate.as_ref().map_or(0.0, |c| c.violation);
    Ok(Draft::new(Outcome::exact("critical_efficiency", t.eta))
        .reference(reference)
        .check_close("threshold", t.eta, reference, 0.01)
        .check("certificate above the threshold", violation > 1e-9, format!("violation {violation:e}"))
        .details(json!({ "bracket": t, "certificate": certificate })))
}

pub(super) fn protocol(ctx: &Ctx) -> CliResult<Draft> {
    let n = ctx.p.usize("n")?;
    ctx.p.ensure((1..=4).contains(&n), "n", "catalogs are enumerated for n <= 4")?;
    let f: fn(usize, usize) -> bool = match ctx.p.str("function")? {
        "eq" => equality,
        "ip" => inner_product,
        "disj" => disjointness,
        other => return Err(CliError::invalid("params.function", format!("unknown function `{other}`"))),
    };
    let catalog = ConversationCatalog::send_input(n, 2, |x, y| usize::from(f(x, y)))?;
    let lhv = protocol_to_lhv(&catalog)?;
    let table = lhv.conditional_table()?;
    let size = 1usize << n;
    let shape = table.shape();
    let floor = 0.5f64.powi(n as i32);
    let mut min_click: f64 = 1.0;
    let mut mismatches = 0;
    for x in 0..size {
        for y in 0..size {
            min_click = min_click.min(lhv.both_click(x, y));
            let want = catalog.outcome(x, y).expect("complete catalog");
            for a in 0..shape.outputs_a {
                for b in 0..shape.outputs_b {
                    let expect = if (a, b) == want { 1.0 } else { 0.0 };
                    if *table.get(x, y, a, b) != expect {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    Ok(Draft::new(Outcome::exact("min_joint_click", min_click))
        .reference(floor)
        .check("conditional outputs reproduce the protocol", mismatches == 0, format!("{mismatches} mismatched entries"))
        .check("joint click at least 2^-c", min_click >= floor - 1e-15, format!("{min_click} vs {floor}"))
        .check("no signalling through clicks", lhv.alice_signalling() < 1e-15, format!("{}", lhv.alice_signalling()))
        .details(json!({ "n": n, "bits": catalog.bits(), "hidden_values": lhv.hidden_values(), "efficiency": lhv.efficiency() })))
}

pub(super) fn asym(ctx: &Ctx) -> CliResult<Draft> {
    let eta = ctx.p.f64("eta")?;
    let epsilon = ctx.p.f64("epsilon")?;
    let lhv = pr_toy_lhv(eta)?;
    let proto = asym_lhv_to_oneway(&lhv, epsilon)?;
    let target = pr_correlation_table(1.0)?;
    let mut rng = ctx.setup_rng();
    let measured = proto.measured_distance(&target, ctx.trials, &mut rng);
    let exact = proto.exact_distance(&target);
    // Standard error of the L1 estimate, bounded by the sum over outcomes.
    let per = (ctx.trials / 4).max(1) as f64;
    let se = (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| proto.exact_distribution(x, y).iter().map(|q| (q * (1.0 - q) / per).sqrt()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(Draft::new(Outcome::with_error("conditional_distance", ctx.trials, measured, se))
        .reference(exact)
        .check("measured distance at most 2 epsilon", measured <= 2.0 * epsilon, format!("{measured} vs {}", 2.0 * epsilon))
        .check("exact distance at most 2 epsilon", exact <= 2.0 * epsilon + 1e-12, format!("{exact}"))
        .details(json!({ "eta": eta, "epsilon": epsilon, "k": proto.k(), "bits": proto.bits(), "error_bound": proto.error_bound() })))
}
