use serde::Serialize;

use super::simplex::{phase_one, LpScalar};
use super::Response;
use crate::bell::{correlation_from_quantum, CorrelationTable};
use crate::error::{Error, Result};
use crate::games::{chsh_game, chsh_quantum};
use crate::par::{map_indexed, Execution};

const MAX_INPUTS: usize = 4;
const MAX_OUTPUTS: usize = 2;

/// Deterministic local strategy with ⊥ allowed as an answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalStrategy {
    pub alice: Vec<Response>,
    pub bob: Vec<Response>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalMixture<T> {
    pub components: Vec<(LocalStrategy, T)>,
    /// Largest absolute constraint residual of the mixture.
    pub residual: f64,
}

/// Dual vector `y` with `yᵀA_s ≤ local_bound` for every local strategy `s`
/// and `yᵀb = target_value > local_bound`.
#[derive(Clone, Debug, Serialize)]
pub struct FarkasCertificate<T> {
    pub rows: Vec<String>,
    pub coefficients: Vec<T>,
    pub target_value: T,
    pub local_bound: T,
    /// `target_value − local_bound`.
    pub violation: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Feasibility<T> {
    Feasible(LocalMixture<T>),
    Infeasible(FarkasCertificate<T>),
}

impl<T> Feasibility<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

fn responses(inputs: usize, outputs: usize) -> Vec<Vec<Response>> {
    let radix = outputs + 1;
    let total = radix.pow(inputs as u32);
    (0..total)
        .map(|mut code| {
            (0..inputs)
                .map(|_| {
                    let r = code % radix;
                    code /= radix;
                    (r < outputs).then_some(r)
                })
                .collect()
        })
        .collect()
}

/// Can a mixture of deterministic local `{outputs, ⊥}` strategies click with
/// probability `η_A` (Alice) and `η_B` (Bob) on every input and produce
/// `η_A η_B · target` on joint clicks?
pub fn lhv_feasibility<T: LpScalar>(target: &CorrelationTable<T>, eta_a: T, eta_b: T) -> Result<Feasibility<T>> {
    let s = target.shape();
    if s.inputs_a > MAX_INPUTS || s.inputs_b > MAX_INPUTS || s.outputs_a > MAX_OUTPUTS || s.outputs_b > MAX_OUTPUTS {
        return Err(Error::AlphabetTooLarge(format!(
            "{}x{} inputs, {}x{} outputs; at most {MAX_INPUTS} inputs and {MAX_OUTPUTS} outputs per side",
            s.inputs_a, s.inputs_b, s.outputs_a, s.outputs_b
        )));
    }
    for (name, eta) in [("eta_a", &eta_a), ("eta_b", &eta_b)] {
        if eta.is_negative() || *eta > T::one() {
            return Err(Error::param(name, "must lie in [0, 1]"));
        }
    }
    let ra = responses(s.inputs_a, s.outputs_a);
    let rb = responses(s.inputs_b, s.outputs_b);
    let strategies: Vec<LocalStrategy> = ra
        .iter()
        .flat_map(|a| {
            rb.iter().map(move |b| LocalStrategy {
                alice: a.clone(),
                bob: b.clone(),
            })
        })
        .collect();
    let indicator = |hit: bool| if hit { T::one() } else { T::zero() };
    let mut rows = Vec::new();
    let mut matrix: Vec<Vec<T>> = Vec::new();
    let mut rhs = Vec::new();
    rows.push("normalization".to_string());
    matrix.push(vec![T::one(); strategies.len()]);
    rhs.push(T::one());
    let both = eta_a.clone() * eta_b.clone();
    for x in 0..s.inputs_a {
        for y in 0..s.inputs_b {
            for a in 0..s.outputs_a {
                for b in 0..s.outputs_b {
                    rows.push(format!("P({a},{b}|{x},{y})"));
                    matrix.push(strategies.iter().map(|st| indicator(st.alice[x] == Some(a) && st.bob[y] == Some(b))).collect());
                    rhs.push(both.clone() * target.get(x, y, a, b).clone());
                }
            }
        }
    }
    for x in 0..s.inputs_a {
        rows.push(format!("click_A({x})"));
        matrix.push(strategies.iter().map(|st| indicator(st.alice[x].is_some())).collect());
        rhs.push(eta_a.clone());
    }
    for y in 0..s.inputs_b {
        rows.push(format!("click_B({y})"));
        matrix.push(strategies.iter().map(|st| indicator(st.bob[y].is_some())).collect());
        rhs.push(eta_b.clone());
    }
    let sol = phase_one(&matrix, &rhs)?;
    let dot_col = |y: &[T], j: usize| (0..matrix.len()).fold(T::zero(), |acc, i| acc + y[i].clone() * matrix[i][j].clone());
    if sol.feasible {
        let mut residual: f64 = 0.0;
        for (i, row) in matrix.iter().enumerate() {
            let lhs = row.iter().zip(&sol.x).fold(T::zero(), |acc, (a, w)| acc + a.clone() * w.clone());
            residual = residual.max((lhs - rhs[i].clone()).abs().to_f64().unwrap_or(f64::INFINITY));
        }
        let components = strategies
            .into_iter()
            .zip(sol.x)
            .filter(|(_, w)| *w > T::pivot_tol())
            .collect();
        return Ok(Feasibility::Feasible(LocalMixture { components, residual }));
    }
    let target_value = sol.y.iter().zip(&rhs).fold(T::zero(), |acc, (u, v)| acc + u.clone() * v.clone());
    let local_bound = (0..strategies.len())
        .map(|j| dot_col(&sol.y, j))
        .fold(None::<T>, |best, v| match best {
            Some(b) if b >= v => Some(b),
            _ => Some(v),
        })
        .unwrap_or_else(T::zero);
    let violation = (target_value.clone() - local_bound.clone()).to_f64().unwrap_or(f64::NAN);
    Ok(Feasibility::Infeasible(FarkasCertificate {
        rows,
        coefficients: sol.y,
        target_value,
        local_bound,
        violation,
    }))
}

/// Optimal quantum CHSH correlations.
pub fn quantum_chsh_table() -> Result<CorrelationTable<f64>> {
    correlation_from_quantum(&chsh_quantum(), &chsh_game())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Threshold {
    /// Midpoint of the final bracket.
    pub eta: f64,
    /// Largest efficiency found feasible.
    pub feasible_below: f64,
    /// Smallest efficiency found infeasible.
    pub infeasible_above: f64,
    pub steps: usize,
}

/// Bisects the symmetric efficiency `η_A = η_B = η` at which the target
/// stops admitting an LHV model, to bracket width `tol`.
pub fn efficiency_threshold(target: &CorrelationTable<f64>, tol: f64) -> Result<Threshold> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let feasible = |eta: f64| lhv_feasibility(target, eta, eta).map(|f| f.is_feasible());
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut steps = 0;
    if feasible(hi)? {
        return Ok(Threshold {
            eta: 1.0,
            feasible_below: 1.0,
            infeasible_above: 1.0,
            steps,
        });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(Threshold {
        eta: 0.5 * (lo + hi),
        feasible_below: lo,
        infeasible_above: hi,
        steps,
    })
}

/// Feasibility verdicts on a grid of symmetric efficiencies.
pub fn efficiency_sweep(target: &CorrelationTable<f64>, grid: &[f64], exec: Execution) -> Result<Vec<(f64, bool)>> {
    map_indexed(exec, grid.len(), |i| lhv_feasibility(target, grid[i], grid[i]).map(|f| (grid[i], f.is_feasible())))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::Shape;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn pr_exact(p: BigRational) -> CorrelationTable<BigRational> {
        crate::nlbox::pr_correlation_table_generic(p).unwrap()
    }

    #[test]
    fn pr_box_is_not_local_at_full_efficiency() {
        let f = lhv_feasibility(&pr_exact(q(1, 1)), q(1, 1), q(1, 1)).unwrap();
        let Feasibility::Infeasible(cert) = f else { panic!("PR box must be nonlocal") };
        assert!(cert.violation > 1e-9);
    }

    #[test]
    fn local_boundary_is_feasible_exactly() {
        // PR noise p = 3/4 reaches the local CHSH bound exactly.
        assert!(lhv_feasibility(&pr_exact(q(3, 4)), q(1, 1), q(1, 1)).unwrap().is_feasible());
        assert!(!lhv_feasibility(&pr_exact(q(4, 5)), q(1, 1), q(1, 1)).unwrap().is_feasible());
    }

    #[test]
    fn quantum_chsh_half_efficiency() {
        let t = quantum_chsh_table().unwrap();
        assert!(!lhv_feasibility(&t, 1.0, 1.0).unwrap().is_feasible());
        let f = lhv_feasibility(&t, 0.5, 0.5).unwrap();
        let Feasibility::Feasible(mix) = f else { panic!("feasible below threshold") };
        assert!(mix.residual < 1e-7);
    }

    #[test]
    fn alphabet_cap() {
        let t = CorrelationTable::from_fn(Shape::new(5, 2, 2, 2), |_, _, _, _| 0.25).unwrap();
        assert!(matches!(lhv_feasibility(&t, 1.0, 1.0), Err(Error::AlphabetTooLarge(_))));
    }
}
