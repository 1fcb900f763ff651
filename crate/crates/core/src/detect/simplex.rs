//! Dense Phase-I simplex with Bland's rule, generic over the scalar field.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Debug;

use crate::error::{Error, Result};

/// Scalars the simplex can pivot over.
pub trait LpScalar: Clone + Debug + PartialOrd + Signed + ToPrimitive {
    /// Entries with magnitude at or below this are treated as zero.
    fn pivot_tol() -> Self;
    /// Phase-I optimum at or below this counts as feasible.
    fn feasibility_tol() -> Self;
    fn from_f64_lossy(v: f64) -> Self;
}

impl LpScalar for f64 {
    fn pivot_tol() -> Self {
        1e-9
    }

    fn feasibility_tol() -> Self {
        1e-7
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

impl LpScalar for BigRational {
    fn pivot_tol() -> Self {
        BigRational::zero()
    }

    fn feasibility_tol() -> Self {
        BigRational::zero()
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
}

/// Result of minimizing the artificial-variable sum for `A x = b, x ≥ 0`.
#[derive(Clone, Debug)]
pub struct PhaseOne<T> {
    pub feasible: bool,
    /// Sum of artificials at the optimum.
    pub objective: T,
    /// Structural variables of the final basic solution.
    pub x: Vec<T>,
    /// Dual multipliers for the original rows. When infeasible they satisfy
    /// `yᵀA ≤ 0` column-wise and `yᵀb > 0`.
    pub y: Vec<T>,
    pub pivots: usize,
}

pub fn phase_one<T: LpScalar>(a: &[Vec<T>], b: &[T]) -> Result<PhaseOne<T>> {
    let m = a.len();
    if m != b.len() {
        return Err(Error::LengthMismatch(m, b.len()));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch("ragged constraint matrix".into()));
    }
    let width = n + m + 1;
    let rhs = n + m;
    let sign: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut t: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row = vec![T::zero(); width];
            for j in 0..n {
                row[j] = if sign[i] { -a[i][j].clone() } else { a[i][j].clone() };
            }
            row[n + i] = T::one();
            row[rhs] = if sign[i] { -b[i].clone() } else { b[i].clone() };
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let cost = |j: usize| if j >= n { T::one() } else { T::zero() };
    let tol = T::pivot_tol();
    let mut pivots = 0usize;
    loop {
        let cb: Vec<T> = basis.iter().map(|&j| cost(j)).collect();
        let mut in_basis = vec![false; n + m];
        for &j in &basis {
            in_basis[j] = true;
        }
        let entering = (0..n + m).find(|&j| {
            if in_basis[j] {
                return false;
            }
            let mut r = cost(j);
            for i in 0..m {
                if !cb[i].is_zero() {
                    r = r - cb[i].clone() * t[i][j].clone();
                }
            }
            r < -tol.clone()
        });
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if t[i][e] > tol {
                let ratio = t[i][rhs].clone() / t[i][e].clone();
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::InvalidInstance("phase-one objective is unbounded".into()));
        };
        let piv = t[r][e].clone();
        for v in t[r].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
        }
        basis[r] = e;
        pivots += 1;
    }
    let cb: Vec<T> = basis.iter().map(|&j| cost(j)).collect();
    let objective = (0..m).fold(T::zero(), |acc, i| acc + cb[i].clone() * t[i][rhs].clone());
    let mut x = vec![T::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = t[i][rhs].clone();
        }
    }
    let y = (0..m)
        .map(|i| {
            let v = (0..m).fold(T::zero(), |acc, k| acc + cb[k].clone() * t[k][n + i].clone());
            if sign[i] {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(PhaseOne {
        feasible: objective <= T::feasibility_tol(),
        objective,
        x,
        y,
        pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn feasible_system() {
        // x0 + x1 = 1, x0 − x1 = 1/2.
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        let r = phase_one(&a, &[q(1, 1), q(1, 2)]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.x, vec![q(3, 4), q(1, 4)]);
    }

    #[test]
    fn infeasible_system_has_farkas_vector() {
        // x0 + x1 = 1 and x0 + x1 = 2.
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = [1.0, 2.0];
        let r = phase_one(&a, &b).unwrap();
        assert!(!r.feasible);
        for j in 0..2 {
            let col: f64 = (0..2).map(|i| r.y[i] * a[i][j]).sum();
            assert!(col <= 1e-12);
        }
        let yb: f64 = r.y.iter().zip(&b).map(|(u, v)| u * v).sum();
        assert!(yb > 0.5);
    }

    #[test]
    fn negative_rhs_rows() {
        // −x0 = −2.
        let r = phase_one(&[vec![-1.0]], &[-2.0]).unwrap();
        assert!(r.feasible);
        assert!((r.x[0] - 2.0).abs() < 1e-12);
    }
}
