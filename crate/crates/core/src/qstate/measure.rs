use num_complex::Complex64;
use serde::Serialize;

use super::{Operator, StateVector};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::CONTRACT_TOL;

/// Probabilities below this are treated as impossible outcomes.
const PROB_FLOOR: f64 = 1e-12;

/// Complete set of orthogonal projectors with outcome labels.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Operator>,
    labels: Vec<usize>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<Operator>, labels: Vec<usize>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidMeasurement("no projectors".into()));
        }
        if projectors.len() != labels.len() {
            return Err(Error::InvalidMeasurement(format!(
                "{} projectors but {} labels",
                projectors.len(),
                labels.len()
            )));
        }
        let dim = projectors[0].dim();
        let mut sum = Operator::zeros(dim);
        for (k, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::InvalidMeasurement(format!("projector {k} has dimension {}", p.dim())));
            }
            let herm = p.hermiticity_deviation();
            let idem = (p * p).max_abs_diff(p);
            if herm > CONTRACT_TOL || idem > CONTRACT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "projector {k} is not an orthogonal projector (herm {herm:e}, idem {idem:e})"
                )));
            }
            sum = &sum + p;
        }
        let dev = sum.max_abs_diff(&Operator::identity(dim));
        if dev > CONTRACT_TOL {
            return Err(Error::InvalidMeasurement(format!("projectors sum to I only within {dev:e}")));
        }
        Ok(ProjectiveMeasurement { projectors, labels })
    }

    /// Computational basis on `qubits` qubits; label = basis index.
    pub fn computational(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let projectors = (0..dim)
            .map(|i| {
                let mut p = Operator::zeros(dim);
                p.set(i, i, super::ONE);
                p
            })
            .collect();
        ProjectiveMeasurement {
            projectors,
            labels: (0..dim).collect(),
        }
    }

    /// Rank-one projectors onto an orthonormal basis; label = position.
    pub fn from_basis(vectors: &[Vec<Complex64>]) -> Result<Self> {
        let projectors = vectors.iter().map(|v| Operator::projector(v)).collect();
        ProjectiveMeasurement::new(projectors, (0..vectors.len()).collect())
    }

    /// Eigenspace measurement of a `±1` observable: `+1 -> 0`, `-1 -> 1`.
    pub fn from_observable(a: &Operator) -> Result<Self> {
        a.check_plus_minus_one(CONTRACT_TOL)?;
        let id = Operator::identity(a.dim());
        let plus = (&id + a).scale_real(0.5);
        let minus = (&id - a).scale_real(0.5);
        ProjectiveMeasurement::new(vec![plus, minus], vec![0, 1])
    }

    /// Measurement of "apply `u`, then measure in the computational basis":
    /// projectors `u† |k><k| u`.
    pub fn after_unitary(u: &Operator) -> Result<Self> {
        u.check_unitary(CONTRACT_TOL)?;
        let comp = ProjectiveMeasurement::computational(u.qubits().ok_or(Error::NotPowerOfTwo(u.dim()))?);
        let ud = u.adjoint();
        let projectors = comp.projectors.iter().map(|p| &(&ud * p) * u).collect();
        ProjectiveMeasurement::new(projectors, comp.labels)
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of distinct outcome labels (max label + 1).
    pub fn label_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub label: usize,
    pub probability: f64,
    /// Renormalized post-measurement state; `None` for impossible outcomes.
    #[serde(skip)]
    pub state: Option<StateVector>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeDistribution {
    pub entries: Vec<Outcome>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn probability_of(&self, label: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.label == label)
            .map(|e| e.probability)
            .sum()
    }

    /// Draws an outcome. Probabilities in `[-1e-12, 0)` are clamped to zero.
    pub fn sample(&self, rng: &mut SeededRng) -> (usize, Option<StateVector>) {
        let weights: Vec<f64> = self.entries.iter().map(|e| e.probability.max(0.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.uniform() * total;
        let mut pick = None;
        for (k, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            pick = Some(k);
            if u < w {
                break;
            }
            u -= w;
        }
        let k = pick.expect("distribution has positive mass");
        let e = &self.entries[k];
        (e.label, e.state.clone())
    }
}

pub(super) fn measure(
    s: &StateVector,
    m: &ProjectiveMeasurement,
    targets: &[usize],
) -> Result<OutcomeDistribution> {
    let mut entries = Vec::with_capacity(m.len());
    for (p, &label) in m.projectors.iter().zip(&m.labels) {
        let projected = s.apply_linear(p, targets)?;
        let prob: f64 = projected.iter().map(|a| a.norm_sqr()).sum();
        let state = if prob > PROB_FLOOR {
            Some(StateVector::normalized(projected)?)
        } else {
            None
        };
        entries.push(Outcome {
            label,
            probability: prob,
            state,
        });
    }
    let total: f64 = entries.iter().map(|e| e.probability).sum();
    if (total - 1.0).abs() > CONTRACT_TOL {
        return Err(Error::InvalidMeasurement(format!("outcome probabilities sum to {total}")));
    }
    Ok(OutcomeDistribution { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn singlet() -> StateVector {
        StateVector::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).unwrap()
    }

    #[test]
    fn computational_on_zero() {
        let d = StateVector::zero(1)
            .unwrap()
            .measure(&ProjectiveMeasurement::computational(1), &[0])
            .unwrap();
        assert_eq!(d.probability_of(0), 1.0);
        assert_eq!(d.probability_of(1), 0.0);
        assert!(d.entries[1].state.is_none());
    }

    #[test]
    fn singlet_same_pauli_gives_distinct_outcomes() {
        for p in [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()] {
            let m = ProjectiveMeasurement::from_observable(&p).unwrap();
            let first = singlet().measure(&m, &[0]).unwrap();
            for e in &first.entries {
                let Some(post) = &e.state else { continue };
                let second = post.measure(&m, &[1]).unwrap();
                assert!(second.probability_of(e.label) < 1e-12);
                assert!((second.probability_of(1 - e.label) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_incomplete_measurement() {
        let p0 = Operator::projector(&[super::super::ONE, super::super::ZERO]);
        assert!(ProjectiveMeasurement::new(vec![p0], vec![0]).is_err());
        let half = Operator::identity(2).scale_real(0.5);
        assert!(ProjectiveMeasurement::new(vec![half.clone(), half], vec![0, 1]).is_err());
    }

    #[test]
    fn remeasurement_is_idempotent() {
        let mut rng = SeededRng::new(3);
        let u = Operator::random_unitary(4, &mut rng);
        let m = ProjectiveMeasurement::after_unitary(&u).unwrap();
        let s = StateVector::uniform(3).unwrap();
        let d = s.measure(&m, &[2, 0]).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-9);
        for e in &d.entries {
            if let Some(post) = &e.state {
                let again = post.measure(&m, &[2, 0]).unwrap();
                assert!((again.probability_of(e.label) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_point_masses_work() {
        let d = StateVector::zero(1)
            .unwrap()
            .measure(&ProjectiveMeasurement::computational(1), &[0])
            .unwrap();
        let mut rng = SeededRng::new(1);
        for _ in 0..100 {
            assert_eq!(d.sample(&mut rng).0, 0);
        }
        let u = StateVector::uniform(2).unwrap();
        let d = u.measure(&ProjectiveMeasurement::computational(2), &[0, 1]).unwrap();
        let a: Vec<usize> = {
            let mut r = SeededRng::new(42);
            (0..50).map(|_| d.sample(&mut r).0).collect()
        };
        let b: Vec<usize> = {
            let mut r = SeededRng::new(42);
            (0..50).map(|_| d.sample(&mut r).0).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequencies_within_four_sigma() {
        let s = StateVector::from_real(&[0.5, (0.75f64).sqrt()]).unwrap();
        let d = s.measure(&ProjectiveMeasurement::computational(1), &[0]).unwrap();
        let mut rng = SeededRng::new(99);
        let n = 100_000;
        let ones = (0..n).filter(|_| d.sample(&mut rng).0 == 1).count() as f64;
        let p = 0.75;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((ones / n as f64 - p).abs() < 4.0 * sigma);
    }
}
