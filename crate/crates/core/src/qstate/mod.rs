//! Dense state-vector core: states, operators, projective measurement and
//! sampling.

mod eigen;
mod measure;
mod operator;

pub use eigen::{hermitian_eigen, max_eigenvalue};
pub use measure::{Outcome, OutcomeDistribution, ProjectiveMeasurement};
pub use operator::Operator;
pub(crate) use operator::{ONE, ZERO};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::CONTRACT_TOL;

/// Hard cap on dense simulation size.
pub const MAX_QUBITS: usize = 22;

/// Normalized vector of `2^q` complex amplitudes. Qubit 0 is the most
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn qubits_for(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let q = len.trailing_zeros() as usize;
    if q > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: q,
            cap: MAX_QUBITS,
        });
    }
    Ok(q)
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = qubits_for(amplitudes.len())?;
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !n2.is_finite() || (n2 - 1.0).abs() > CONTRACT_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(StateVector { qubits, amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let qubits = qubits_for(amplitudes.len())?;
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let k = n2.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= k);
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        StateVector::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                qubits,
                cap: MAX_QUBITS,
            });
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn zero(qubits: usize) -> Result<Self> {
        StateVector::basis(qubits, 0)
    }

    /// `(1/√d) Σ_i |i>`.
    pub fn uniform(qubits: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        StateVector::new(vec![a; dim])
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Kronecker product with `self` on the high-order qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                qubits,
                cap: MAX_QUBITS,
            });
        }
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(StateVector { qubits, amplitudes })
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies the unitary `u` to the ordered `targets`; `targets[0]` is the
    /// most significant qubit of `u`'s index. Fails if the result leaves the
    /// unit sphere.
    pub fn apply(&self, u: &Operator, targets: &[usize]) -> Result<StateVector> {
        let amplitudes = self.apply_linear(u, targets)?;
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > CONTRACT_TOL {
            return Err(Error::NotUnitary((n2 - 1.0).abs()));
        }
        Ok(StateVector {
            qubits: self.qubits,
            amplitudes,
        })
    }

    /// Applies `u` to every qubit at once.
    pub fn apply_all(&self, u: &Operator) -> Result<StateVector> {
        let targets: Vec<usize> = (0..self.qubits).collect();
        self.apply(u, &targets)
    }

    /// Applies a one-qubit gate to each listed qubit in turn.
    pub fn apply_each(&self, gate: &Operator, qubits: &[usize]) -> Result<StateVector> {
        let mut s = self.clone();
        for &q in qubits {
            s = s.apply(gate, &[q])?;
        }
        Ok(s)
    }

    /// Multiplies each basis amplitude by `phase(index)`, which must have
    /// unit modulus.
    pub fn apply_diagonal(&self, phase: impl Fn(usize) -> Complex64) -> Result<StateVector> {
        let mut amplitudes = self.amplitudes.clone();
        for (i, a) in amplitudes.iter_mut().enumerate() {
            let p = phase(i);
            if (p.norm() - 1.0).abs() > CONTRACT_TOL {
                return Err(Error::NotUnitary((p.norm() - 1.0).abs()));
            }
            *a *= p;
        }
        Ok(StateVector {
            qubits: self.qubits,
            amplitudes,
        })
    }

    /// `|i> -> (-1)^{sign(i)} |i>`.
    pub fn apply_sign(&self, sign: impl Fn(usize) -> bool) -> StateVector {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| if sign(i) { -a } else { a })
            .collect();
        StateVector {
            qubits: self.qubits,
            amplitudes,
        }
    }

    /// Basis permutation `|i> -> |perm(i)>`. Fails unless `perm` is a
    /// bijection on the index range.
    pub fn permute(&self, perm: impl Fn(usize) -> usize) -> Result<StateVector> {
        let dim = self.dim();
        let mut amplitudes = vec![ZERO; dim];
        let mut hit = vec![false; dim];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let j = perm(i);
            if j >= dim || hit[j] {
                return Err(Error::NotUnitary(1.0));
            }
            hit[j] = true;
            amplitudes[j] = a;
        }
        Ok(StateVector {
            qubits: self.qubits,
            amplitudes,
        })
    }

    pub fn measure(&self, m: &ProjectiveMeasurement, targets: &[usize]) -> Result<OutcomeDistribution> {
        measure::measure(self, m, targets)
    }

    /// Applies an arbitrary (not necessarily unitary) operator to the
    /// targets and returns the raw amplitudes.
    pub(crate) fn apply_linear(&self, op: &Operator, targets: &[usize]) -> Result<Vec<Complex64>> {
        let k = targets.len();
        let expected = 1usize << k;
        if op.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: op.dim(),
            });
        }
        let mut mask = 0usize;
        let mut positions = Vec::with_capacity(k);
        for &t in targets {
            if t >= self.qubits {
                return Err(Error::TargetOutOfRange {
                    index: t,
                    qubits: self.qubits,
                });
            }
            let bit = 1usize << (self.qubits - 1 - t);
            if mask & bit != 0 {
                return Err(Error::DuplicateTarget(t));
            }
            mask |= bit;
            positions.push(bit);
        }
        // offsets[s] = full-index bits for sub-index s (targets[0] is the MSB of s).
        let offsets: Vec<usize> = (0..expected)
            .map(|s| {
                positions
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| (s >> (k - 1 - t)) & 1 == 1)
                    .fold(0, |acc, (_, &bit)| acc | bit)
            })
            .collect();
        let mut out = vec![ZERO; self.dim()];
        let mut gathered = vec![ZERO; expected];
        for base in 0..self.dim() {
            if base & mask != 0 {
                continue;
            }
            for (g, &off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = &op.entries()[r * expected..(r + 1) * expected];
                out[base | off] = row.iter().zip(&gathered).map(|(a, b)| a * b).sum();
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn close(a: &StateVector, b: &[Complex64], tol: f64) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tensor_basis_states() {
        let s = StateVector::basis(1, 0).unwrap().tensor(&StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(s.qubits(), 2);
        assert_eq!(s.amplitude(1), ONE);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_of_plus_states_is_uniform() {
        let plus = StateVector::zero(1).unwrap().apply(&Operator::hadamard(), &[0]).unwrap();
        let s = plus.tensor(&plus).unwrap();
        assert!(close(&s, &[c(0.5); 4], 1e-12));
    }

    #[test]
    fn apply_identity_and_hadamard() {
        let s = StateVector::uniform(3).unwrap();
        let t = s.apply(&Operator::identity(4), &[2, 0]).unwrap();
        assert!(close(&t, s.amplitudes(), 1e-15));
        let h0 = StateVector::zero(1).unwrap().apply(&Operator::hadamard(), &[0]).unwrap();
        assert!(close(&h0, &[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)], 1e-15));
    }

    #[test]
    fn rotation_pair_on_bell_state() {
        let bell = StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2]).unwrap();
        let r = Operator::rotation(FRAC_PI_4);
        let out = bell.apply(&r.tensor(&r), &[0, 1]).unwrap();
        // cos(π/2)(|00>-|11>)/√2 + sin(π/2)(|01>+|10>)/√2
        assert!(close(&out, &[c(0.0), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0)], 1e-12));
    }

    #[test]
    fn target_order_matters() {
        // CNOT with control = targets[0].
        let cnot = Operator::from_real(4, &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ])
        .unwrap();
        let s = StateVector::basis(2, 0b10).unwrap();
        assert_eq!(s.apply(&cnot, &[0, 1]).unwrap().amplitude(0b11), ONE);
        assert_eq!(s.apply(&cnot, &[1, 0]).unwrap().amplitude(0b10), ONE);
    }

    #[test]
    fn apply_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply(&Operator::hadamard(), &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.apply(&Operator::identity(4), &[1, 1]),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(matches!(
            s.apply(&Operator::hadamard(), &[2]),
            Err(Error::TargetOutOfRange { .. })
        ));
        let not_unitary = Operator::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(StateVector::uniform(1).unwrap().apply(&not_unitary, &[0]).is_err());
    }

    #[test]
    fn inner_products() {
        let s = StateVector::uniform(2).unwrap();
        assert!((s.inner(&s).unwrap() - ONE).norm() < 1e-15);
        let z0 = StateVector::basis(1, 0).unwrap();
        let z1 = StateVector::basis(1, 1).unwrap();
        assert_eq!(z0.inner(&z1).unwrap(), ZERO);
        assert!(z0.inner(&s).is_err());
    }

    #[test]
    fn construction_limits() {
        assert!(StateVector::new(vec![ONE; 3]).is_err());
        assert!(StateVector::new(vec![ONE, ONE]).is_err());
        assert!(StateVector::zero(MAX_QUBITS + 1).is_err());
        assert!(StateVector::normalized(vec![ZERO; 2]).is_err());
    }

    #[test]
    fn permute_requires_bijection() {
        let s = StateVector::uniform(2).unwrap();
        assert!(s.permute(|i| i ^ 1).is_ok());
        assert!(s.permute(|_| 0).is_err());
    }
}
