use num_complex::Complex64;
use serde::Serialize;

use super::{log2_exact, Channel, Party, ProtocolResult};
use crate::error::{Error, Result};
use crate::qstate::{Operator, ProjectiveMeasurement, StateVector, ONE};
use crate::rng::SeededRng;
use crate::CONTRACT_TOL;

/// Alice holds a real unit vector `v` and a split `H⁽⁰⁾ ⊕ H⁽¹⁾` (given by
/// the projector onto `H⁽⁰⁾`); Bob holds an orthogonal `U`. Promise:
/// `‖P_label U v‖² >= 2/3` for the true label.
#[derive(Clone, Debug, Serialize)]
pub struct RazInstance {
    pub m: usize,
    pub v: Vec<f64>,
    #[serde(skip)]
    pub p0: Operator,
    #[serde(skip)]
    pub u: Operator,
    pub true_label: u8,
    /// `‖P_true U v‖²`.
    pub overlap: f64,
}

fn real_state(v: &[f64]) -> Result<StateVector> {
    StateVector::from_real(v)
}

impl RazInstance {
    pub fn new(v: Vec<f64>, p0: Operator, u: Operator, true_label: u8) -> Result<Self> {
        let m = v.len();
        log2_exact(m, "m")?;
        if p0.dim() != m || u.dim() != m {
            return Err(Error::InvalidInstance("dimensions disagree".into()));
        }
        if true_label > 1 {
            return Err(Error::InvalidInstance("label must be 0 or 1".into()));
        }
        u.check_unitary(CONTRACT_TOL)
            .map_err(|e| Error::InvalidInstance(e.to_string()))?;
        let split = ProjectiveMeasurement::new(vec![p0.clone(), &Operator::identity(m) - &p0], vec![0, 1])
            .map_err(|e| Error::InvalidInstance(e.to_string()))?;
        let uv = real_state(&v)
            .map_err(|e| Error::InvalidInstance(e.to_string()))?
            .apply_all(&u)?;
        let targets: Vec<usize> = (0..uv.qubits()).collect();
        let overlap = uv.measure(&split, &targets)?.probability_of(true_label as usize);
        if overlap < 2.0 / 3.0 - CONTRACT_TOL {
            return Err(Error::InvalidInstance(format!("overlap {overlap} is below 2/3")));
        }
        Ok(RazInstance {
            m,
            v,
            p0,
            u,
            true_label,
            overlap,
        })
    }

    pub fn split(&self) -> Result<ProjectiveMeasurement> {
        ProjectiveMeasurement::new(vec![self.p0.clone(), &Operator::identity(self.m) - &self.p0], vec![0, 1])
    }
}

fn random_unit_in(basis: &[usize], m: usize, rng: &mut SeededRng) -> Vec<f64> {
    let mut w = vec![0.0; m];
    loop {
        for &i in basis {
            w[i] = rng.normal();
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-6 {
            w.iter_mut().for_each(|a| *a /= n);
            return w;
        }
    }
}

/// Random instance: orthogonal `U` by Gram–Schmidt, `H⁽⁰⁾` spanned by a
/// random half of the basis vectors, random label, and
/// `v = Uᵀ(√t·w_in + √(1−t)·w_out)` so that `‖P_label U v‖² = t`.
pub fn raz_instance_gen(m: usize, target_overlap: f64, rng: &mut SeededRng) -> Result<RazInstance> {
    log2_exact(m, "m")?;
    if !(2.0 / 3.0..=1.0).contains(&target_overlap) {
        return Err(Error::param("target_overlap", format!("{target_overlap} is outside [2/3, 1]")));
    }
    let u = Operator::random_orthogonal(m, rng);
    let h0 = rng.sample_distinct(m, m / 2);
    let mut in_h0 = vec![false; m];
    h0.iter().for_each(|&i| in_h0[i] = true);
    let h1: Vec<usize> = (0..m).filter(|&i| !in_h0[i]).collect();
    let label = u8::from(rng.bit());
    let (inside, outside) = if label == 0 { (&h0, &h1) } else { (&h1, &h0) };
    let w_in = random_unit_in(inside, m, rng);
    let w_out = random_unit_in(outside, m, rng);
    let (a, b) = (target_overlap.sqrt(), (1.0 - target_overlap).sqrt());
    let w: Vec<Complex64> = w_in.iter().zip(&w_out).map(|(i, o)| Complex64::new(a * i + b * o, 0.0)).collect();
    let v: Vec<f64> = u.transpose().apply_to(&w).iter().map(|z| z.re).collect();
    let p0 = Operator::diagonal(&(0..m).map(|i| if in_h0[i] { ONE } else { crate::qstate::ZERO }).collect::<Vec<_>>());
    RazInstance::new(v, p0, u, label)
}

/// Alice sends `v` as a `log m`-qubit state, Bob applies `U` and sends it
/// back, Alice measures `{P₀, P₁}` and outputs the label.
pub fn raz_quantum(inst: &RazInstance, rng: &mut SeededRng) -> Result<ProtocolResult<u8>> {
    let q = log2_exact(inst.m, "m")? as u64;
    let mut ch = Channel::new();
    let sent = real_state(&inst.v)?;
    ch.send_qubits(Party::Alice, "|v>", q);
    let back = sent.apply_all(&inst.u)?;
    ch.send_qubits(Party::Bob, "U|v>", q);
    let targets: Vec<usize> = (0..back.qubits()).collect();
    let dist = back.measure(&inst.split()?, &targets)?;
    let (label, _) = dist.sample(rng);
    let out = label as u8;
    let exact = dist.probability_of(inst.true_label as usize);
    Ok(ch.finish(out, Some(out == inst.true_label), Some(exact)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_instance_is_certain() {
        let p0 = Operator::diagonal(&[ONE, ONE, crate::qstate::ZERO, crate::qstate::ZERO]);
        let inst = RazInstance::new(vec![0.6, 0.8, 0.0, 0.0], p0, Operator::identity(4), 0).unwrap();
        let r = raz_quantum(&inst, &mut SeededRng::new(0)).unwrap();
        assert_eq!(r.output, 0);
        assert!((r.exact_success.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.ledger.qubits, 4);
        assert_eq!(r.ledger.rounds, 2);
    }

    #[test]
    fn generator_hits_target() {
        let mut rng = SeededRng::new(17);
        for t in [2.0 / 3.0, 0.8, 1.0] {
            let inst = raz_instance_gen(8, t, &mut rng).unwrap();
            assert!((inst.overlap - t).abs() < 1e-9);
            assert!(inst.u.is_unitary(1e-9));
        }
        assert!(raz_instance_gen(8, 0.5, &mut rng).is_err());
        assert!(raz_instance_gen(6, 0.9, &mut rng).is_err());
    }

    #[test]
    fn rejects_promise_violation() {
        let p0 = Operator::diagonal(&[ONE, crate::qstate::ZERO]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(
            RazInstance::new(vec![s, s], p0, Operator::identity(2), 0),
            Err(Error::InvalidInstance(_))
        ));
    }
}
