use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{hermitian_eigen, Operator, ProjectiveMeasurement, ONE, ZERO};
use crate::rng::SeededRng;
use crate::CONTRACT_TOL;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NayakCheck {
    /// `(1/2ⁿ) Σ_x Tr(E_x ρ_x)`.
    pub avg_success: f64,
    /// `d / 2ⁿ`.
    pub bound: f64,
    pub pass: bool,
}

fn check_positive(m: &Operator, what: &str) -> Result<()> {
    let (vals, _) = hermitian_eigen(m).map_err(|_| Error::InvalidDensity(format!("{what} is not Hermitian")))?;
    if vals.first().is_some_and(|&l| l < -CONTRACT_TOL) {
        return Err(Error::InvalidDensity(format!("{what} has eigenvalue {}", vals[0])));
    }
    Ok(())
}

/// Checks the encodings and decoders, then compares the average recovery
/// probability with `d / 2ⁿ`.
pub fn nayak_check(encodings: &[Operator], decoders: &[Operator], d: usize) -> Result<NayakCheck> {
    let count = encodings.len();
    if count == 0 || !count.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(count));
    }
    if decoders.len() != count {
        return Err(Error::LengthMismatch(count, decoders.len()));
    }
    for (x, rho) in encodings.iter().enumerate() {
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rho.dim() });
        }
        check_positive(rho, &format!("encoding {x}"))?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > CONTRACT_TOL || tr.im.abs() > CONTRACT_TOL {
            return Err(Error::InvalidDensity(format!("encoding {x} has trace {tr}")));
        }
    }
    let mut total = Operator::zeros(d);
    for (x, e) in decoders.iter().enumerate() {
        if e.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: e.dim() });
        }
        check_positive(e, &format!("decoder {x}"))?;
        total = &total + e;
    }
    let dev = total.max_abs_diff(&Operator::identity(d));
    if dev > CONTRACT_TOL {
        return Err(Error::InvalidDensity(format!("decoders sum to I ± {dev:e}")));
    }
    let avg = encodings.iter().zip(decoders).map(|(rho, e)| (e * rho).trace().re).sum::<f64>() / count as f64;
    let bound = d as f64 / count as f64;
    Ok(NayakCheck {
        avg_success: avg,
        bound,
        pass: avg <= bound + CONTRACT_TOL,
    })
}

pub fn pure_density(v: &[Complex64]) -> Result<Operator> {
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > CONTRACT_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(Operator::projector(v))
}

pub fn maximally_mixed(d: usize) -> Operator {
    Operator::identity(d).scale_real(1.0 / d as f64)
}

fn ginibre_gram(d: usize, rng: &mut SeededRng) -> Operator {
    let entries = (0..d * d).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    let g = Operator::from_entries(entries).expect("square");
    &g * &g.adjoint()
}

/// `G G† / Tr(G G†)` for a complex Gaussian `G`.
pub fn random_density(d: usize, rng: &mut SeededRng) -> Operator {
    let w = ginibre_gram(d, rng);
    let tr = w.trace().re;
    w.scale_real(1.0 / tr)
}

/// `count` positive operators `S^{−1/2} W_x S^{−1/2}` with `S = Σ_x W_x`.
pub fn random_povm(count: usize, d: usize, rng: &mut SeededRng) -> Result<Vec<Operator>> {
    let raw: Vec<Operator> = (0..count).map(|_| ginibre_gram(d, rng)).collect();
    let sum = raw.iter().fold(Operator::zeros(d), |acc, w| &acc + w);
    let (vals, vecs) = hermitian_eigen(&sum)?;
    let mut inv_sqrt = Operator::zeros(d);
    for (l, v) in vals.iter().zip(&vecs) {
        inv_sqrt = &inv_sqrt + &Operator::projector(v).scale_real(1.0 / l.sqrt());
    }
    Ok(raw.iter().map(|w| &(&inv_sqrt * w) * &inv_sqrt).collect())
}

/// Decoders from a projective measurement: outcome `k` decodes to `x = k`,
/// the remaining strings get the zero operator.
pub fn decoders_from_projective(m: &ProjectiveMeasurement, count: usize) -> Result<Vec<Operator>> {
    if m.len() > count {
        return Err(Error::param("count", "fewer strings than measurement outcomes"));
    }
    let mut out: Vec<Operator> = m.projectors().to_vec();
    out.resize(count, Operator::zeros(m.dim()));
    Ok(out)
}

/// `|0⟩⟨0|` and `|1⟩⟨1|` decoded in the computational basis.
pub fn saturating_example() -> (Vec<Operator>, Vec<Operator>) {
    let enc = vec![Operator::projector(&[ONE, ZERO]), Operator::projector(&[ZERO, ONE])];
    (enc.clone(), enc)
}
