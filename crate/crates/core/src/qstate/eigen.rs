use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::Operator;
use crate::error::Result;
use crate::CONTRACT_TOL;

/// Largest dimension handled by exact diagonalization.
const EXACT_LIMIT: usize = 64;

fn to_dmatrix(h: &Operator) -> DMatrix<Complex64> {
    let d = h.dim();
    DMatrix::from_fn(d, d, |r, c| h.get(r, c))
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
/// Hermitian operator.
pub fn hermitian_eigen(h: &Operator) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    h.check_hermitian(CONTRACT_TOL)?;
    let eig = SymmetricEigen::new(to_dmatrix(h));
    let mut pairs: Vec<(f64, Vec<Complex64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| (l, eig.eigenvectors.column(k).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Largest eigenvalue of a Hermitian operator: exact diagonalization up to
/// dimension 64, shifted power iteration above.
pub fn max_eigenvalue(h: &Operator) -> Result<f64> {
    h.check_hermitian(CONTRACT_TOL)?;
    if h.dim() <= EXACT_LIMIT {
        let eig = SymmetricEigen::new(to_dmatrix(h));
        return Ok(eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(power_iteration(h))
}

fn power_iteration(h: &Operator) -> f64 {
    let d = h.dim();
    // Gershgorin bound makes h + shift·I positive semidefinite.
    let shift = (0..d)
        .map(|r| (0..d).map(|c| h.get(r, c).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut v: Vec<Complex64> = (0..d)
        .map(|i| Complex64::new(1.0 + 1e-3 * ((i * 7919) % 101) as f64, 0.0))
        .collect();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n0 = norm(&v);
    v.iter_mut().for_each(|z| *z /= n0);
    let mut lambda = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let mut w = h.apply_to(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += vi * shift;
        }
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>() - shift;
        let nw = norm(&w);
        if nw == 0.0 {
            return -shift;
        }
        w.iter_mut().for_each(|z| *z /= nw);
        v = w;
        if (rayleigh - lambda).abs() < 1e-13 {
            return rayleigh;
        }
        lambda = rayleigh;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn identity_and_pauli_products() {
        assert!((max_eigenvalue(&Operator::identity(4)).unwrap() - 1.0).abs() < 1e-12);
        let zz = Operator::pauli_z().tensor(&Operator::pauli_z());
        assert!((max_eigenvalue(&zz).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Operator::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(max_eigenvalue(&m).is_err());
    }

    #[test]
    fn power_iteration_matches_exact_on_large_diagonal() {
        let d = 128;
        let diag: Vec<Complex64> = (0..d).map(|i| Complex64::new((i as f64 * 0.37).sin(), 0.0)).collect();
        let expected = diag.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut rng = SeededRng::new(8);
        let u = Operator::random_unitary(d, &mut rng);
        let h = &(&u * &Operator::diagonal(&diag)) * &u.adjoint();
        let h = (&h + &h.adjoint()).scale_real(0.5);
        let got = max_eigenvalue(&h).unwrap();
        assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let mut rng = SeededRng::new(2);
        let a = Operator::random_plus_minus_one(4, &mut rng);
        let (vals, vecs) = hermitian_eigen(&a).unwrap();
        for v in &vals {
            assert!((v.abs() - 1.0).abs() < 1e-9);
        }
        for (i, u) in vecs.iter().enumerate() {
            for (j, w) in vecs.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(w).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.norm() - want).abs() < 1e-9);
            }
        }
    }
}
