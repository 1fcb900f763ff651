use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Operator::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_entries(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Operator { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Operator {
            dim,
            entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Operator { dim, entries }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let mut m = Operator::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Operator::from_entries(vec![ZERO, -i, i, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Operator::from_real(2, &[h, h, h, -h]).unwrap()
    }

    /// Real rotation `[[cos t, -sin t], [sin t, cos t]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Operator::from_real(2, &[c, -s, s, c]).unwrap()
    }

    /// `H ⊗ ... ⊗ H` on `qubits` qubits.
    pub fn hadamard_n(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let norm = (dim as f64).sqrt().recip();
        Operator::from_fn(dim, |r, c| {
            let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * norm, 0.0)
        })
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                actual: v.len(),
            });
        }
        Ok(Operator::from_fn(u.len(), |r, c| u[r] * v[c].conj()))
    }

    /// Rank-one projector onto `v` (assumed normalized).
    pub fn projector(v: &[Complex64]) -> Self {
        Operator::outer(v, v).expect("same vector")
    }

    /// Haar-like random unitary from Gram-Schmidt on complex Gaussian columns.
    pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> Self {
        let cols = gram_schmidt(dim, || Complex64::new(rng.normal(), rng.normal()));
        Operator::from_fn(dim, |r, c| cols[c][r])
    }

    /// Random real orthogonal matrix.
    pub fn random_orthogonal(dim: usize, rng: &mut SeededRng) -> Self {
        let cols = gram_schmidt(dim, || Complex64::new(rng.normal(), 0.0));
        Operator::from_fn(dim, |r, c| cols[c][r])
    }

    /// `U diag(±1) U†` with random signs and a random unitary `U`.
    pub fn random_plus_minus_one(dim: usize, rng: &mut SeededRng) -> Self {
        let u = Operator::random_unitary(dim, rng);
        let signs: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(if rng.bit() { 1.0 } else { -1.0 }, 0.0))
            .collect();
        &(&u * &Operator::diagonal(&signs)) * &u.adjoint()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Operator::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> Self {
        Operator::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(Complex64::new(k, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; `self` indexes the high-order part.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let d = self.dim * other.dim;
        Operator::from_fn(d, |r, c| {
            self.get(r / other.dim, c / other.dim) * other.get(r % other.dim, c % other.dim)
        })
    }

    pub fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| {
                self.entries[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    /// Checks that `self` is Hermitian and squares to the identity, i.e. an
    /// observable with eigenvalues in `{+1, -1}`.
    pub fn check_plus_minus_one(&self, tol: f64) -> Result<()> {
        self.check_hermitian(tol)?;
        let dev = (self * self).max_abs_diff(&Operator::identity(self.dim));
        if dev > tol {
            return Err(Error::NotPlusMinusOne(dev));
        }
        Ok(())
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let d = self.dim;
        let mut out = Operator::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

fn gram_schmidt(dim: usize, mut draw: impl FnMut() -> Complex64) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| draw()).collect();
        for q in &cols {
            let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Near-dependent draws are discarded and redrawn.
        if norm < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    cols
}
