//! Lower-bound tooling: communication matrices, exact rank, rectangles and
//! discrepancy, Lindsey's lemma and the Nayak encoding bound.

mod discrepancy;
mod nayak;

pub use discrepancy::{discrepancy, lindsey_check, rectangle_discrepancy, Discrepancy, DiscrepancyMode, InputDistribution, LindseyCheck, Rectangle};
pub use nayak::{
    decoders_from_projective, maximally_mixed, nayak_check, pure_density, random_density, random_povm, saturating_example,
    NayakCheck,
};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_MATRIX_N: usize = 12;
pub const MAX_RANK_N: usize = 10;

/// `M_f(x, y) = f(x, y)` over `{0,1}ⁿ × {0,1}ⁿ`, with strings encoded as
/// integers (first bit most significant).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommMatrix {
    n: usize,
    entries: Vec<u8>,
}

pub fn comm_matrix(n: usize, f: impl Fn(usize, usize) -> bool) -> Result<CommMatrix> {
    if n > MAX_MATRIX_N {
        return Err(Error::param("n", format!("communication matrices are limited to n ≤ {MAX_MATRIX_N}")));
    }
    let size = 1usize << n;
    let mut entries = Vec::with_capacity(size * size);
    for x in 0..size {
        for y in 0..size {
            entries.push(u8::from(f(x, y)));
        }
    }
    Ok(CommMatrix { n, entries })
}

pub fn equality(x: usize, y: usize) -> bool {
    x == y
}

/// `x · y mod 2`.
pub fn inner_product(x: usize, y: usize) -> bool {
    (x & y).count_ones() % 2 == 1
}

pub fn disjointness(x: usize, y: usize) -> bool {
    x & y == 0
}

impl CommMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.entries[x * self.size() + y] == 1
    }

    pub fn row(&self, x: usize) -> &[u8] {
        let s = self.size();
        &self.entries[x * s..(x + 1) * s]
    }

    /// `(−1)^{M(x,y)}` as integers.
    pub fn sign_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.size())
            .map(|x| self.row(x).iter().map(|&v| if v == 1 { -1 } else { 1 }).collect())
            .collect()
    }

    pub fn to_integer_rows(&self) -> Vec<Vec<i64>> {
        (0..self.size()).map(|x| self.row(x).iter().map(|&v| i64::from(v)).collect()).collect()
    }

    pub fn rank(&self) -> Result<usize> {
        if self.n > MAX_RANK_N {
            return Err(Error::param("n", format!("exact rank is limited to n ≤ {MAX_RANK_N}")));
        }
        Ok(rank_exact(&self.to_integer_rows()))
    }
}

const RANK_PRIME: u64 = (1 << 61) - 1;

/// Rank over the rationals of an integer matrix.
///
/// The rank modulo a prime never exceeds the rational rank, so a full rank
/// modulo `2⁶¹ − 1` is already exact. Otherwise fraction-free (Bareiss)
/// elimination over big integers decides.
pub fn rank_exact(m: &[Vec<i64>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let r = rank_mod_p(m, RANK_PRIME);
    if r == rows.min(cols) {
        return r;
    }
    rank_bareiss(m)
}

fn rank_mod_p(m: &[Vec<i64>], p: u64) -> usize {
    let reduce = |v: i64| v.rem_euclid(p as i64) as u64;
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let inv = |a: u64| {
        let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        acc
    };
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&v| reduce(v)).collect()).collect();
    let (rows, cols) = (a.len(), a[0].len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, pr);
        let k = inv(a[rank][c]);
        let pivot: Vec<u64> = a[rank].iter().map(|&v| mulmod(v, k)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            if i <= rank || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for j in c..cols {
                row[j] = (row[j] + p - mulmod(f, pivot[j])) % p;
            }
        }
        a[rank] = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn rank_bareiss(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let (rows, cols) = (a.len(), a[0].len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, pr);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut() {
            for j in c + 1..cols {
                let v = &pivot[c] * &row[j] - &row[c] * &pivot[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = pivot[c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
