//! Prime-field helpers for polynomial fingerprints.
//!
//! A string `x` of length `n` is read as the polynomial
//! `p_x(t) = x_1 + x_2 t + ... + x_n t^{n-1}` over `F_p`.

use crate::bits::Bits;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `>= n`, by trial division.
pub fn smallest_prime_at_least(n: u64) -> u64 {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Field size used for strings of length `n`: the smallest prime `>= 3n`.
pub fn modulus_for(n: usize) -> u64 {
    smallest_prime_at_least(3 * n as u64)
}

/// `p_x(t) mod p`, by Horner's rule.
pub fn poly_eval(x: &Bits, t: u64, p: u64) -> u64 {
    let t = t % p;
    x.as_slice().iter().rev().fold(0u64, |acc, &b| (acc * t + b as u64) % p)
}

/// Number of points `a in F_p` with `p_x(a) = p_y(a)`.
pub fn agreement_count(x: &Bits, y: &Bits, p: u64) -> u64 {
    (0..p).filter(|&a| poly_eval(x, a, p) == poly_eval(y, a, p)).count() as u64
}

/// `ceil(log2 v)` for `v >= 1`.
pub fn ceil_log2(v: u64) -> usize {
    if v <= 1 {
        0
    } else {
        (64 - (v - 1).leading_zeros()) as usize
    }
}
