use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// A fixed-length bit string. Position 0 is `x_1`, the leftmost character
/// of the textual form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    /// The low `n` bits of `value`, with bit `n-1` of `value` at position 0.
    pub fn from_index(value: usize, n: usize) -> Self {
        Bits((0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn random(n: usize, rng: &mut SeededRng) -> Self {
        Bits((0..n).map(|_| rng.bit()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// Inverse of [`Bits::from_index`].
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Bits) -> Result<usize> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Inner product modulo 2.
    pub fn dot(&self, other: &Bits) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).fold(false, |acc, (&a, &b)| acc ^ (a & b)))
    }

    pub fn and(&self, other: &Bits) -> Result<Bits> {
        self.check_len(other)?;
        Ok(Bits(self.0.iter().zip(&other.0).map(|(&a, &b)| a & b).collect()))
    }

    pub(crate) fn check_len(&self, other: &Bits) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let b: Bits = "0110".parse().unwrap();
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.to_index(), 6);
        assert_eq!(Bits::from_index(6, 4), b);
        assert!("01a".parse::<Bits>().is_err());
    }

    #[test]
    fn dot_and_hamming() {
        let x: Bits = "1101".parse().unwrap();
        let y: Bits = "1011".parse().unwrap();
        assert!(!x.dot(&y).unwrap());
        assert_eq!(x.hamming(&y).unwrap(), 2);
        assert!(x.dot(&"11".parse().unwrap()).is_err());
    }
}
