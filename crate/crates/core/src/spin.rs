use std::fmt;

use crate::error::{Error, Result};

/// A configuration in `{-1,+1}^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidArgument("configuration must be nonempty".into()));
        }
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpin(bad as i64));
        }
        Ok(Self { spins })
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        let spins = values
            .iter()
            .map(|&v| match v {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                other => Err(Error::InvalidSpin(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(spins)
    }

    pub fn all_up(n: usize) -> Self {
        assert!(n > 0);
        Self { spins: vec![1; n] }
    }

    /// Configuration whose bits (LSB = site 0) mark the `+1` sites.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        assert!(n > 0 && n <= 64);
        let spins = (0..n).map(|i| if (bits >> i) & 1 == 1 { 1 } else { -1 }).collect();
        Self { spins }
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn get(&self, i: usize) -> f64 {
        self.spins[i] as f64
    }

    pub fn flip(&mut self, i: usize) {
        self.spins[i] = -self.spins[i];
    }

    pub fn set(&mut self, i: usize, up: bool) {
        self.spins[i] = if up { 1 } else { -1 };
    }

    pub fn sum(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    /// Number of `+1` sites.
    pub fn up_count(&self) -> usize {
        self.spins.iter().filter(|&&s| s == 1).count()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.n() as f64
    }

    pub fn negated(&self) -> Self {
        Self { spins: self.spins.iter().map(|&s| -s).collect() }
    }

    /// Inverse of [`SpinConfig::from_bits`]; only meaningful for `n <= 64`.
    pub fn to_bits(&self) -> u64 {
        self.spins
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &s)| if s == 1 { acc | (1 << i) } else { acc })
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.spins.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_values() {
        assert_eq!(SpinConfig::from_i64(&[1, 0, -1]), Err(Error::InvalidSpin(0)));
        assert!(SpinConfig::new(vec![]).is_err());
    }

    #[test]
    fn bit_roundtrip_and_mean() {
        let x = SpinConfig::from_bits(0b1011, 4);
        assert_eq!(x.spins(), &[1, 1, -1, 1]);
        assert_eq!(x.to_bits(), 0b1011);
        assert_eq!(x.mean(), 0.5);
        assert_eq!(x.up_count(), 3);
        assert_eq!(x.to_string(), "1 1 -1 1");
    }
}
