use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Binary term-selection vector. Serializes as an array of 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct StructureMask(Vec<bool>);

impl StructureMask {
    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// From 0/1 values; anything nonzero is a set bit.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut m = Self::zeros(len);
        for &i in indices {
            m.0[i] = true;
        }
        m
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

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Cardinality (number of set bits).
    pub fn cardinality(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Indices of set bits, ascending.
    pub fn set_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        Ok(())
    }

    /// `self ∧ ¬other`.
    pub fn and_not(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a && !b).collect()))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| u8::from(b)).collect()
    }
}

impl fmt::Display for StructureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for StructureMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(serde::de::Error::custom(format!("mask entries must be 0 or 1, got {bad}")));
        }
        Ok(Self::from_bits(&bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_zero_one_array() {
        let m = StructureMask::from_bits(&[1, 0, 1]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[1,0,1]");
        assert_eq!(serde_json::from_str::<StructureMask>(&s).unwrap(), m);
        assert!(serde_json::from_str::<StructureMask>("[2]").is_err());
    }

    #[test]
    fn cardinality_and_ones() {
        let m = StructureMask::from_bits(&[0, 1, 1, 0, 1]);
        assert_eq!(m.cardinality(), 3);
        assert_eq!(m.set_indices().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(m.to_string(), "01101");
    }
}
