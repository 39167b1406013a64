//! Level-profile representation of symmetric functions: the value at a point
//! depends only on its Hamming weight, so `n + 1` numbers describe the whole
//! function. This is what carries constructions past the dense caps
//! (dimensions up to about 10^4).

use crate::error::{Error, Result};
use crate::function::{RealFunction, REAL_DENSE_CAP};

/// How the profile's numbers were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericMode {
    /// Backed by exact rational arithmetic (converted to f64 for storage).
    Exact,
    /// Plain f64 recurrences with log-domain level weights.
    LogFloat,
}

/// A symmetric function given by its values at Hamming weights `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProfile {
    n: usize,
    levels: Vec<f64>,
    mode: NumericMode,
}

impl SymmetricProfile {
    pub fn new(n: usize, levels: Vec<f64>, mode: NumericMode) -> Result<Self> {
        if n < 1 {
            return Err(Error::DimensionOutOfRange { n, max: usize::MAX });
        }
        if levels.len() != n + 1 {
            return Err(Error::TableLengthMismatch {
                n,
                got: levels.len(),
                want: n + 1,
            });
        }
        if let Some(bad) = levels.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { n, levels, mode })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn mode(&self) -> NumericMode {
        self.mode
    }

    /// Value at any point of Hamming weight `r`.
    pub fn level(&self, r: usize) -> f64 {
        self.levels[r]
    }

    /// Dense expansion `x -> levels[popcount(x)]`, available below the dense
    /// cap.
    pub fn to_dense(&self) -> Result<RealFunction> {
        if self.n > REAL_DENSE_CAP {
            return Err(Error::DimensionOutOfRange {
                n: self.n,
                max: REAL_DENSE_CAP,
            });
        }
        RealFunction::from_fn(self.n, |x| self.levels[x.count_ones() as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape() {
        assert!(SymmetricProfile::new(3, vec![0.0; 4], NumericMode::LogFloat).is_ok());
        assert!(SymmetricProfile::new(3, vec![0.0; 3], NumericMode::LogFloat).is_err());
        assert!(SymmetricProfile::new(0, vec![0.0], NumericMode::LogFloat).is_err());
        assert!(SymmetricProfile::new(1, vec![0.0, f64::INFINITY], NumericMode::LogFloat).is_err());
    }

    #[test]
    fn dense_expansion_matches_popcount() {
        let p = SymmetricProfile::new(4, vec![1.0, 0.5, 0.0, -0.5, -1.0], NumericMode::LogFloat)
            .unwrap();
        let dense = p.to_dense().unwrap();
        for x in 0..16u64 {
            assert_eq!(dense.value(x), p.level(x.count_ones() as usize));
        }
    }
}
