//! Product measures on the cube and coordinate orderings for martingale
//! filtrations.

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// A product probability measure `mu = (x) mu_i` with `mu_i(1) = p_i`,
/// every bias strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    p: Vec<f64>,
}

impl ProductMeasure {
    pub fn new(biases: Vec<f64>) -> Result<Self> {
        if biases.is_empty() {
            return Err(Error::DimensionOutOfRange { n: 0, max: usize::MAX });
        }
        for &p in &biases {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ProbabilityOutOfRange(p));
            }
        }
        Ok(Self { p: biases })
    }

    /// Uniform measure: every bias exactly 1/2.
    pub fn uniform(n: usize) -> Self {
        Self { p: vec![0.5; n] }
    }

    /// All coordinates share the bias `p`.
    pub fn with_bias(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn biases(&self) -> &[f64] {
        &self.p
    }

    /// Bias of coordinate `i` (1-based).
    pub fn bias(&self, i: usize) -> f64 {
        self.p[i - 1]
    }

    pub fn is_uniform(&self) -> bool {
        self.p.iter().all(|&p| p == 0.5)
    }

    /// Weight of a single point: `prod_i p_i^{x_i} (1-p_i)^{1-x_i}`.
    pub fn point_weight(&self, x: u64) -> f64 {
        let mut w = 1.0;
        for (bit, &p) in self.p.iter().enumerate() {
            w *= if (x >> bit) & 1 == 1 { p } else { 1.0 - p };
        }
        w
    }

    /// Dense table of all `2^n` point weights, built by tensor doubling so
    /// each weight is a product of n factors with no extra rounding.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![1.0];
        for &p in &self.p {
            let mut next = Vec::with_capacity(w.len() * 2);
            for &v in &w {
                next.push(v * (1.0 - p));
            }
            for &v in &w {
                next.push(v * p);
            }
            // Interleave: coordinate order is LSB-first, so the new
            // coordinate must be the most significant bit of the new index.
            w = next;
        }
        w
    }

    /// `E_mu[f]` with compensated summation.
    pub fn expect(&self, values: &[f64]) -> f64 {
        let w = self.weights();
        debug_assert_eq!(w.len(), values.len());
        let mut acc = KahanSum::new();
        for (wi, vi) in w.iter().zip(values) {
            acc.add(wi * vi);
        }
        acc.value()
    }
}

/// A permutation of `{1..n}` giving the order in which the martingale
/// filtration exposes coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateOrdering {
    perm: Vec<usize>,
}

impl CoordinateOrdering {
    /// The identity ordering `1, 2, ..., n`.
    pub fn natural(n: usize) -> Self {
        Self {
            perm: (1..=n).collect(),
        }
    }

    /// Validates that `perm` is a bijection on `1..=n`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n + 1];
        for &c in &perm {
            if c < 1 || c > n || seen[c] {
                return Err(Error::InvalidPermutation(perm));
            }
            seen[c] = true;
        }
        Ok(Self { perm })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Coordinate exposed at step `j` (1-based).
    pub fn coordinate_at(&self, j: usize) -> usize {
        self.perm[j - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// The ordering `n, 1, 2, ..., n-1` used by the half-cube induction.
    pub fn last_first(n: usize) -> Self {
        let mut perm = Vec::with_capacity(n);
        perm.push(n);
        perm.extend(1..n);
        Self { perm }
    }
}
