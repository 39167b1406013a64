//! Dense representations of functions on the discrete cube `{0,1}^n`.
//!
//! Index convention (used everywhere in this crate): points are integers
//! `x` in `0..2^n`, read LSB-first, so bit `i` of `x` is coordinate `i+1`.
//! Coordinates are 1-based in all public APIs.

use crate::error::{Error, Result};

/// Largest dimension for packed boolean truth tables (2^30 bits = 128 MiB).
pub const BOOL_DENSE_CAP: usize = 30;
/// Largest dimension for dense real-valued tables (2^24 doubles = 128 MiB).
pub const REAL_DENSE_CAP: usize = 24;

fn check_dim(n: usize, max: usize) -> Result<()> {
    if n < 1 || n > max {
        return Err(Error::DimensionOutOfRange { n, max });
    }
    Ok(())
}

fn check_coord(i: usize, n: usize) -> Result<()> {
    if i < 1 || i > n {
        return Err(Error::CoordinateOutOfRange { coord: i, n });
    }
    Ok(())
}

/// A 0/1 function on `{0,1}^n` stored as a packed bitset of `2^n` bits.
///
/// Bit `x` of the table equals `f(x)`. Unused high bits of the last word are
/// kept zero so that word-parallel kernels and comparisons stay exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    words: Vec<u64>,
}

impl BooleanFunction {
    /// Number of 64-bit words backing a table of `2^n` bits.
    fn word_count(n: usize) -> usize {
        if n >= 6 {
            1 << (n - 6)
        } else {
            1
        }
    }

    fn valid_bits_mask(n: usize) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << n)) - 1
        }
    }

    /// All-zeros function.
    pub fn zeros(n: usize) -> Result<Self> {
        check_dim(n, BOOL_DENSE_CAP)?;
        Ok(Self {
            n,
            words: vec![0; Self::word_count(n)],
        })
    }

    /// Builds a function from a point predicate.
    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut out = Self::zeros(n)?;
        for x in 0..out.size() {
            if f(x) {
                out.words[(x >> 6) as usize] |= 1u64 << (x & 63);
            }
        }
        Ok(out)
    }

    /// Builds a function on `n <= 6` variables from a machine-word truth table.
    pub fn from_word(n: usize, table: u64) -> Result<Self> {
        check_dim(n, 6)?;
        Ok(Self {
            n,
            words: vec![table & Self::valid_bits_mask(n)],
        })
    }

    /// Raw packed words (little-endian in the point index).
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    #[inline]
    pub fn value(&self, x: u64) -> bool {
        debug_assert!(x < self.size());
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    /// Number of points mapped to 1.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Expectation under the uniform measure, exact up to the final division.
    pub fn mean_uniform(&self) -> f64 {
        self.count_ones() as f64 / self.size() as f64
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.size()
    }

    /// Exact per-direction boundary edge counts: `counts[i-1]` is the number
    /// of cube edges in direction `i` with differing function values.
    pub fn boundary_edge_counts(&self) -> Vec<u64> {
        (1..=self.n)
            .map(|i| self.boundary_edges_in_direction(i))
            .collect()
    }

    /// Edges in direction `i` (1-based) crossing the boundary, exact.
    pub fn boundary_edges_in_direction(&self, i: usize) -> u64 {
        debug_assert!(i >= 1 && i <= self.n);
        let bit = i - 1;
        if bit < 6 {
            let stride = 1usize << bit;
            let mask = Self::low_half_mask(stride);
            self.words
                .iter()
                .map(|w| ((w ^ (w >> stride)) & mask).count_ones() as u64)
                .sum()
        } else {
            let ws = 1usize << (bit - 6);
            let mut edges = 0;
            for j in 0..self.words.len() {
                if j & ws == 0 {
                    edges += (self.words[j] ^ self.words[j + ws]).count_ones() as u64;
                }
            }
            edges
        }
    }

    /// Bit positions within a word whose coordinate bit (of width `stride`)
    /// is zero.
    fn low_half_mask(stride: usize) -> u64 {
        let mut m = 0u64;
        for b in 0..64 {
            if b & stride == 0 {
                m |= 1u64 << b;
            }
        }
        m
    }

    /// True iff `f(x) <= f(x | e_i)` for every point and coordinate,
    /// word-parallel.
    pub fn is_monotone(&self) -> bool {
        for bit in 0..self.n {
            if bit < 6 {
                let stride = 1usize << bit;
                let mask = Self::low_half_mask(stride);
                for w in &self.words {
                    let lo = w & mask;
                    let hi = (w >> stride) & mask;
                    if lo & !hi != 0 {
                        return false;
                    }
                }
            } else {
                let ws = 1usize << (bit - 6);
                for j in 0..self.words.len() {
                    if j & ws == 0 && self.words[j] & !self.words[j + ws] != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The function `x -> f(x ^ e_i)`.
    pub fn xor_shift(&self, i: usize) -> Result<Self> {
        check_coord(i, self.n)?;
        let bit = i - 1;
        let mut words = self.words.clone();
        if bit < 6 {
            let stride = 1usize << bit;
            let mask = Self::low_half_mask(stride);
            for w in &mut words {
                let lo = *w & mask;
                let hi = *w & !mask;
                *w = (lo << stride) | (hi >> stride);
            }
        } else {
            let ws = 1usize << (bit - 6);
            for j in 0..words.len() {
                if j & ws == 0 {
                    words.swap(j, j + ws);
                }
            }
        }
        Ok(Self { n: self.n, words })
    }

    /// Hex truth-table encoding: the table read as a big integer, printed as
    /// `max(1, 2^n/4)` uppercase hex digits (zero-padded), most significant
    /// digit first. Bit `x` of the integer equals `f(x)`.
    pub fn encode_hex(&self) -> String {
        let digits = Self::hex_digits(self.n);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let word = self.words[bit >> 6];
            let nibble = (word >> (bit & 63)) & 0xF;
            out.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
        }
        out
    }

    fn hex_digits(n: usize) -> usize {
        if n >= 2 {
            1 << (n - 2)
        } else {
            1
        }
    }

    /// Inverse of [`encode_hex`](Self::encode_hex).
    pub fn decode_hex(n: usize, hex: &str) -> Result<Self> {
        check_dim(n, BOOL_DENSE_CAP)?;
        let want = Self::hex_digits(n);
        if hex.len() != want {
            return Err(Error::HexLengthMismatch {
                n,
                got: hex.len(),
                want,
            });
        }
        let mut words = vec![0u64; Self::word_count(n)];
        for (pos, c) in hex.chars().rev().enumerate() {
            let nibble = c.to_digit(16).ok_or(Error::HexDigit(c))? as u64;
            let bit = pos * 4;
            words[bit >> 6] |= nibble << (bit & 63);
        }
        let f = Self { n, words };
        if f.words.last().unwrap() & !Self::valid_bits_mask(n) != 0 {
            // Only reachable for n = 1, where the single hex digit has two
            // spare bits.
            return Err(Error::Parameter(format!(
                "hex table {hex:?} sets bits beyond 2^{n}"
            )));
        }
        Ok(f)
    }

    /// Dense real-valued copy with values in {0.0, 1.0}.
    pub fn to_real(&self) -> Result<RealFunction> {
        check_dim(self.n, REAL_DENSE_CAP)?;
        let values = (0..self.size())
            .map(|x| if self.value(x) { 1.0 } else { 0.0 })
            .collect();
        RealFunction::from_values(self.n, values)
    }

    /// Compares truth tables as integers (equivalently, hex encodings
    /// lexicographically at fixed width).
    pub fn cmp_encoding(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.n, other.n);
        for j in (0..self.words.len()).rev() {
            match self.words[j].cmp(&other.words[j]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// A dense real-valued function on `{0,1}^n`. Values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFunction {
    n: usize,
    values: Vec<f64>,
}

impl RealFunction {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(n, REAL_DENSE_CAP)?;
        let want = 1usize << n;
        if values.len() != want {
            return Err(Error::TableLengthMismatch {
                n,
                got: values.len(),
                want,
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_values(n, vec![c; 1usize << n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(u64) -> f64) -> Result<Self> {
        check_dim(n, REAL_DENSE_CAP)?;
        Self::from_values(n, (0..1u64 << n).map(f).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, x: u64) -> f64 {
        self.values[x as usize]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// The function `x -> f(x ^ e_i)`.
    pub fn xor_shift(&self, i: usize) -> Result<Self> {
        check_coord(i, self.n)?;
        let stride = 1u64 << (i - 1);
        let values = (0..self.size()).map(|x| self.values[(x ^ stride) as usize]).collect();
        Ok(Self { n: self.n, values })
    }

    /// Splits on coordinate `i`: returns the restrictions to `x_i = 0` and
    /// `x_i = 1`, each on `n - 1` variables with the remaining coordinates
    /// kept in their original order.
    pub fn restrict_halves(&self, i: usize) -> Result<(Self, Self)> {
        check_coord(i, self.n)?;
        if self.n == 1 {
            return Err(Error::DimensionOutOfRange { n: 0, max: REAL_DENSE_CAP });
        }
        let half = 1u64 << (self.n - 1);
        let low_mask = (1u64 << (i - 1)) - 1;
        let mut v0 = Vec::with_capacity(half as usize);
        let mut v1 = Vec::with_capacity(half as usize);
        for y in 0..half {
            let lo = y & low_mask;
            let hi = (y & !low_mask) << 1;
            v0.push(self.values[(hi | lo) as usize]);
            v1.push(self.values[(hi | (1 << (i - 1)) | lo) as usize]);
        }
        Ok((
            Self { n: self.n - 1, values: v0 },
            Self { n: self.n - 1, values: v1 },
        ))
    }

    /// Inverse of [`restrict_halves`](Self::restrict_halves): reinserts
    /// coordinate `i` with `f0` on `x_i = 0` and `f1` on `x_i = 1`.
    pub fn merge_halves(f0: &Self, f1: &Self, i: usize) -> Result<Self> {
        if f0.n != f1.n {
            return Err(Error::parameter("halves have different dimensions"));
        }
        let n = f0.n + 1;
        check_dim(n, REAL_DENSE_CAP)?;
        check_coord(i, n)?;
        let low_mask = (1u64 << (i - 1)) - 1;
        let mut values = vec![0.0; 1usize << n];
        for y in 0..f0.size() {
            let lo = y & low_mask;
            let hi = (y & !low_mask) << 1;
            values[(hi | lo) as usize] = f0.values[y as usize];
            values[(hi | (1 << (i - 1)) | lo) as usize] = f1.values[y as usize];
        }
        Self::from_values(n, values)
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::parameter("dimension mismatch in subtraction"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_values(self.n, values)
    }

    /// Pointwise affine map `a*f + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| a * v + b).collect();
        Self::from_values(self.n, values)
    }

    /// Rounds to a boolean function by thresholding at 1/2.
    pub fn round_boolean(&self) -> Result<BooleanFunction> {
        BooleanFunction::from_fn(self.n, |x| self.values[x as usize] >= 0.5)
    }
}
