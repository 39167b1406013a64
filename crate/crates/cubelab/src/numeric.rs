//! Shared numeric helpers: compensated summation, log-factorials, and
//! conversions out of arbitrary-precision rationals.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, One, Signed, Zero};

/// Kahan–Babuska compensated accumulator. Keeps 2^24-point sums well below
/// 1e-10 relative error.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums an iterator with compensation.
pub fn ksum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// ln(k!) for k = 0..=n, built by compensated accumulation of ln k.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    table.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).ln());
        table.push(acc.value());
    }
    table
}

/// ln C(n, r) from a precomputed ln-factorial table.
#[inline]
pub fn ln_binomial(table: &[f64], n: usize, r: usize) -> f64 {
    table[n] - table[r] - table[n - r]
}

/// Exact binomial coefficient as a big integer.
pub fn big_binomial(n: usize, r: usize) -> BigUint {
    let r = r.min(n - r);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in 0..r {
        num *= BigUint::from(n - k);
        den *= BigUint::from(k + 1);
    }
    num / den
}

/// Natural log of a positive big integer, accurate to f64 precision even for
/// integers far beyond f64 range.
pub fn ln_bigint(value: &BigInt) -> f64 {
    assert!(value.is_positive(), "ln of non-positive big integer");
    let mag = value.magnitude();
    let bits = mag.bits();
    if bits <= 62 {
        let v: u64 = mag.try_into().expect("fits in u64");
        return (v as f64).ln();
    }
    // Keep the top 63 bits as the mantissa, track the discarded power of two.
    let shift = bits - 63;
    let top: u64 = (mag >> shift).try_into().expect("63 bits fit in u64");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(value: &BigRational) -> f64 {
    assert!(value.is_positive(), "ln of non-positive rational");
    ln_bigint(value.numer()) - ln_bigint(value.denom())
}

/// Converts a big rational to the nearest f64 via mantissa/exponent
/// extraction, so values far outside f64 range under/overflow cleanly
/// instead of rounding through infinity along the way.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let approx = |m: &BigUint| -> (f64, i64) {
        let bits = m.bits();
        if bits <= 53 {
            let v: u64 = m.try_into().expect("fits");
            (v as f64, 0)
        } else {
            let shift = bits - 53;
            let top: u64 = (m >> shift).try_into().expect("53 bits fit");
            (top as f64, shift as i64)
        }
    };
    let (nm, ne) = approx(value.numer().magnitude());
    let (dm, de) = approx(value.denom().magnitude());
    sign * (nm / dm) * ((ne - de) as f64).exp2()
}

/// Streaming signed log-sum-exp accumulator: sums terms given as
/// `sign * exp(ln_magnitude)` without leaving the log domain, so level-weight
/// sums stay usable when the magnitudes underflow f64.
#[derive(Debug, Clone)]
pub struct SignedLogSum {
    pos: LogSum,
    neg: LogSum,
}

#[derive(Debug, Clone)]
struct LogSum {
    max_ln: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            max_ln: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    fn add(&mut self, ln_value: f64) {
        if ln_value == f64::NEG_INFINITY {
            return;
        }
        if ln_value > self.max_ln {
            self.scaled = self.scaled * (self.max_ln - ln_value).exp() + 1.0;
            self.max_ln = ln_value;
        } else {
            self.scaled += (ln_value - self.max_ln).exp();
        }
    }

    fn ln_value(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max_ln + self.scaled.ln()
        }
    }
}

impl Default for SignedLogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self {
            pos: LogSum::new(),
            neg: LogSum::new(),
        }
    }

    /// Adds `sign * exp(ln_magnitude)`; zero terms pass `ln = -inf`.
    pub fn add(&mut self, sign: f64, ln_magnitude: f64) {
        if sign > 0.0 {
            self.pos.add(ln_magnitude);
        } else if sign < 0.0 {
            self.neg.add(ln_magnitude);
        }
    }

    /// Result as `(sign, ln |total|)`; `(0.0, -inf)` for an empty/cancelled sum.
    pub fn signed_ln(&self) -> (f64, f64) {
        let lp = self.pos.ln_value();
        let ln = self.neg.ln_value();
        if ln == f64::NEG_INFINITY {
            return if lp == f64::NEG_INFINITY {
                (0.0, f64::NEG_INFINITY)
            } else {
                (1.0, lp)
            };
        }
        if lp == f64::NEG_INFINITY {
            return (-1.0, ln);
        }
        if lp == ln {
            return (0.0, f64::NEG_INFINITY);
        }
        let (sign, big, small) = if lp > ln { (1.0, lp, ln) } else { (-1.0, ln, lp) };
        (sign, big + (-((small - big).exp())).ln_1p())
    }

    /// Result as an f64 (may underflow to zero for very small magnitudes).
    pub fn value(&self) -> f64 {
        let (sign, ln) = self.signed_ln();
        sign * ln.exp()
    }
}

/// Relative gap |a - b| / max(|a|, |b|), zero when both vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    #[test]
    fn kahan_handles_many_small_terms() {
        let n = 1 << 20;
        let s = ksum((0..n).map(|_| 0.1));
        assert!((s - n as f64 * 0.1).abs() / s < 1e-14);
    }

    #[test]
    fn ln_factorial_matches_direct() {
        let table = ln_factorial_table(20);
        let direct: f64 = (1..=20).map(|k| (k as f64).ln()).sum();
        assert!((table[20] - direct).abs() < 1e-12);
        assert_eq!(table[0], 0.0);
        assert_eq!(table[1], 0.0);
    }

    #[test]
    fn big_binomial_small_values() {
        assert_eq!(big_binomial(5, 2), BigUint::from(10u32));
        assert_eq!(big_binomial(10, 0), BigUint::one());
        assert_eq!(big_binomial(400, 200).bits(), 396);
    }

    #[test]
    fn ln_binomial_tracks_exact() {
        let table = ln_factorial_table(400);
        let exact = ln_bigint(&BigInt::from(big_binomial(400, 123)));
        assert!((ln_binomial(&table, 400, 123) - exact).abs() < 1e-9);
    }

    #[test]
    fn rational_to_f64_extremes() {
        let small = BigRational::new(BigInt::one(), BigInt::from(2).pow(2000));
        assert_eq!(rational_to_f64(&small), 0.0); // underflows cleanly
        let x = BigRational::from_f64(-3.25).unwrap();
        assert_eq!(rational_to_f64(&x), -3.25);
        let big = BigRational::new(BigInt::from(2).pow(1500) + 1, BigInt::from(2).pow(1490));
        assert!((rational_to_f64(&big) - 1024.0).abs() < 1e-9);
    }

    #[test]
    fn signed_log_sum_matches_direct() {
        let terms = [3.5, -1.25, 0.75, -2.999, 10.0, -9.0];
        let mut acc = SignedLogSum::new();
        for t in terms {
            acc.add(t.signum(), t.abs().ln());
        }
        let direct: f64 = terms.iter().sum();
        assert!((acc.value() - direct).abs() < 1e-12);
        // Tiny magnitudes survive in the log domain.
        let mut tiny = SignedLogSum::new();
        tiny.add(1.0, -500.0);
        tiny.add(1.0, -500.0);
        let (sign, ln) = tiny.signed_ln();
        assert_eq!(sign, 1.0);
        assert!((ln - (-500.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ln_rational_large() {
        let x = BigRational::new(BigInt::from(2).pow(4000), BigInt::from(3));
        let expect = 4000.0 * std::f64::consts::LN_2 - 3f64.ln();
        assert!((ln_rational(&x) - expect).abs() < 1e-9);
    }
}
