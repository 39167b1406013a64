//! Walsh–Fourier transform, noise operator, and norms under the uniform
//! measure.
//!
//! Character convention: `chi_S(x) = prod_{i in S} (2 x_i - 1)`, so that
//! monotone nondecreasing functions have nonnegative level-1 coefficients.

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::measure::ProductMeasure;
use crate::numeric::KahanSum;

/// Walsh–Fourier coefficients indexed by subset mask `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `chi_S` for the subset with bit mask `s`.
    pub fn coeff(&self, s: u64) -> f64 {
        self.coeffs[s as usize]
    }

    /// `sum_S coeffs[S]^2`, equal to `E f^2` by Parseval.
    pub fn total_weight(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &c in &self.coeffs {
            acc.add(c * c);
        }
        acc.value()
    }

    /// Fourier weight per level: `w[k] = sum_{|S| = k} coeffs[S]^2`.
    pub fn weight_by_level(&self) -> Vec<f64> {
        let mut acc = vec![KahanSum::new(); self.n + 1];
        for (s, &c) in self.coeffs.iter().enumerate() {
            acc[s.count_ones() as usize].add(c * c);
        }
        acc.iter().map(|a| a.value()).collect()
    }

    /// Inverse transform back to the point table.
    pub fn to_function(&self) -> RealFunction {
        let mut data = self.coeffs.clone();
        inverse_butterfly(&mut data);
        RealFunction::from_values(self.n, data).expect("inverse transform of finite spectrum")
    }
}

fn forward_butterfly(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        let mut i = 0;
        while i < len {
            for j in i..i + h {
                let a = data[j];
                let b = data[j + h];
                data[j] = a + b;
                data[j + h] = b - a;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

fn inverse_butterfly(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        let mut i = 0;
        while i < len {
            for j in i..i + h {
                let a = data[j];
                let b = data[j + h];
                data[j] = a - b;
                data[j + h] = a + b;
            }
            i += 2 * h;
        }
        h *= 2;
    }
}

/// Fast Walsh–Hadamard transform: `O(n 2^n)` on a scratch copy, normalized
/// by `2^{-n}` once at the end.
pub fn fwht(f: &RealFunction) -> FourierSpectrum {
    let mut data = f.values().to_vec();
    forward_butterfly(&mut data);
    let scale = 1.0 / f.size() as f64;
    for v in &mut data {
        *v *= scale;
    }
    FourierSpectrum {
        n: f.n(),
        coeffs: data,
    }
}

/// Noise operator `T_eps`: scales each level-`|S|` coefficient by
/// `eps^{|S|}`. Restricted to the hypercontractive range `eps in [0, 1]`.
pub fn noise_operator(f: &RealFunction, eps: f64) -> Result<RealFunction> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::parameter(format!(
            "noise parameter {eps} outside [0, 1]"
        )));
    }
    let mut spectrum = fwht(f);
    let mut pow = vec![1.0; f.n() + 1];
    for k in 1..=f.n() {
        pow[k] = pow[k - 1] * eps;
    }
    for (s, c) in spectrum.coeffs.iter_mut().enumerate() {
        *c *= pow[s.count_ones() as usize];
    }
    Ok(spectrum.to_function())
}

/// `(E_mu |f|^p)^{1/p}` for `p >= 1`.
pub fn p_norm(f: &RealFunction, p: f64, mu: &ProductMeasure) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::parameter(format!("norm exponent {p} < 1")));
    }
    let w = mu.weights();
    let mut acc = KahanSum::new();
    for (wi, vi) in w.iter().zip(f.values()) {
        acc.add(wi * vi.abs().powf(p));
    }
    Ok(acc.value().powf(1.0 / p))
}
