//! Named function families and the Krawchouk near-extremal construction.

mod krawchouk;

pub use krawchouk::{
    dense_main_lhs, krawchouk_build, near_tightness_report, ExactKrawchouk, KrawchoukBuild,
    KrawchoukDiagnostics, EXACT_CAP, LOGFLOAT_CAP,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::BooleanFunction;
use crate::numeric::{ln_binomial, ln_factorial_table, KahanSum};
use crate::symmetric::SymmetricProfile;

/// Indicator of the subcube fixing the first `t` coordinates to 1
/// (co-dimension `t`).
pub fn subcube(n: usize, t: usize) -> Result<BooleanFunction> {
    if t > n {
        return Err(Error::parameter(format!(
            "subcube co-dimension {t} exceeds n = {n}"
        )));
    }
    let mask = if t == 0 { 0 } else { (1u64 << t) - 1 };
    BooleanFunction::from_fn(n, |x| x & mask == mask)
}

/// `f(x) = x_1`.
pub fn dictator(n: usize) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, |x| x & 1 == 1)
}

/// XOR of all coordinates.
pub fn parity(n: usize) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(n, |x| x.count_ones() % 2 == 1)
}

/// Indicator of the Hamming ball of radius `r` around zero.
pub fn hamming_ball(n: usize, r: usize) -> Result<BooleanFunction> {
    if r > n {
        return Err(Error::parameter(format!("ball radius {r} exceeds n = {n}")));
    }
    BooleanFunction::from_fn(n, |x| x.count_ones() as usize <= r)
}

/// Majority of an odd number of coordinates.
pub fn majority(n: usize) -> Result<BooleanFunction> {
    if n % 2 == 0 {
        return Err(Error::parameter("majority needs an odd dimension"));
    }
    let half = (n / 2) as u32;
    BooleanFunction::from_fn(n, |x| x.count_ones() > half)
}

/// OR of `n / b` disjoint ANDs over consecutive blocks of `b` coordinates.
pub fn tribes(n: usize, b: usize) -> Result<BooleanFunction> {
    if b == 0 || n % b != 0 {
        return Err(Error::parameter(format!(
            "tribe size {b} must divide n = {n}"
        )));
    }
    let k = n / b;
    let block = (1u64 << b) - 1;
    BooleanFunction::from_fn(n, |x| {
        (0..k).any(|j| (x >> (j * b)) & block == block)
    })
}

/// Seeded random truth table; each point is 1 with probability `density`.
pub fn random_boolean(n: usize, seed: u64, density: f64) -> Result<BooleanFunction> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::parameter(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BooleanFunction::from_fn(n, |_| rng.gen_bool(density))
}

/// Scalars of a symmetric profile computed from level weights
/// `binom(n, r) / 2^n` (log-domain, so they remain usable far beyond the
/// dense caps).
#[derive(Debug, Clone)]
pub struct SymmetricAnalytics {
    pub mean: f64,
    pub second_moment: f64,
    /// `E(f,f) = 2n E f^2 - 2 <f, N>`.
    pub dirichlet: f64,
    /// `sum_i hat f({i})` under this crate's character convention.
    pub level1_sum: f64,
    /// `hat f({i})`, equal across coordinates by symmetry.
    pub level1_each: f64,
    /// Per-direction influence `E(f - f^i)^2 = E(f,f) / n`.
    pub influence_each: f64,
}

/// Value of the neighbor sum `N(r) = r p_{r-1} + (n-r) p_{r+1}`.
pub fn neighbor_sum(p: &SymmetricProfile, r: usize) -> f64 {
    let n = p.n();
    let lo = if r >= 1 { p.level(r - 1) } else { 0.0 };
    let hi = if r + 1 <= n { p.level(r + 1) } else { 0.0 };
    r as f64 * lo + (n - r) as f64 * hi
}

/// Moments, Dirichlet form, and level-1 Fourier data of a symmetric profile.
pub fn symmetric_analytics(p: &SymmetricProfile) -> SymmetricAnalytics {
    let n = p.n();
    let table = ln_factorial_table(n);
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut mean = KahanSum::new();
    let mut second = KahanSum::new();
    let mut f_dot_n = KahanSum::new();
    let mut level1 = KahanSum::new();
    for r in 0..=n {
        let w = (ln_binomial(&table, n, r) - ln2n).exp();
        let v = p.level(r);
        mean.add(w * v);
        second.add(w * v * v);
        f_dot_n.add(w * v * neighbor_sum(p, r));
        level1.add(w * (2.0 * r as f64 - n as f64) * v);
    }
    let dirichlet = 2.0 * n as f64 * second.value() - 2.0 * f_dot_n.value();
    SymmetricAnalytics {
        mean: mean.value(),
        second_moment: second.value(),
        dirichlet,
        level1_sum: level1.value(),
        level1_each: level1.value() / n as f64,
        influence_each: dirichlet / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{boolean_influences, dirichlet_form, real_influences};
    use crate::measure::ProductMeasure;
    use crate::numeric::rel_err;
    use crate::spectral::fwht;
    use crate::symmetric::NumericMode;
    use rand::{Rng, SeedableRng};

    #[test]
    fn subcube_mean_and_influences() {
        let f = subcube(8, 3).unwrap();
        assert_eq!(f.mean_uniform(), 0.125);
        let infl = boolean_influences(&f, &ProductMeasure::uniform(8)).unwrap();
        assert_eq!(&infl.values()[..3], &[0.25, 0.25, 0.25]);
        assert!(infl.values()[3..].iter().all(|&v| v == 0.0));
        assert!(subcube(4, 5).is_err());
    }

    #[test]
    fn tribes_mean_by_brute_force() {
        let f = tribes(6, 2).unwrap();
        let count = (0..64u64).filter(|&x| f.value(x)).count();
        assert_eq!(count, 37);
        assert_eq!(f.mean_uniform(), 37.0 / 64.0);
        assert!(tribes(6, 4).is_err());
    }

    #[test]
    fn tribes_influence_closed_form() {
        // I_i = 2^{-(b-1)} (1 - 2^{-b})^{k-1}, checked against brute force.
        for (b, k) in [(2usize, 2usize), (2, 3), (3, 2)] {
            let n = b * k;
            let f = tribes(n, b).unwrap();
            let infl = boolean_influences(&f, &ProductMeasure::uniform(n)).unwrap();
            let closed = 0.5f64.powi(b as i32 - 1)
                * (1.0 - 0.5f64.powi(b as i32)).powi(k as i32 - 1);
            for i in 1..=n {
                // Brute-force pivotal count.
                let stride = 1u64 << (i - 1);
                let pivotal =
                    (0..f.size()).filter(|&x| f.value(x) != f.value(x ^ stride)).count();
                assert_eq!(infl.influence(i), pivotal as f64 / f.size() as f64);
                assert!((infl.influence(i) - closed).abs() < 1e-15, "b={b} k={k} i={i}");
            }
        }
    }

    #[test]
    fn hamming_ball_and_majority() {
        let ball = hamming_ball(3, 1).unwrap();
        assert_eq!(ball.count_ones(), 4); // 1 + 3 points, balanced
        assert!(hamming_ball(3, 4).is_err());
        let maj = majority(5).unwrap();
        assert_eq!(maj.mean_uniform(), 0.5);
        assert!(maj.is_monotone());
        assert!(majority(4).is_err());
    }

    #[test]
    fn families_match_pointwise_definitions() {
        // Dense truth tables agree bit-exactly with the defining predicates.
        for n in [2usize, 5, 12] {
            let par = parity(n).unwrap();
            let dict = dictator(n).unwrap();
            for x in 0..par.size() {
                assert_eq!(par.value(x), x.count_ones() % 2 == 1);
                assert_eq!(dict.value(x), x & 1 == 1);
            }
        }
        let f = tribes(12, 3).unwrap();
        for x in 0..f.size() {
            let expect = (0..4).any(|j| (x >> (3 * j)) & 7 == 7);
            assert_eq!(f.value(x), expect);
        }
    }

    #[test]
    fn random_boolean_is_seeded() {
        let a = random_boolean(8, 42, 0.5).unwrap();
        let b = random_boolean(8, 42, 0.5).unwrap();
        let c = random_boolean(8, 43, 0.5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn symmetric_analytics_constant_profile() {
        let p = SymmetricProfile::new(10, vec![2.5; 11], NumericMode::LogFloat).unwrap();
        let a = symmetric_analytics(&p);
        assert!(a.dirichlet.abs() < 1e-12);
        assert!(a.level1_sum.abs() < 1e-12);
        assert!((a.mean - 2.5).abs() < 1e-12);
        assert!((a.second_moment - 6.25).abs() < 1e-11);
    }

    #[test]
    fn symmetric_analytics_vs_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
        let n = 12;
        let mu = ProductMeasure::uniform(n);
        for _ in 0..10 {
            let levels: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = SymmetricProfile::new(n, levels, NumericMode::LogFloat).unwrap();
            let a = symmetric_analytics(&p);
            let dense = p.to_dense().unwrap();
            assert!(rel_err(a.mean, mu.expect(dense.values())) < 1e-12);
            let sq: Vec<f64> = dense.values().iter().map(|v| v * v).collect();
            assert!(rel_err(a.second_moment, mu.expect(&sq)) < 1e-12);
            assert!((a.dirichlet - dirichlet_form(&dense, &mu).unwrap()).abs() < 1e-10);
            let spec = fwht(&dense);
            for i in 1..=n {
                assert!(
                    (spec.coeff(1 << (i - 1)) - a.level1_each).abs() < 1e-10,
                    "level-1 coefficient mismatch at i={i}"
                );
            }
            let infl = real_influences(&dense, &mu).unwrap();
            for i in 1..=n {
                assert!((infl.influence(i) - a.influence_each).abs() < 1e-10);
            }
        }
    }
}
