//! The near-extremal symmetric construction: the value-normalized Krawchouk
//! profile `k_s` (via its three-term recurrence), truncated at the first
//! sign change, with exact-rational and log-float diagnostics.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::inequalities::{InequalityId, InequalityReport, VerifyParams};
use crate::measure::ProductMeasure;
use crate::numeric::{
    big_binomial, ln_binomial, ln_factorial_table, ln_rational, rational_to_f64, SignedLogSum,
};
use crate::symmetric::{NumericMode, SymmetricProfile};

/// Hard cap for the exact-rational mode.
pub const EXACT_CAP: usize = 400;
/// Hard cap for the log-float mode.
pub const LOGFLOAT_CAP: usize = 10_000;

/// Exact-rational scalars of a build (exact mode only).
#[derive(Debug, Clone)]
pub struct ExactKrawchouk {
    pub mean: BigRational,
    pub second_moment: BigRational,
    pub sigma2: BigRational,
    pub dirichlet: BigRational,
    pub level1_sum: BigRational,
    pub support_fraction: BigRational,
    pub neighbor_margin_min: BigRational,
}

impl ExactKrawchouk {
    /// `E(f,f) <= 4 s E f^2`, decided in exact arithmetic.
    pub fn energy_bound_holds(&self, s: usize) -> bool {
        self.dirichlet <= BigRational::from_integer(BigInt::from(4 * s)) * &self.second_moment
    }

    /// `N(r) >= (n - 2s) f(r)` on the support, decided in exact arithmetic.
    pub fn neighbor_bound_holds(&self) -> bool {
        !self.neighbor_margin_min.is_negative()
    }
}

/// f64 diagnostics of a build.
#[derive(Debug, Clone)]
pub struct KrawchoukDiagnostics {
    pub support_fraction: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub dirichlet: f64,
    /// `min_{r <= m} N(r) - (n-2s) f(r)`; zero up to the truncation level by
    /// the recurrence itself.
    pub neighbor_margin_min: f64,
    /// `sum_i hat f({i})` under this crate's character convention (negative
    /// for these nonincreasing profiles).
    pub level1_sum: f64,
    /// `ln |level1_sum|`, usable when the value itself underflows.
    pub ln_abs_level1_sum: f64,
    pub profile_nonincreasing: bool,
    pub regime_warning: Option<String>,
}

/// A truncated Krawchouk profile with diagnostics.
#[derive(Debug, Clone)]
pub struct KrawchoukBuild {
    pub n: usize,
    pub s: usize,
    pub mode: NumericMode,
    /// Truncation level `m`: the profile is positive on `0..=m` and the
    /// entry at `m + 1` is the first non-positive one.
    pub truncation: usize,
    /// The function `f_s`: `k_s` on levels `0..=m`, zero above.
    pub profile: SymmetricProfile,
    /// Full exact profile `k_s(0..=n)` (exact mode).
    pub profile_exact: Option<Vec<BigRational>>,
    pub exact: Option<ExactKrawchouk>,
    pub diagnostics: KrawchoukDiagnostics,
}

fn exact_profile(n: usize, s: usize) -> Vec<BigRational> {
    let mut k = Vec::with_capacity(n + 1);
    k.push(BigRational::one());
    let c = BigRational::from_integer(BigInt::from(n as i64 - 2 * s as i64));
    for r in 0..n {
        let prev = if r >= 1 { k[r - 1].clone() } else { BigRational::zero() };
        let next = (&c * &k[r] - BigRational::from_integer(BigInt::from(r)) * prev)
            / BigRational::from_integer(BigInt::from(n - r));
        k.push(next);
    }
    k
}

fn float_profile(n: usize, s: usize) -> Vec<f64> {
    let mut k = Vec::with_capacity(n + 1);
    k.push(1.0);
    let c = n as f64 - 2.0 * s as f64;
    for r in 0..n {
        let prev = if r >= 1 { k[r - 1] } else { 0.0 };
        k.push((c * k[r] - r as f64 * prev) / (n - r) as f64);
    }
    k
}

/// Largest `m` with `k(r) > 0` for all `r <= m` (the first root of `K_s`
/// lies in `(m, m+1]`).
fn truncation_level<T: PartialOrd + Zero>(k: &[T]) -> usize {
    let mut m = 0;
    for (j, v) in k.iter().enumerate().skip(1) {
        if *v <= T::zero() {
            break;
        }
        m = j;
    }
    m
}

/// Builds `f_s` on `n` coordinates. Exact mode runs the recurrence and all
/// diagnostics in rational arithmetic; log-float mode uses f64 values with
/// log-domain level weights.
pub fn krawchouk_build(n: usize, s: usize, mode: NumericMode) -> Result<KrawchoukBuild> {
    if n < 2 {
        return Err(Error::DimensionOutOfRange { n, max: LOGFLOAT_CAP });
    }
    if s < 1 || s > n {
        return Err(Error::parameter(format!("s = {s} outside 1..={n}")));
    }
    let cap = match mode {
        NumericMode::Exact => EXACT_CAP,
        NumericMode::LogFloat => LOGFLOAT_CAP,
    };
    if n > cap {
        return Err(Error::DimensionOutOfRange { n, max: cap });
    }
    let regime_warning = if s > n / 4 {
        Some(format!("s = {s} above the recommended range 1..={}", n / 4))
    } else {
        None
    };
    match mode {
        NumericMode::Exact => build_exact(n, s, regime_warning),
        NumericMode::LogFloat => build_logfloat(n, s, regime_warning),
    }
}

fn build_exact(n: usize, s: usize, regime_warning: Option<String>) -> Result<KrawchoukBuild> {
    let k = exact_profile(n, s);
    debug_assert!(recurrence_residuals_vanish(n, s, &k));
    let m = truncation_level(&k);
    let f = |r: usize| -> BigRational {
        if r <= m {
            k[r].clone()
        } else {
            BigRational::zero()
        }
    };
    let neighbor = |r: usize| -> BigRational {
        let lo = if r >= 1 { f(r - 1) } else { BigRational::zero() };
        let hi = if r + 1 <= n { f(r + 1) } else { BigRational::zero() };
        BigRational::from_integer(BigInt::from(r)) * lo
            + BigRational::from_integer(BigInt::from(n - r)) * hi
    };

    let mut sum_mean = BigRational::zero();
    let mut sum_second = BigRational::zero();
    let mut sum_fn = BigRational::zero();
    let mut sum_level1 = BigRational::zero();
    let mut sum_support = BigInt::zero();
    let mut margin_min: Option<BigRational> = None;
    let n_minus_2s = BigRational::from_integer(BigInt::from(n as i64 - 2 * s as i64));
    for r in 0..=m {
        let b = BigInt::from(big_binomial(n, r));
        let bq = BigRational::from_integer(b.clone());
        let fr = f(r);
        let nr = neighbor(r);
        sum_mean += &bq * &fr;
        sum_second += &bq * &fr * &fr;
        sum_fn += &bq * &fr * &nr;
        sum_level1 +=
            &bq * BigRational::from_integer(BigInt::from(2 * r as i64 - n as i64)) * &fr;
        sum_support += b;
        let margin = nr - &n_minus_2s * fr;
        margin_min = Some(match margin_min {
            None => margin,
            Some(cur) => {
                if margin < cur {
                    margin
                } else {
                    cur
                }
            }
        });
    }
    let two_n = BigRational::new(BigInt::one(), BigInt::from(2).pow(n as u32));
    let mean = &sum_mean * &two_n;
    let second = &sum_second * &two_n;
    let f_dot_n = &sum_fn * &two_n;
    let level1 = &sum_level1 * &two_n;
    let support = BigRational::from_integer(sum_support) * &two_n;
    let dirichlet =
        BigRational::from_integer(BigInt::from(2 * n)) * &second - BigRational::from_integer(BigInt::from(2)) * f_dot_n;
    let sigma2 = &second - &mean * &mean;

    let levels: Vec<f64> = (0..=n)
        .map(|r| if r <= m { rational_to_f64(&k[r]) } else { 0.0 })
        .collect();
    let profile = SymmetricProfile::new(n, levels, NumericMode::Exact)?;
    let nonincreasing = (0..m).all(|r| k[r] >= k[r + 1]);
    let ln_abs_level1 = if level1.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_rational(&level1.abs())
    };
    let diagnostics = KrawchoukDiagnostics {
        support_fraction: rational_to_f64(&support),
        mean: rational_to_f64(&mean),
        second_moment: rational_to_f64(&second),
        dirichlet: rational_to_f64(&dirichlet),
        neighbor_margin_min: rational_to_f64(margin_min.as_ref().unwrap()),
        level1_sum: rational_to_f64(&level1),
        ln_abs_level1_sum: ln_abs_level1,
        profile_nonincreasing: nonincreasing,
        regime_warning,
    };
    Ok(KrawchoukBuild {
        n,
        s,
        mode: NumericMode::Exact,
        truncation: m,
        profile,
        profile_exact: Some(k),
        exact: Some(ExactKrawchouk {
            mean,
            second_moment: second,
            sigma2,
            dirichlet,
            level1_sum: level1,
            support_fraction: support,
            neighbor_margin_min: margin_min.unwrap(),
        }),
        diagnostics,
    })
}

fn build_logfloat(n: usize, s: usize, regime_warning: Option<String>) -> Result<KrawchoukBuild> {
    let k = float_profile(n, s);
    let m = truncation_level(&k);
    let levels: Vec<f64> = (0..=n)
        .map(|r| if r <= m { k[r] } else { 0.0 })
        .collect();
    let table = ln_factorial_table(n);
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let neighbor = |r: usize| -> f64 {
        let lo = if r >= 1 { levels[r - 1] } else { 0.0 };
        let hi = if r + 1 <= n { levels[r + 1] } else { 0.0 };
        r as f64 * lo + (n - r) as f64 * hi
    };
    let mut mean = SignedLogSum::new();
    let mut second = SignedLogSum::new();
    let mut f_dot_n = SignedLogSum::new();
    let mut level1 = SignedLogSum::new();
    let mut support = SignedLogSum::new();
    let mut margin_min = f64::INFINITY;
    for r in 0..=m {
        let ln_w = ln_binomial(&table, n, r) - ln2n;
        let v = levels[r];
        let nr = neighbor(r);
        mean.add(v.signum(), ln_w + v.abs().ln());
        second.add(1.0, ln_w + 2.0 * v.abs().ln());
        f_dot_n.add((v * nr).signum(), ln_w + v.abs().ln() + nr.abs().ln());
        let l1 = 2.0 * r as f64 - n as f64;
        level1.add((l1 * v).signum(), ln_w + l1.abs().ln() + v.abs().ln());
        support.add(1.0, ln_w);
        margin_min = margin_min.min(nr - (n as f64 - 2.0 * s as f64) * v);
    }
    // E(f,f) = 2n E f^2 - 2 <f, N>, combined in the log domain.
    let mut dirichlet = SignedLogSum::new();
    let (s2_sign, s2_ln) = second.signed_ln();
    dirichlet.add(s2_sign, s2_ln + (2.0 * n as f64).ln());
    let (fn_sign, fn_ln) = f_dot_n.signed_ln();
    dirichlet.add(-fn_sign, fn_ln + 2f64.ln());

    let (_, ln_abs_level1) = level1.signed_ln();
    let profile = SymmetricProfile::new(n, levels.clone(), NumericMode::LogFloat)?;
    let nonincreasing = (0..m).all(|r| levels[r] >= levels[r + 1]);
    let diagnostics = KrawchoukDiagnostics {
        support_fraction: support.value(),
        mean: mean.value(),
        second_moment: second.value(),
        dirichlet: dirichlet.value(),
        neighbor_margin_min: margin_min,
        level1_sum: level1.value(),
        ln_abs_level1_sum: ln_abs_level1,
        profile_nonincreasing: nonincreasing,
        regime_warning,
    };
    Ok(KrawchoukBuild {
        n,
        s,
        mode: NumericMode::LogFloat,
        truncation: m,
        profile,
        profile_exact: None,
        exact: None,
        diagnostics,
    })
}

fn recurrence_residuals_vanish(n: usize, s: usize, k: &[BigRational]) -> bool {
    let c = BigRational::from_integer(BigInt::from(n as i64 - 2 * s as i64));
    (0..n).all(|r| {
        let prev = if r >= 1 { k[r - 1].clone() } else { BigRational::zero() };
        let lhs = &c * &k[r];
        let rhs = BigRational::from_integer(BigInt::from(r)) * prev
            + BigRational::from_integer(BigInt::from(n - r)) * &k[r + 1];
        lhs == rhs
    })
}

/// Report of the main inequality on `f_s` under the uniform measure, using
/// the symmetric fast path `E|d_i| = |hat f({i})| = |level1_sum| / n` valid
/// for monotone symmetric functions.
///
/// The context carries `log_ratio`, the support fraction, and the exponent
/// gap `delta` with `support = exp(-(1 - delta) 2s)`. Builds with
/// `s < sqrt(n)` are flagged degenerate (outside the regime where the
/// construction is near-extremal).
pub fn near_tightness_report(n: usize, s: usize) -> Result<InequalityReport> {
    let mode = if n <= EXACT_CAP {
        NumericMode::Exact
    } else {
        NumericMode::LogFloat
    };
    let build = krawchouk_build(n, s, mode)?;
    let d = &build.diagnostics;

    let (ln_sigma2, energy_over_2sigma2, sigma2) = match &build.exact {
        Some(e) => (
            ln_rational(&e.sigma2),
            rational_to_f64(&(&e.dirichlet / (BigRational::from_integer(BigInt::from(2)) * &e.sigma2))),
            rational_to_f64(&e.sigma2),
        ),
        None => {
            let sigma2 = d.second_moment - d.mean * d.mean;
            (sigma2.ln(), d.dirichlet / (2.0 * sigma2), sigma2)
        }
    };
    let ln_lhs = 2.0 * d.ln_abs_level1_sum - (n as f64).ln();
    let ln_rhs = ln_sigma2 - energy_over_2sigma2;
    let log_ratio = ln_lhs - ln_rhs;
    let lhs = ln_lhs.exp();
    let rhs = ln_rhs.exp();

    let slack = lhs - rhs;
    let params = VerifyParams::default();
    let mut degenerate = None;
    if (s as f64) < (n as f64).sqrt() {
        degenerate = Some("below_sqrt_n_regime".to_string());
    }
    if !d.profile_nonincreasing {
        degenerate = Some("profile_not_monotone_fast_path_invalid".to_string());
    }
    let support = d.support_fraction;
    let delta = 1.0 + support.ln() / (2.0 * s as f64);
    let mut context = std::collections::BTreeMap::new();
    context.insert("measure".into(), serde_json::Value::from(format!("uniform({n})")));
    context.insert(
        "function".into(),
        serde_json::Value::from(format!("krawchouk:n={n},s={s}")),
    );
    context.insert("mode".into(), serde_json::Value::from(match build.mode {
        NumericMode::Exact => "exact",
        NumericMode::LogFloat => "logfloat",
    }));
    context.insert("truncation_m".into(), serde_json::Value::from(build.truncation));
    context.insert("log_ratio".into(), serde_json::Value::from(log_ratio));
    context.insert("sigma2".into(), serde_json::Value::from(sigma2));
    context.insert("dirichlet".into(), serde_json::Value::from(d.dirichlet));
    context.insert("second_moment".into(), serde_json::Value::from(d.second_moment));
    context.insert("support_fraction".into(), serde_json::Value::from(support));
    context.insert("delta".into(), serde_json::Value::from(delta));
    context.insert("constant".into(), serde_json::Value::from(2.0));
    context.insert("tol".into(), serde_json::Value::from(params.tol));
    Ok(InequalityReport {
        id: InequalityId::Main,
        n,
        lhs,
        rhs,
        ratio: log_ratio.exp(),
        slack,
        satisfied: degenerate.is_some() || slack >= -params.tol,
        tol: params.tol,
        degenerate,
        context,
    })
}

/// Convenience: verifies the fast-path left side against the dense
/// martingale computation (dense caps permitting).
pub fn dense_main_lhs(build: &KrawchoukBuild) -> Result<f64> {
    let dense = build.profile.to_dense()?;
    let mu = ProductMeasure::uniform(build.n);
    let dec = crate::analysis::martingale(
        &dense,
        &mu,
        &crate::measure::CoordinateOrdering::natural(build.n),
    )?;
    Ok(dec.sum_sq_e_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_err;

    #[test]
    fn s1_closed_form() {
        // k_1(r) = (n - 2r)/n, truncation just below n/2.
        for n in [5usize, 10, 11] {
            let b = krawchouk_build(n, 1, NumericMode::Exact).unwrap();
            let k = b.profile_exact.as_ref().unwrap();
            for r in 0..=n {
                let expect = BigRational::new(
                    BigInt::from(n as i64 - 2 * r as i64),
                    BigInt::from(n),
                );
                assert_eq!(k[r], expect, "n={n} r={r}");
            }
            assert_eq!(b.truncation, n.div_ceil(2) - 1);
        }
    }

    #[test]
    fn exact_recurrence_residuals_are_zero() {
        for (n, s) in [(30usize, 3usize), (50, 7), (61, 11)] {
            let b = krawchouk_build(n, s, NumericMode::Exact).unwrap();
            assert!(recurrence_residuals_vanish(n, s, b.profile_exact.as_ref().unwrap()));
        }
    }

    #[test]
    fn k1_untruncated_profile_is_mean_zero() {
        // sum_r binom(n,r) (n - 2r)/n = 0 exactly.
        let n = 10;
        let k = exact_profile(n, 1);
        let mut total = BigRational::zero();
        for (r, v) in k.iter().enumerate() {
            total += BigRational::from_integer(BigInt::from(big_binomial(n, r))) * v;
        }
        assert!(total.is_zero());
    }

    #[test]
    fn logfloat_matches_exact_profiles_up_to_n60() {
        for n in [20usize, 41, 60] {
            for s in 1..=(n / 4) {
                let e = krawchouk_build(n, s, NumericMode::Exact).unwrap();
                let f = krawchouk_build(n, s, NumericMode::LogFloat).unwrap();
                assert_eq!(e.truncation, f.truncation, "n={n} s={s}");
                for r in 0..=e.truncation {
                    let exact = e.profile.level(r);
                    let approx = f.profile.level(r);
                    assert!(
                        rel_err(exact, approx) < 1e-8,
                        "n={n} s={s} r={r}: {exact} vs {approx}"
                    );
                }
                for (a, b) in [
                    (e.diagnostics.second_moment, f.diagnostics.second_moment),
                    (e.diagnostics.dirichlet, f.diagnostics.dirichlet),
                    (e.diagnostics.level1_sum, f.diagnostics.level1_sum),
                    (e.diagnostics.support_fraction, f.diagnostics.support_fraction),
                ] {
                    assert!(rel_err(a, b) < 1e-7, "n={n} s={s}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn energy_and_neighbor_bounds_hold_exactly() {
        let b = krawchouk_build(100, 10, NumericMode::Exact).unwrap();
        let e = b.exact.as_ref().unwrap();
        assert!(e.energy_bound_holds(10));
        assert!(e.neighbor_bound_holds());
        // The recurrence makes the margin exactly zero below the truncation.
        assert!(e.neighbor_margin_min.is_zero());
        assert!(b.diagnostics.profile_nonincreasing);
        assert!(b.diagnostics.regime_warning.is_none());
        assert!(krawchouk_build(100, 30, NumericMode::Exact)
            .unwrap()
            .diagnostics
            .regime_warning
            .is_some());
    }

    #[test]
    fn fast_path_lhs_matches_dense_martingale() {
        // Symmetric monotone fast path: sum_i E^2|d_i| = level1_sum^2 / n.
        let b = krawchouk_build(12, 2, NumericMode::Exact).unwrap();
        assert!(b.diagnostics.profile_nonincreasing);
        let fast = b.diagnostics.level1_sum.powi(2) / 12.0;
        let dense = dense_main_lhs(&b).unwrap();
        assert!(rel_err(fast, dense) < 1e-10, "fast={fast} dense={dense}");
    }

    #[test]
    fn near_tightness_at_100_10() {
        let report = near_tightness_report(100, 10).unwrap();
        // Frozen from the exact-rational computation of this build.
        assert!((report.ratio / 1359.01 - 1.0).abs() < 1e-3, "ratio={}", report.ratio);
        assert!(report.satisfied);
        assert!(report.degenerate.is_none());
        let log_ratio = report.context["log_ratio"].as_f64().unwrap();
        assert!(log_ratio / 20.0 <= 0.5);
        let delta = report.context["delta"].as_f64().unwrap();
        assert!((delta - 0.3001).abs() < 1e-3);
    }

    #[test]
    fn near_tightness_flags_small_s() {
        let report = near_tightness_report(100, 1).unwrap();
        assert_eq!(report.degenerate.as_deref(), Some("below_sqrt_n_regime"));
    }

    #[test]
    fn parameter_validation() {
        assert!(krawchouk_build(100, 0, NumericMode::Exact).is_err());
        assert!(krawchouk_build(100, 101, NumericMode::Exact).is_err());
        assert!(krawchouk_build(500, 10, NumericMode::Exact).is_err());
        assert!(krawchouk_build(500, 10, NumericMode::LogFloat).is_ok());
    }
}
