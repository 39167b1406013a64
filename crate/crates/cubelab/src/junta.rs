//! Junta extraction by influence thresholding, restriction expectation
//! tables, and the isoperimetric stability probe for monotone functions.

use serde_json::{json, Value};

use crate::analysis::{boolean_influences, conditional_expectation};
use crate::error::{Error, Result};
use crate::function::{BooleanFunction, RealFunction};
use crate::measure::ProductMeasure;
use crate::numeric::KahanSum;

const TWO_OVER_LN2: f64 = 2.0 / std::f64::consts::LN_2;

/// Outcome of a junta extraction.
#[derive(Debug, Clone)]
pub struct JuntaResult {
    /// Selected coordinates (1-based, ascending).
    pub coords: Vec<usize>,
    /// Influence threshold used for selection.
    pub alpha: f64,
    /// `g = E(f | F_coords)`, constant on the atoms of the selected set.
    pub g: RealFunction,
    /// `||f - g||_2^2`.
    pub err: f64,
    /// Total influence `K`.
    pub total_influence: f64,
    /// Error target the theorem promises in its asymptotic regime.
    pub eps_promised: f64,
    /// Junta-size bound `K / alpha` reported alongside the achieved size.
    pub size_bound: f64,
    /// Boolean rounding of `g` and its own squared error against `f`.
    pub rounded: Option<(BooleanFunction, f64)>,
}

impl JuntaResult {
    pub fn to_json(&self) -> Value {
        json!({
            "coords": self.coords,
            "alpha": self.alpha,
            "err": self.err,
            "total_influence": self.total_influence,
            "eps_promised": self.eps_promised,
            "size_bound": self.size_bound,
            "size_achieved": self.coords.len(),
            "rounded_err": self.rounded.as_ref().map(|(_, e)| *e),
            "rounded_hex": self.rounded.as_ref().map(|(f, _)| f.encode_hex()),
        })
    }
}

fn squared_error(f: &RealFunction, g: &RealFunction, mu: &ProductMeasure) -> f64 {
    let w = mu.weights();
    let mut acc = KahanSum::new();
    for ((wi, &a), &b) in w.iter().zip(f.values()).zip(g.values()) {
        let d = a - b;
        acc.add(wi * d * d);
    }
    acc.value()
}

/// Extracts the coordinates with influence at least
/// `alpha = exp(-K / ((2 - delta) eps))` and projects `f` onto them. The
/// error bound `err <= eps` is promised only in the theorem's asymptotic
/// regime, so it is reported, not asserted.
pub fn extract_junta(f: &BooleanFunction, eps: f64, delta: f64) -> Result<JuntaResult> {
    if eps <= 0.0 {
        return Err(Error::parameter("eps must be positive"));
    }
    if !(0.0..2.0).contains(&delta) {
        return Err(Error::parameter("delta must lie in [0, 2)"));
    }
    if f.is_constant() {
        return Err(Error::precondition("junta extraction needs a non-constant function"));
    }
    let n = f.n();
    let mu = ProductMeasure::uniform(n);
    let infl = boolean_influences(f, &mu)?;
    let total = infl.total();
    let alpha = (-total / ((2.0 - delta) * eps)).exp();

    // Stable descending sort, then threshold; ties keep index order.
    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&a, &b| {
        infl.influence(b)
            .total_cmp(&infl.influence(a))
            .then(a.cmp(&b))
    });
    let mut coords: Vec<usize> = order
        .into_iter()
        .take_while(|&i| infl.influence(i) >= alpha)
        .collect();
    coords.sort_unstable();

    let dense = f.to_real()?;
    let g = conditional_expectation(&dense, &mu, &coords)?;
    let err = squared_error(&dense, &g, &mu);
    let rounded_fn = g.round_boolean()?;
    let rounded_err = squared_error(&dense, &rounded_fn.to_real()?, &mu);
    Ok(JuntaResult {
        coords,
        alpha,
        g,
        err,
        total_influence: total,
        eps_promised: eps,
        size_bound: total / alpha,
        rounded: Some((rounded_fn, rounded_err)),
    })
}

/// Expectations of `f` restricted to each assignment of the given
/// coordinates.
#[derive(Debug, Clone)]
pub struct RestrictionTable {
    /// The restricted coordinates (1-based, in the order given).
    pub coords: Vec<usize>,
    /// `mu_y` indexed by the assignment `y` (bit `j` of the index is the
    /// value of `coords[j]`).
    pub mu_y: Vec<f64>,
    /// `E_y mu_y`, equal to the global expectation.
    pub mean: f64,
    /// `E_y mu_y (1 - mu_y)`, equal to `||f - E(f|F_coords)||^2`.
    pub spread: f64,
}

impl RestrictionTable {
    pub fn to_json(&self) -> Value {
        json!({
            "coords": self.coords,
            "mu_y": self.mu_y,
            "mean": self.mean,
            "spread": self.spread,
        })
    }
}

/// Computes the restriction expectation table of `f` under the uniform
/// measure for up to 20 coordinates.
pub fn restriction_expectations(
    f: &BooleanFunction,
    coords: &[usize],
) -> Result<RestrictionTable> {
    let n = f.n();
    if coords.len() > 20 {
        return Err(Error::parameter("restriction tables capped at 20 coordinates"));
    }
    let mut seen = vec![false; n + 1];
    for &c in coords {
        if c < 1 || c > n {
            return Err(Error::CoordinateOutOfRange { coord: c, n });
        }
        if seen[c] {
            return Err(Error::parameter("duplicate coordinate in restriction set"));
        }
        seen[c] = true;
    }
    let k = coords.len();
    let mut counts = vec![0u64; 1 << k];
    for x in 0..f.size() {
        if f.value(x) {
            let mut y = 0usize;
            for (j, &c) in coords.iter().enumerate() {
                if (x >> (c - 1)) & 1 == 1 {
                    y |= 1 << j;
                }
            }
            counts[y] += 1;
        }
    }
    let cell = (f.size() >> k) as f64;
    let mu_y: Vec<f64> = counts.iter().map(|&c| c as f64 / cell).collect();
    let mut mean = KahanSum::new();
    let mut spread = KahanSum::new();
    let weight = 1.0 / (1u64 << k) as f64;
    for &m in &mu_y {
        mean.add(weight * m);
        spread.add(weight * m * (1.0 - m));
    }
    Ok(RestrictionTable {
        coords: coords.to_vec(),
        mu_y,
        mean: mean.value(),
        spread: spread.value(),
    })
}

/// Word-parallel monotonicity test (`f(x) <= f(x | e_i)` everywhere).
pub fn monotone_check(f: &BooleanFunction) -> bool {
    f.is_monotone()
}

/// Report of the stability probe.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub mu: f64,
    pub total_influence: f64,
    /// `(1 + eps) (2/log 2) mu log(1/mu)`.
    pub hypothesis_bound: f64,
    /// Whether the function is nearly isoperimetric in that sense.
    pub hypothesis_holds: bool,
    /// Influence threshold `mu^(1 + (1+delta) eps)`.
    pub alpha: f64,
    /// Coordinates with influence at least `alpha` (ascending).
    pub coords: Vec<usize>,
    /// Expectation after restricting those coordinates to all-ones.
    pub mu_all_ones: f64,
    /// Whether the restricted expectation reaches `2 mu`.
    pub conclusion_holds: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "mu": self.mu,
            "total_influence": self.total_influence,
            "hypothesis_bound": self.hypothesis_bound,
            "hypothesis_holds": self.hypothesis_holds,
            "alpha": self.alpha,
            "coords": self.coords,
            "coord_set_size": self.coords.len(),
            "mu_all_ones": self.mu_all_ones,
            "conclusion_holds": self.conclusion_holds,
        })
    }
}

/// Empirical probe of the stability construction for a monotone function
/// with `mu <= 1/2`: checks the near-isoperimetry hypothesis, selects the
/// high-influence coordinates at threshold `mu^(1+(1+delta) eps)`, restricts
/// them to all-ones, and reports whether the restricted expectation doubled.
pub fn stability_probe(f: &BooleanFunction, eps: f64, delta: f64) -> Result<StabilityReport> {
    if !f.is_monotone() {
        return Err(Error::precondition("stability probe needs a monotone function"));
    }
    if eps <= 0.0 || delta < 0.0 {
        return Err(Error::parameter("eps must be positive and delta nonnegative"));
    }
    let n = f.n();
    let mu = f.mean_uniform();
    if mu == 0.0 {
        return Err(Error::precondition("constant-zero function is degenerate"));
    }
    if mu > 0.5 {
        return Err(Error::precondition("stability probe needs mu <= 1/2"));
    }
    let infl = boolean_influences(f, &ProductMeasure::uniform(n))?;
    let total = infl.total();
    let bound = (1.0 + eps) * TWO_OVER_LN2 * mu * (1.0 / mu).ln();
    let alpha = mu.powf(1.0 + (1.0 + delta) * eps);
    let mut coords: Vec<usize> = (1..=n).filter(|&i| infl.influence(i) >= alpha).collect();
    coords.sort_unstable();
    let table = restriction_expectations(f, &coords)?;
    let mu_all_ones = table.mu_y[(1usize << coords.len()) - 1];
    Ok(StabilityReport {
        mu,
        total_influence: total,
        hypothesis_bound: bound,
        hypothesis_holds: total <= bound + 1e-12,
        alpha,
        coords,
        mu_all_ones,
        conclusion_holds: mu_all_ones >= 2.0 * mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dictator, majority, parity, subcube, tribes};
    use crate::search::enumerate_monotone;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parity_junta_selects_everything() {
        let f = parity(6).unwrap();
        let r = extract_junta(&f, 0.1, 0.5).unwrap();
        assert_eq!(r.total_influence, 6.0);
        assert_eq!(r.coords, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(r.err, 0.0);
        assert!(crate::numeric::rel_err(r.alpha, (-40.0f64).exp()) < 1e-12);
        // With delta -> 0 the threshold matches exp(-K / (2 eps)).
        let r0 = extract_junta(&f, 0.1, 0.0).unwrap();
        assert!(crate::numeric::rel_err(r0.alpha, (-30.0f64).exp()) < 1e-12);
        assert_eq!(r0.err, 0.0);
    }

    #[test]
    fn tribes_junta_within_budget() {
        let f = tribes(6, 2).unwrap();
        let r = extract_junta(&f, 0.3, 0.5).unwrap();
        assert!(r.err <= 0.3);
        assert!(r.coords.iter().all(|&c| (1..=6).contains(&c)));
        assert!(r.size_bound >= r.coords.len() as f64);
    }

    #[test]
    fn dictator_is_a_one_junta() {
        let f = dictator(8).unwrap();
        let r = extract_junta(&f, 0.01, 0.5).unwrap();
        assert_eq!(r.coords, vec![1]);
        assert_eq!(r.err, 0.0);
        let (rounded, rerr) = r.rounded.unwrap();
        assert_eq!(rounded, f);
        assert_eq!(rerr, 0.0);
    }

    #[test]
    fn junta_invariants_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(167);
        let mu = ProductMeasure::uniform(7);
        for _ in 0..50 {
            let f = BooleanFunction::from_fn(7, |_| rng.gen_bool(0.5)).unwrap();
            if f.is_constant() {
                continue;
            }
            let eps = rng.gen_range(0.05..0.5);
            let r = extract_junta(&f, eps, 0.5).unwrap();
            let infl = boolean_influences(&f, &mu).unwrap();
            for i in 1..=7 {
                let selected = r.coords.contains(&i);
                assert_eq!(selected, infl.influence(i) >= r.alpha, "i={i}");
            }
            // g is constant on atoms of the selected coordinates.
            let mut mask = 0u64;
            for &c in &r.coords {
                mask |= 1 << (c - 1);
            }
            for x in 0..f.size() {
                assert!((r.g.value(x) - r.g.value(x & mask)).abs() < 1e-12);
            }
            // Stored error matches an independent recomputation.
            let dense = f.to_real().unwrap();
            let recomputed = squared_error(&dense, &r.g, &mu);
            assert!((r.err - recomputed).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_error_nonincreasing_in_prefix() {
        let mut rng = ChaCha8Rng::seed_from_u64(173);
        let n = 6;
        let mu = ProductMeasure::uniform(n);
        for _ in 0..20 {
            let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5))
                .unwrap()
                .to_real()
                .unwrap();
            let mut last = f64::INFINITY;
            for r in 0..=n {
                let keep: Vec<usize> = (1..=r).collect();
                let g = conditional_expectation(&f, &mu, &keep).unwrap();
                let err = squared_error(&f, &g, &mu);
                assert!(err <= last + 1e-12);
                last = err;
            }
            assert_eq!(last, 0.0); // keeping everything reproduces f
        }
    }

    #[test]
    fn restriction_table_examples() {
        let f = subcube(8, 3).unwrap();
        let t = restriction_expectations(&f, &[1, 2, 3]).unwrap();
        assert_eq!(t.mu_y.len(), 8);
        assert_eq!(t.mu_y[7], 1.0);
        assert!(t.mu_y[..7].iter().all(|&m| m == 0.0));
        assert_eq!(t.mean, f.mean_uniform());

        let empty = restriction_expectations(&f, &[]).unwrap();
        assert_eq!(empty.mu_y, vec![f.mean_uniform()]);

        assert!(restriction_expectations(&f, &[1, 1]).is_err());
        assert!(restriction_expectations(&f, &[9]).is_err());
    }

    #[test]
    fn restriction_spread_equals_projection_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(179);
        let n = 7;
        let mu = ProductMeasure::uniform(n);
        for _ in 0..50 {
            let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5)).unwrap();
            let mut all: Vec<usize> = (1..=n).collect();
            all.shuffle(&mut rng);
            let coords = &all[..3];
            let t = restriction_expectations(&f, coords).unwrap();
            let dense = f.to_real().unwrap();
            let g = conditional_expectation(&dense, &mu, coords).unwrap();
            let err = squared_error(&dense, &g, &mu);
            assert!((t.spread - err).abs() < 1e-12);
            assert!((t.mean - f.mean_uniform()).abs() < 1e-15);
        }
    }

    #[test]
    fn stability_probe_subcube() {
        let f = subcube(10, 3).unwrap();
        let r = stability_probe(&f, 0.1, 0.5).unwrap();
        // Subcubes meet the isoperimetric bound with equality.
        assert!(r.hypothesis_holds);
        assert!((r.total_influence - 0.75).abs() < 1e-12);
        assert_eq!(r.coords, vec![1, 2, 3]);
        assert_eq!(r.mu_all_ones, 1.0);
        assert!(r.conclusion_holds);
    }

    #[test]
    fn stability_probe_majority_fails_hypothesis() {
        let f = majority(9).unwrap();
        let r = stability_probe(&f, 0.1, 0.5).unwrap();
        assert!(!r.hypothesis_holds);
    }

    #[test]
    fn stability_probe_preconditions() {
        assert!(stability_probe(&parity(4).unwrap(), 0.1, 0.5).is_err());
        let heavy = BooleanFunction::from_fn(4, |x| x != 0).unwrap();
        assert!(heavy.is_monotone());
        assert!(stability_probe(&heavy, 0.1, 0.5).is_err()); // mu > 1/2
    }

    #[test]
    fn all_ones_restriction_is_maximal_for_monotone() {
        // Exhaustive over the 168 monotone functions on 4 variables.
        for f in enumerate_monotone(4).unwrap() {
            let t = restriction_expectations(&f, &[1, 2, 3]).unwrap();
            let max = t.mu_y.iter().copied().fold(0.0f64, f64::max);
            assert_eq!(t.mu_y[7], max);
        }
    }

    #[test]
    fn doubling_lemma_on_random_monotone_functions() {
        // Whenever ||f - g||^2 <= mu - 2 mu^2 for the top-3 restriction,
        // the all-ones expectation is at least 2 mu.
        let all: Vec<BooleanFunction> = enumerate_monotone(5).unwrap().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(181);
        let mu5 = ProductMeasure::uniform(5);
        let mut applicable = 0;
        for _ in 0..500 {
            let f = &all[rng.gen_range(0..all.len())];
            let mean = f.mean_uniform();
            if mean == 0.0 || mean > 0.5 {
                continue;
            }
            let infl = boolean_influences(f, &mu5).unwrap();
            let mut order: Vec<usize> = (1..=5).collect();
            order.sort_by(|&a, &b| {
                infl.influence(b)
                    .total_cmp(&infl.influence(a))
                    .then(a.cmp(&b))
            });
            let coords: Vec<usize> = order[..3].to_vec();
            let t = restriction_expectations(f, &coords).unwrap();
            if t.spread <= mean - 2.0 * mean * mean {
                applicable += 1;
                let mu_ones = t.mu_y[7];
                assert!(
                    mu_ones >= 2.0 * mean - 1e-12,
                    "{}: mu={mean} mu_1={mu_ones}",
                    f.encode_hex()
                );
            }
        }
        assert!(applicable > 50, "lemma hypothesis should trigger often");
    }
}
