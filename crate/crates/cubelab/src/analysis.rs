//! Influences, Dirichlet forms, entropy, variance, and martingale difference
//! decompositions under product measures.

use crate::error::{Error, Result};
use crate::function::{BooleanFunction, RealFunction};
use crate::measure::{CoordinateOrdering, ProductMeasure};
use crate::numeric::KahanSum;

/// Which definition of influence a vector carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceFlavor {
    /// `Pr_mu[f(x) != f(x + e_i)]` for boolean functions.
    BooleanProbability,
    /// `E_mu (f - f^i)^2` for real-valued functions.
    RealQuadratic,
}

/// Per-coordinate influences `I_1..I_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceVector {
    values: Vec<f64>,
    flavor: InfluenceFlavor,
}

impl InfluenceVector {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn flavor(&self) -> InfluenceFlavor {
        self.flavor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Influence of coordinate `i` (1-based).
    pub fn influence(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// `sum_i I_i` — for boolean functions the normalized edge boundary.
    pub fn total(&self) -> f64 {
        crate::numeric::ksum(self.values.iter().copied())
    }

    /// `sum_i I_i^2`.
    pub fn sum_squares(&self) -> f64 {
        crate::numeric::ksum(self.values.iter().map(|v| v * v))
    }

    /// Largest influence with its 1-based coordinate; ties broken by the
    /// smallest index.
    pub fn max_with_index(&self) -> (usize, f64) {
        let mut best = (1, self.values[0]);
        for (idx, &v) in self.values.iter().enumerate().skip(1) {
            if v > best.1 {
                best = (idx + 1, v);
            }
        }
        best
    }
}

/// Influences of a boolean function. Under the uniform measure this is exact
/// integer edge counting (one division at the end); under a biased product
/// measure the disagreement probability is accumulated from point weights.
pub fn boolean_influences(
    f: &BooleanFunction,
    mu: &ProductMeasure,
) -> Result<InfluenceVector> {
    if f.n() != mu.n() {
        return Err(Error::parameter("function and measure dimensions differ"));
    }
    let values = if mu.is_uniform() {
        let half = (f.size() / 2) as f64;
        f.boundary_edge_counts()
            .into_iter()
            .map(|edges| edges as f64 / half)
            .collect()
    } else {
        let w = mu.weights();
        (1..=f.n())
            .map(|i| {
                let stride = 1u64 << (i - 1);
                let mut acc = KahanSum::new();
                for x in 0..f.size() {
                    if f.value(x) != f.value(x ^ stride) {
                        acc.add(w[x as usize]);
                    }
                }
                acc.value()
            })
            .collect()
    };
    Ok(InfluenceVector {
        values,
        flavor: InfluenceFlavor::BooleanProbability,
    })
}

/// Influences `E_mu (f - f^i)^2` of a real-valued function.
pub fn real_influences(f: &RealFunction, mu: &ProductMeasure) -> Result<InfluenceVector> {
    if f.n() != mu.n() {
        return Err(Error::parameter("function and measure dimensions differ"));
    }
    let w = mu.weights();
    let values = (1..=f.n())
        .map(|i| {
            let stride = 1u64 << (i - 1);
            let mut acc = KahanSum::new();
            for x in 0..f.size() {
                let d = f.value(x) - f.value(x ^ stride);
                acc.add(w[x as usize] * d * d);
            }
            acc.value()
        })
        .collect();
    Ok(InfluenceVector {
        values,
        flavor: InfluenceFlavor::RealQuadratic,
    })
}

/// Dirichlet form `E(f, f) = sum_i E_mu (f - f^i)^2`. For a boolean
/// function this equals the total influence.
pub fn dirichlet_form(f: &RealFunction, mu: &ProductMeasure) -> Result<f64> {
    Ok(real_influences(f, mu)?.total())
}

/// `sigma^2(f) = E f^2 - E^2 f`, computed from the centered second moment so
/// it is nonnegative by construction and exactly zero for constants.
pub fn variance(f: &RealFunction, mu: &ProductMeasure) -> Result<f64> {
    if f.n() != mu.n() {
        return Err(Error::parameter("function and measure dimensions differ"));
    }
    let first = f.value(0);
    if f.values().iter().all(|&v| v == first) {
        return Ok(0.0);
    }
    let w = mu.weights();
    let mean = mu.expect(f.values());
    let mut acc = KahanSum::new();
    for (wi, vi) in w.iter().zip(f.values()) {
        let c = vi - mean;
        acc.add(wi * c * c);
    }
    Ok(acc.value())
}

/// Entropy functional `Ent(g) = E g log g - E g log E g` for nonnegative
/// `g`, with the exact convention `0 log 0 = 0`. The zero function has zero
/// entropy.
pub fn entropy(g: &RealFunction, mu: &ProductMeasure) -> Result<f64> {
    if g.n() != mu.n() {
        return Err(Error::parameter("function and measure dimensions differ"));
    }
    if let Some(bad) = g.values().iter().position(|&v| v < 0.0) {
        return Err(Error::NegativeValue {
            index: bad,
            value: g.value(bad as u64),
        });
    }
    let w = mu.weights();
    let mut mean = KahanSum::new();
    let mut glng = KahanSum::new();
    for (wi, &vi) in w.iter().zip(g.values()) {
        mean.add(wi * vi);
        if vi > 0.0 {
            glng.add(wi * vi * vi.ln());
        }
    }
    let mean = mean.value();
    if mean <= 0.0 {
        return Ok(0.0);
    }
    Ok(glng.value() - mean * mean.ln())
}

/// The martingale difference decomposition of `f` along an ordering: the
/// conditional expectations `f_i = E(f | F_i)` with respect to the algebras
/// generated by the first `i` coordinates of the ordering, and the
/// differences `d_i = f_i - f_{i-1}`.
#[derive(Debug, Clone)]
pub struct MartingaleDecomposition {
    ordering: CoordinateOrdering,
    diffs: Vec<RealFunction>,
    e_abs: Vec<f64>,
    e_sq: Vec<f64>,
}

impl MartingaleDecomposition {
    pub fn n(&self) -> usize {
        self.diffs.len()
    }

    pub fn ordering(&self) -> &CoordinateOrdering {
        &self.ordering
    }

    /// Difference function `d_i` (1-based step index).
    pub fn diff(&self, i: usize) -> &RealFunction {
        &self.diffs[i - 1]
    }

    pub fn diffs(&self) -> &[RealFunction] {
        &self.diffs
    }

    /// `E_mu |d_i|`.
    pub fn e_abs(&self, i: usize) -> f64 {
        self.e_abs[i - 1]
    }

    /// `E_mu d_i^2`.
    pub fn e_sq(&self, i: usize) -> f64 {
        self.e_sq[i - 1]
    }

    /// `sum_i (E|d_i|)^2` — the left-hand side of the main inequality.
    pub fn sum_sq_e_abs(&self) -> f64 {
        crate::numeric::ksum(self.e_abs.iter().map(|v| v * v))
    }

    /// `sum_i E d_i^2`, equal to `sigma^2(f)` by orthogonality.
    pub fn sum_e_sq(&self) -> f64 {
        crate::numeric::ksum(self.e_sq.iter().copied())
    }
}

/// Averages out coordinate `coord` in place: each aligned pair is replaced
/// by its `(1-p, p)`-weighted mean.
fn average_out(values: &mut [f64], coord: usize, p: f64) {
    let stride = 1usize << (coord - 1);
    let len = values.len();
    let mut base = 0;
    while base < len {
        for x in base..base + stride {
            let avg = (1.0 - p) * values[x] + p * values[x + stride];
            values[x] = avg;
            values[x + stride] = avg;
        }
        base += 2 * stride;
    }
}

/// Conditional expectation of `f` given the coordinates in `keep`
/// (1-based): every other coordinate is averaged out under `mu`, leaving a
/// function constant on the atoms of the kept coordinates.
pub fn conditional_expectation(
    f: &RealFunction,
    mu: &ProductMeasure,
    keep: &[usize],
) -> Result<RealFunction> {
    let n = f.n();
    if mu.n() != n {
        return Err(Error::parameter("function and measure dimensions differ"));
    }
    let mut kept = vec![false; n + 1];
    for &c in keep {
        if c < 1 || c > n {
            return Err(Error::CoordinateOutOfRange { coord: c, n });
        }
        kept[c] = true;
    }
    let mut values = f.values().to_vec();
    for c in 1..=n {
        if !kept[c] {
            average_out(&mut values, c, mu.bias(c));
        }
    }
    RealFunction::from_values(n, values)
}

/// Streams the martingale differences of `f` from `d_n` down to `d_1`,
/// invoking `visit(i, d_i)` for each. Uses two rolling buffers; nothing is
/// retained between calls.
pub fn scan_martingale_rev(
    f: &RealFunction,
    mu: &ProductMeasure,
    ordering: &CoordinateOrdering,
    mut visit: impl FnMut(usize, &RealFunction) -> Result<()>,
) -> Result<()> {
    let n = f.n();
    if mu.n() != n || ordering.n() != n {
        return Err(Error::parameter(
            "function, measure, and ordering dimensions differ",
        ));
    }
    let mut current = f.values().to_vec();
    for i in (1..=n).rev() {
        let coord = ordering.coordinate_at(i);
        let mut lower = current.clone();
        average_out(&mut lower, coord, mu.bias(coord));
        let diff_values: Vec<f64> = current
            .iter()
            .zip(&lower)
            .map(|(a, b)| a - b)
            .collect();
        let diff = RealFunction::from_values(n, diff_values)?;
        visit(i, &diff)?;
        current = lower;
    }
    Ok(())
}

/// Full decomposition with per-step statistics.
pub fn martingale(
    f: &RealFunction,
    mu: &ProductMeasure,
    ordering: &CoordinateOrdering,
) -> Result<MartingaleDecomposition> {
    let n = f.n();
    let w = mu.weights();
    let mut diffs: Vec<Option<RealFunction>> = vec![None; n];
    let mut e_abs = vec![0.0; n];
    let mut e_sq = vec![0.0; n];
    scan_martingale_rev(f, mu, ordering, |i, d| {
        let mut abs_acc = KahanSum::new();
        let mut sq_acc = KahanSum::new();
        for (wi, &di) in w.iter().zip(d.values()) {
            abs_acc.add(wi * di.abs());
            sq_acc.add(wi * di * di);
        }
        e_abs[i - 1] = abs_acc.value();
        e_sq[i - 1] = sq_acc.value();
        diffs[i - 1] = Some(d.clone());
        Ok(())
    })?;
    Ok(MartingaleDecomposition {
        ordering: ordering.clone(),
        diffs: diffs.into_iter().map(Option::unwrap).collect(),
        e_abs,
        e_sq,
    })
}
