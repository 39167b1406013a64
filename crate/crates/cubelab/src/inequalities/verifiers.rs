//! Per-identifier verifier implementations.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::analysis::{
    boolean_influences, dirichlet_form, entropy, real_influences, scan_martingale_rev, variance,
};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::measure::{CoordinateOrdering, ProductMeasure};
use crate::numeric::KahanSum;
use crate::spectral::{noise_operator, p_norm};

use super::{log_sobolev_constant, InequalityId, InequalityReport, VerifyInput, VerifyParams};

const TWO_OVER_LN2: f64 = 2.0 / std::f64::consts::LN_2;

struct ReportBuilder {
    id: InequalityId,
    n: usize,
    tol: f64,
    rel_tol: f64,
    degenerate: Option<String>,
    context: BTreeMap<String, Value>,
}

impl ReportBuilder {
    fn new(id: InequalityId, n: usize, mu: &ProductMeasure, params: &VerifyParams) -> Self {
        let mut context = BTreeMap::new();
        let measure = if mu.is_uniform() {
            format!("uniform({n})")
        } else {
            format!("product({:?})", mu.biases())
        };
        context.insert("measure".into(), Value::from(measure));
        if let Some(label) = &params.label {
            context.insert("function".into(), Value::from(label.clone()));
        }
        Self {
            id,
            n,
            tol: params.tol,
            rel_tol: params.rel_tol,
            degenerate: None,
            context,
        }
    }

    fn ctx(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.context.insert(key.into(), value.into());
        self
    }

    fn degenerate(mut self, reason: &str) -> Self {
        self.degenerate = Some(reason.into());
        self
    }

    /// Finalizes an `lhs >= rhs` statement with absolute slack tolerance.
    fn inequality(mut self, lhs: f64, rhs: f64) -> InequalityReport {
        let slack = lhs - rhs;
        let satisfied = self.degenerate.is_some() || slack >= -self.tol;
        self.context
            .insert("tol".into(), Value::from(self.tol));
        self.context
            .insert("tolerance_mode".into(), Value::from("absolute_slack"));
        InequalityReport {
            id: self.id,
            n: self.n,
            lhs,
            rhs,
            ratio: if rhs != 0.0 { lhs / rhs } else { f64::INFINITY },
            slack,
            satisfied,
            tol: self.tol,
            degenerate: self.degenerate,
            context: self.context,
        }
    }

    /// Finalizes an identity with relative tolerance.
    fn identity(mut self, lhs: f64, rhs: f64) -> InequalityReport {
        let slack = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs());
        let satisfied = scale == 0.0 || slack.abs() <= self.rel_tol * scale;
        self.context.insert("tol".into(), Value::from(self.rel_tol));
        self.context
            .insert("tolerance_mode".into(), Value::from("relative"));
        InequalityReport {
            id: self.id,
            n: self.n,
            lhs,
            rhs,
            ratio: if rhs != 0.0 { lhs / rhs } else { f64::INFINITY },
            slack,
            satisfied,
            tol: self.rel_tol,
            degenerate: self.degenerate,
            context: self.context,
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::precondition(msg.to_string()))
    }
}

fn ordering_or_natural(params: &VerifyParams, n: usize) -> Result<CoordinateOrdering> {
    match &params.ordering {
        Some(ord) => {
            require(ord.n() == n, "ordering dimension does not match the function")?;
            Ok(ord.clone())
        }
        None => Ok(CoordinateOrdering::natural(n)),
    }
}

fn split_coordinate(params: &VerifyParams, n: usize) -> Result<usize> {
    let k = params.split_coordinate.unwrap_or(n);
    require(k >= 1 && k <= n, "split coordinate out of range")?;
    require(n >= 2, "half-cube statements need n >= 2")?;
    Ok(k)
}

/// Martingale summary used by MAIN / CNJ_SOB / LOG_SOB_MARTINGALE / DI_BOUND.
struct MartingaleStats {
    e_abs: Vec<f64>,
    e_sq: Vec<f64>,
    diff_energy: Vec<f64>,
    diff_square_entropy: Vec<f64>,
}

fn martingale_stats(
    f: &RealFunction,
    mu: &ProductMeasure,
    ordering: &CoordinateOrdering,
) -> Result<MartingaleStats> {
    let n = f.n();
    let w = mu.weights();
    let mut stats = MartingaleStats {
        e_abs: vec![0.0; n],
        e_sq: vec![0.0; n],
        diff_energy: vec![0.0; n],
        diff_square_entropy: vec![0.0; n],
    };
    scan_martingale_rev(f, mu, ordering, |i, d| {
        let mut abs_acc = KahanSum::new();
        let mut sq_acc = KahanSum::new();
        for (wi, &di) in w.iter().zip(d.values()) {
            abs_acc.add(wi * di.abs());
            sq_acc.add(wi * di * di);
        }
        stats.e_abs[i - 1] = abs_acc.value();
        stats.e_sq[i - 1] = sq_acc.value();
        stats.diff_energy[i - 1] = dirichlet_form(d, mu)?;
        let d_sq =
            RealFunction::from_values(n, d.values().iter().map(|v| v * v).collect())?;
        stats.diff_square_entropy[i - 1] = entropy(&d_sq, mu)?;
        Ok(())
    })?;
    Ok(stats)
}

pub(super) fn dispatch(
    id: InequalityId,
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    require(
        input.n() == mu.n(),
        "function and measure dimensions differ",
    )?;
    if id.requires_boolean() {
        require(
            input.boolean().is_some(),
            "this statement is only defined for boolean functions",
        )?;
    }
    if id.requires_uniform() {
        require(
            mu.is_uniform(),
            "this statement is tied to the uniform measure",
        )?;
    }
    match id {
        InequalityId::EdgeIso => edge_iso(input, mu, params),
        InequalityId::FuncIso => func_iso(input, mu, params),
        InequalityId::LogSob => log_sob(input, mu, params),
        InequalityId::KklSum => kkl_family(id, input, mu, params),
        InequalityId::KklAsymptotic => kkl_asymptotic(input, mu, params),
        InequalityId::Talagrand => talagrand(input, mu, params),
        InequalityId::Main => main_inequality(input, mu, params),
        InequalityId::CnjBool => kkl_family(id, input, mu, params),
        InequalityId::CnjSob => martingale_log_sob(id, input, mu, params),
        InequalityId::LogSobMartingale => martingale_log_sob(id, input, mu, params),
        InequalityId::FkSum | InequalityId::FkMax => fk_family(id, input, mu, params),
        InequalityId::Bonami => bonami(input, mu, params),
        InequalityId::EnergyAdd => energy_add(input, mu, params),
        InequalityId::SobIsop => sob_isop(input, mu, params),
        InequalityId::DiBound => di_bound(input, mu, params),
        InequalityId::HalfcubeId => halfcube_id(input, mu, params),
        InequalityId::VarDist => var_dist(input, mu, params),
        InequalityId::EntDecomp => ent_decomp(input, mu, params),
        InequalityId::AppbCs => appb_cs(input, mu, params),
    }
}

/// `sum I_i >= (2/log 2) mu log(1/mu)` for boolean `f` with `mu <= 1/2`.
fn edge_iso(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.boolean().unwrap();
    let mean = f.mean_uniform();
    let b = ReportBuilder::new(InequalityId::EdgeIso, f.n(), mu, params).ctx("mu", mean);
    if mean == 0.0 {
        return Ok(b.degenerate("constant_zero_function").inequality(0.0, 0.0));
    }
    require(mean <= 0.5, "EDGE_ISO requires expectation mu <= 1/2")?;
    let infl = boolean_influences(f, mu)?;
    let lhs = infl.total();
    let rhs = TWO_OVER_LN2 * mean * (1.0 / mean).ln();
    Ok(b.ctx("sum_influence", lhs).inequality(lhs, rhs))
}

/// `E(f,f) >= C * E f^2 log(E f^2 / E^2 f)` for nonnegative `f` (the
/// functional isoperimetric inequality; `C = 2` under the uniform measure,
/// the measure's log-Sobolev constant in general).
fn func_iso(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    require(f.is_nonnegative(), "FUNC_ISO requires a nonnegative function")?;
    let constant = params.constant.unwrap_or_else(|| log_sobolev_constant(mu));
    let mean = mu.expect(f.values());
    let second = mu.expect(&f.values().iter().map(|v| v * v).collect::<Vec<_>>());
    let b = ReportBuilder::new(InequalityId::FuncIso, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("second_moment", second)
        .ctx("constant", constant);
    if second == 0.0 {
        return Ok(b.degenerate("zero_function").inequality(0.0, 0.0));
    }
    let lhs = dirichlet_form(&f, mu)?;
    if mean == 0.0 {
        // Unreachable for f >= 0 under a strictly positive product measure,
        // kept as the documented limit convention.
        return Ok(b
            .degenerate("zero_mean_limit")
            .inequality(lhs, f64::INFINITY));
    }
    let rhs = constant * second * (second / (mean * mean)).ln();
    Ok(b.inequality(lhs, rhs))
}

/// `E(f,f) >= C * Ent(f^2)` with the measure's log-Sobolev constant.
fn log_sob(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let constant = params.constant.unwrap_or_else(|| log_sobolev_constant(mu));
    let f_sq = RealFunction::from_values(f.n(), f.values().iter().map(|v| v * v).collect())?;
    let lhs = dirichlet_form(&f, mu)?;
    let rhs = constant * entropy(&f_sq, mu)?;
    Ok(ReportBuilder::new(InequalityId::LogSob, f.n(), mu, params)
        .ctx("constant", constant)
        .ctx("entropy_f_sq", rhs / constant)
        .inequality(lhs, rhs))
}

/// KKL_SUM (`exp` constant 1/2) and CNJ_BOOL (`exp` constant log2/2):
/// `sum I_i^2 >= 4 sigma^2 exp(-c * sum I_i / sigma^2)`.
fn kkl_family(
    id: InequalityId,
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.boolean().unwrap();
    let mean = f.mean_uniform();
    let sigma2 = mean * (1.0 - mean);
    let b = ReportBuilder::new(id, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("sigma2", sigma2);
    if sigma2 == 0.0 {
        return Ok(b.degenerate("constant_function").inequality(0.0, 0.0));
    }
    let infl = boolean_influences(f, mu)?;
    let sum_i = infl.total();
    let sum_i2 = infl.sum_squares();
    let exp_constant = match id {
        InequalityId::KklSum => 0.5,
        InequalityId::CnjBool => std::f64::consts::LN_2 / 2.0,
        _ => unreachable!(),
    };
    let rhs = 4.0 * sigma2 * (-exp_constant * sum_i / sigma2).exp();
    Ok(b
        .ctx("sum_influence", sum_i)
        .ctx("sum_influence_sq", sum_i2)
        .ctx("exp_constant", exp_constant)
        .inequality(sum_i2, rhs))
}

/// Report-only form of the KKL theorem with an explicit constant:
/// `sum I_i^2 >= c mu^2 (1-mu)^2 log^2(n) / n`.
fn kkl_asymptotic(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.boolean().unwrap();
    let mean = f.mean_uniform();
    let sigma2 = mean * (1.0 - mean);
    let c = params.constant.unwrap_or(4.0);
    let b = ReportBuilder::new(InequalityId::KklAsymptotic, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("sigma2", sigma2)
        .ctx("constant", c)
        // The exponent constant 1/2 of the main inequality forces the KKL
        // constant to be at least 1/(1/2)^2 = 4 asymptotically.
        .ctx("derived_from_exponent_constant", 4.0);
    if sigma2 == 0.0 {
        return Ok(b.degenerate("constant_function").inequality(0.0, 0.0));
    }
    let infl = boolean_influences(f, mu)?;
    let n = f.n() as f64;
    let rhs = c * sigma2 * sigma2 * n.ln() * n.ln() / n;
    Ok(b.inequality(infl.sum_squares(), rhs))
}

/// Report-only Talagrand bound: `sum_i I_i / log(e/I_i) >= c mu(1-mu)`.
fn talagrand(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.boolean().unwrap();
    let mean = f.mean_uniform();
    let c = params.constant.unwrap_or(1.0);
    let b = ReportBuilder::new(InequalityId::Talagrand, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("constant", c);
    if mean == 0.0 || mean == 1.0 {
        return Ok(b.degenerate("constant_function").inequality(0.0, 0.0));
    }
    let infl = boolean_influences(f, mu)?;
    let mut acc = KahanSum::new();
    for &ii in infl.values() {
        if ii > 0.0 {
            acc.add(ii / (std::f64::consts::E / ii).ln());
        }
    }
    let lhs = acc.value();
    Ok(b.inequality(lhs, c * mean * (1.0 - mean)))
}

/// The main inequality: `sum_i E^2|d_i| >= sigma^2 exp(-E(f,f)/(C sigma^2))`.
fn main_inequality(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let ordering = ordering_or_natural(params, f.n())?;
    let constant = params.constant.unwrap_or_else(|| log_sobolev_constant(mu));
    let sigma2 = variance(&f, mu)?;
    let b = ReportBuilder::new(InequalityId::Main, f.n(), mu, params)
        .ctx("sigma2", sigma2)
        .ctx("constant", constant)
        .ctx("ordering", format!("{:?}", ordering.as_slice()));
    if sigma2 == 0.0 {
        return Ok(b.degenerate("constant_function_sigma2_zero").inequality(0.0, 0.0));
    }
    let stats = martingale_stats(&f, mu, &ordering)?;
    let lhs = crate::numeric::ksum(stats.e_abs.iter().map(|v| v * v));
    let energy = dirichlet_form(&f, mu)?;
    let rhs = sigma2 * (-energy / (constant * sigma2)).exp();
    Ok(b
        .ctx("dirichlet", energy)
        .ctx("sum_sq_e_abs", lhs)
        .inequality(lhs, rhs))
}

/// CNJ_SOB: `E(f,f) >= (2/log 2) sum Ent(d_i^2)` for boolean `f`;
/// LOG_SOB_MARTINGALE: the proven variant `E(f,f) >= C sum Ent(d_i^2)` for
/// real `f` (C = 2 under the uniform measure).
fn martingale_log_sob(
    id: InequalityId,
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let ordering = ordering_or_natural(params, f.n())?;
    let constant = match id {
        InequalityId::CnjSob => TWO_OVER_LN2,
        _ => params.constant.unwrap_or_else(|| log_sobolev_constant(mu)),
    };
    let stats = martingale_stats(&f, mu, &ordering)?;
    let lhs = dirichlet_form(&f, mu)?;
    let ent_sum = crate::numeric::ksum(stats.diff_square_entropy.iter().copied());
    let rhs = constant * ent_sum;
    Ok(ReportBuilder::new(id, f.n(), mu, params)
        .ctx("constant", constant)
        .ctx("sum_entropy_d_sq", ent_sum)
        .ctx("ordering", format!("{:?}", ordering.as_slice()))
        .inequality(lhs, rhs))
}

/// Report-only biased-measure bounds with explicit constant 1 (equal biases
/// `p <= 1/2` required).
fn fk_family(
    id: InequalityId,
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.boolean().unwrap();
    let p = mu.bias(1);
    require(
        mu.biases().iter().all(|&q| q == p),
        "FK statements need all coordinates to share one bias",
    )?;
    require(p <= 0.5, "FK statements assume p <= 1/2")?;
    let c = params.constant.unwrap_or(1.0);
    let real = f.to_real()?;
    let mean = mu.expect(real.values());
    let b = ReportBuilder::new(id, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("p", p)
        .ctx("constant", c);
    if f.is_constant() {
        return Ok(b.degenerate("constant_function").inequality(0.0, 0.0));
    }
    let infl = boolean_influences(f, mu)?;
    let n = f.n() as f64;
    let plog = p * (1.0 / p).ln();
    let report = match id {
        InequalityId::FkSum => {
            let rhs =
                c * mean * mean * (1.0 - mean) * (1.0 - mean) / (plog * plog) * n.ln() * n.ln() / n;
            b.ctx("sum_influence_sq", infl.sum_squares())
                .inequality(infl.sum_squares(), rhs)
        }
        InequalityId::FkMax => {
            let (idx, max_i) = infl.max_with_index();
            let rhs = c * mean * (1.0 - mean) / plog * n.ln() / n;
            b.ctx("argmax_coordinate", idx).inequality(max_i, rhs)
        }
        _ => unreachable!(),
    };
    Ok(report)
}

/// Hypercontractivity: `||f||_{1+eps^2} >= ||T_eps f||_2`.
fn bonami(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let eps = params.eps;
    let smoothed = noise_operator(&f, eps)?;
    let lhs = p_norm(&f, 1.0 + eps * eps, mu)?;
    let rhs = p_norm(&smoothed, 2.0, mu)?;
    Ok(ReportBuilder::new(InequalityId::Bonami, f.n(), mu, params)
        .ctx("eps", eps)
        .inequality(lhs, rhs))
}

/// Identity: `E(f,f) = sum_i E(d_i, d_i)`.
fn energy_add(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let ordering = ordering_or_natural(params, f.n())?;
    let lhs = dirichlet_form(&f, mu)?;
    let mut acc = KahanSum::new();
    scan_martingale_rev(&f, mu, &ordering, |_, d| {
        acc.add(dirichlet_form(d, mu)?);
        Ok(())
    })?;
    Ok(ReportBuilder::new(InequalityId::EnergyAdd, f.n(), mu, params)
        .ctx("ordering", format!("{:?}", ordering.as_slice()))
        .identity(lhs, acc.value()))
}

/// `Ent(f^2) >= E f^2 log(E f^2 / E^2 f)` for nonnegative `f`.
fn sob_isop(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    require(f.is_nonnegative(), "SOB_ISOP requires a nonnegative function")?;
    let mean = mu.expect(f.values());
    let second = mu.expect(&f.values().iter().map(|v| v * v).collect::<Vec<_>>());
    let b = ReportBuilder::new(InequalityId::SobIsop, f.n(), mu, params)
        .ctx("mu", mean)
        .ctx("second_moment", second);
    if second == 0.0 {
        return Ok(b.degenerate("zero_function").inequality(0.0, 0.0));
    }
    let f_sq = RealFunction::from_values(f.n(), f.values().iter().map(|v| v * v).collect())?;
    let lhs = entropy(&f_sq, mu)?;
    if mean == 0.0 {
        return Ok(b
            .degenerate("zero_mean_limit")
            .inequality(lhs, f64::INFINITY));
    }
    let rhs = second * (second / (mean * mean)).ln();
    Ok(b.inequality(lhs, rhs))
}

/// Per-step bound `E|d_i| <= 2 p_c (1-p_c) E|f - f^c|` where `c` is the
/// coordinate exposed at step `i`. The report carries the binding step.
fn di_bound(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let ordering = ordering_or_natural(params, f.n())?;
    let stats = martingale_stats(&f, mu, &ordering)?;
    let w = mu.weights();
    let mut worst: Option<(usize, f64, f64, f64)> = None; // (step, slack, bound, e_abs)
    let mut all_ok = true;
    for i in 1..=f.n() {
        let c = ordering.coordinate_at(i);
        let stride = 1u64 << (c - 1);
        let mut acc = KahanSum::new();
        for x in 0..f.size() {
            acc.add(w[x as usize] * (f.value(x) - f.value(x ^ stride)).abs());
        }
        let p = mu.bias(c);
        let bound = 2.0 * p * (1.0 - p) * acc.value();
        let e_abs = stats.e_abs[i - 1];
        let slack = bound - e_abs;
        if slack < -params.tol {
            all_ok = false;
        }
        if worst.map_or(true, |(_, s, _, _)| slack < s) {
            worst = Some((i, slack, bound, e_abs));
        }
    }
    let (step, _, bound, e_abs) = worst.expect("n >= 1");
    let mut report = ReportBuilder::new(InequalityId::DiBound, f.n(), mu, params)
        .ctx("binding_step", step)
        .ctx("binding_coordinate", ordering.coordinate_at(step))
        .ctx("ordering", format!("{:?}", ordering.as_slice()))
        .inequality(bound, e_abs);
    report.satisfied = all_ok;
    Ok(report)
}

fn half_energy_terms(
    f: &RealFunction,
    split: usize,
) -> Result<(RealFunction, RealFunction, ProductMeasure)> {
    let (f0, f1) = f.restrict_halves(split)?;
    let mu_half = ProductMeasure::uniform(f.n() - 1);
    Ok((f0, f1, mu_half))
}

/// Identity: `E(f,f) = (E(f0,f0) + E(f1,f1))/2 + ||f0 - f1||^2`.
fn halfcube_id(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let split = split_coordinate(params, f.n())?;
    let (f0, f1, mu_half) = half_energy_terms(&f, split)?;
    let lhs = dirichlet_form(&f, mu)?;
    let cross = mu_half.expect(
        &f0.values()
            .iter()
            .zip(f1.values())
            .map(|(a, b)| (a - b) * (a - b))
            .collect::<Vec<_>>(),
    );
    let rhs = 0.5 * (dirichlet_form(&f0, &mu_half)? + dirichlet_form(&f1, &mu_half)?) + cross;
    Ok(ReportBuilder::new(InequalityId::HalfcubeId, f.n(), mu, params)
        .ctx("split_coordinate", split)
        .ctx("half_distance_sq", cross)
        .identity(lhs, rhs))
}

/// `||f0 - f1||^2 >= (sigma_0 - sigma_1)^2 + (mu_0 - mu_1)^2`.
fn var_dist(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let split = split_coordinate(params, f.n())?;
    let (f0, f1, mu_half) = half_energy_terms(&f, split)?;
    let lhs = mu_half.expect(
        &f0.values()
            .iter()
            .zip(f1.values())
            .map(|(a, b)| (a - b) * (a - b))
            .collect::<Vec<_>>(),
    );
    let m0 = mu_half.expect(f0.values());
    let m1 = mu_half.expect(f1.values());
    let s0 = variance(&f0, &mu_half)?.sqrt();
    let s1 = variance(&f1, &mu_half)?.sqrt();
    let rhs = (s0 - s1) * (s0 - s1) + (m0 - m1) * (m0 - m1);
    Ok(ReportBuilder::new(InequalityId::VarDist, f.n(), mu, params)
        .ctx("split_coordinate", split)
        .ctx("mu0", m0)
        .ctx("mu1", m1)
        .ctx("sigma0", s0)
        .ctx("sigma1", s1)
        .inequality(lhs, rhs))
}

/// Identity: for `k >= 0` split into halves `(g, h)`,
/// `Ent(k) = (Ent(g) + Ent(h))/2 + (Eg log Eg + Eh log Eh - (Eg+Eh) log((Eg+Eh)/2))/2`.
fn ent_decomp(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    require(f.is_nonnegative(), "ENT_DECOMP requires a nonnegative function")?;
    let split = split_coordinate(params, f.n())?;
    let (g, h, mu_half) = half_energy_terms(&f, split)?;
    let lhs = entropy(&f, mu)?;
    let eg = mu_half.expect(g.values());
    let eh = mu_half.expect(h.values());
    let xlnx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    let mean_term = 0.5 * (xlnx(eg) + xlnx(eh) - xlnx(eg + eh) - (eg + eh) * 0.5f64.ln());
    let rhs = 0.5 * (entropy(&g, &mu_half)? + entropy(&h, &mu_half)?) + mean_term;
    Ok(ReportBuilder::new(InequalityId::EntDecomp, f.n(), mu, params)
        .ctx("split_coordinate", split)
        .ctx("mean_term", mean_term)
        .identity(lhs, rhs))
}

/// The Cauchy–Schwarz chain of the half-cube induction: per step
/// `(a_i - b_i)^2 <= (a_i + b_i + 2 sqrt(a_i b_i)) E(d_{i,0} - d_{i,1})^2`
/// with `a_i = E d_{i,0}^2`, `b_i = E d_{i,1}^2`, plus
/// `sum_i E(d_{i,0} - d_{i,1})^2 <= I_split`. The report carries the binding
/// constraint.
fn appb_cs(
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    let f = input.to_real()?;
    let split = split_coordinate(params, f.n())?;
    let (f0, f1, mu_half) = half_energy_terms(&f, split)?;
    let m = f.n() - 1;
    let ordering = CoordinateOrdering::natural(m);
    let w = mu_half.weights();

    // Collect the two difference sequences in step order.
    let collect = |g: &RealFunction| -> Result<Vec<RealFunction>> {
        let mut diffs = vec![None; m];
        scan_martingale_rev(g, &mu_half, &ordering, |i, d| {
            diffs[i - 1] = Some(d.clone());
            Ok(())
        })?;
        Ok(diffs.into_iter().map(Option::unwrap).collect())
    };
    let d0 = collect(&f0)?;
    let d1 = collect(&f1)?;

    let moment = |d: &RealFunction| -> f64 {
        let mut acc = KahanSum::new();
        for (wi, &v) in w.iter().zip(d.values()) {
            acc.add(wi * v * v);
        }
        acc.value()
    };

    let split_influence = real_influences(&f, mu)?.influence(split);
    let mut cross_sum = KahanSum::new();
    let mut worst: Option<(String, f64, f64, f64)> = None; // (name, slack, lhs, rhs)
    let mut all_ok = true;
    let mut track = |name: String, lhs: f64, rhs: f64, tol: f64| {
        let slack = lhs - rhs;
        if slack < -tol {
            all_ok = false;
        }
        if worst.as_ref().map_or(true, |(_, s, _, _)| slack < *s) {
            worst = Some((name, slack, lhs, rhs));
        }
    };
    for i in 0..m {
        let a = moment(&d0[i]);
        let b = moment(&d1[i]);
        let mut cross_acc = KahanSum::new();
        for ((wi, &x), &y) in w.iter().zip(d0[i].values()).zip(d1[i].values()) {
            let d = x - y;
            cross_acc.add(wi * d * d);
        }
        let cross = cross_acc.value();
        cross_sum.add(cross);
        let bound = (a + b + 2.0 * (a * b).sqrt()) * cross;
        track(format!("cauchy_schwarz_step_{}", i + 1), bound, (a - b) * (a - b), params.tol);
    }
    track(
        "cross_energy_vs_split_influence".into(),
        split_influence,
        cross_sum.value(),
        params.tol,
    );
    let (name, _, lhs, rhs) = worst.expect("n >= 2");
    let mut report = ReportBuilder::new(InequalityId::AppbCs, f.n(), mu, params)
        .ctx("split_coordinate", split)
        .ctx("binding_constraint", name)
        .ctx("split_influence", split_influence)
        .ctx("cross_energy_sum", cross_sum.value())
        .inequality(lhs, rhs);
    report.satisfied = all_ok;
    Ok(report)
}

