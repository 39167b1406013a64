//! Parameterized verifiers for the inequalities and identities this crate
//! studies, producing structured reports.
//!
//! Each identifier names one statement, normalized to `lhs >= rhs` form.
//! Proven statements and identities must hold (violations indicate bugs);
//! conjectures report violations as discoveries; asymptotic statements carry
//! explicit constants and are report-only.

mod optimize;
mod scalars;
mod verifiers;

pub use optimize::{
    empirical_log_sobolev_constant, empirical_two_point_constant, two_point_ratio,
};
pub use scalars::{appb_g, appb_h, scalar_checks, ScalarCheck, ScalarCheckReport, ScalarSuite};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::analysis::boolean_influences;
use crate::error::{Error, Result};
use crate::function::{BooleanFunction, RealFunction};
use crate::measure::{CoordinateOrdering, ProductMeasure};

/// How a verified statement is classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statement {
    /// A theorem; a violation is an implementation bug.
    Proven,
    /// An exact identity, checked at relative tolerance.
    Identity,
    /// A conjecture; a violation is a discovery, not a failure.
    Conjecture,
    /// An asymptotic statement checked with an explicit constant; reports
    /// are informational.
    ReportOnly,
}

macro_rules! inequality_ids {
    ($(($variant:ident, $name:literal, $statement:ident)),+ $(,)?) => {
        /// Identifier of one verified statement.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum InequalityId {
            $($variant),+
        }

        impl InequalityId {
            pub const ALL: &'static [InequalityId] = &[$(InequalityId::$variant),+];

            pub fn name(self) -> &'static str {
                match self {
                    $(InequalityId::$variant => $name),+
                }
            }

            pub fn statement(self) -> Statement {
                match self {
                    $(InequalityId::$variant => Statement::$statement),+
                }
            }
        }

        impl FromStr for InequalityId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(InequalityId::$variant),)+
                    other => Err(Error::parameter(format!(
                        "unknown inequality id {other:?}"
                    ))),
                }
            }
        }
    };
}

inequality_ids![
    (EdgeIso, "EDGE_ISO", Proven),
    (FuncIso, "FUNC_ISO", Proven),
    (LogSob, "LOG_SOB", Proven),
    (KklSum, "KKL_SUM", Proven),
    (KklAsymptotic, "KKL_ASYMPTOTIC", ReportOnly),
    (Talagrand, "TALAGRAND", ReportOnly),
    (Main, "MAIN", Proven),
    (CnjBool, "CNJ_BOOL", Conjecture),
    (CnjSob, "CNJ_SOB", Conjecture),
    (LogSobMartingale, "LOG_SOB_MARTINGALE", Proven),
    (FkSum, "FK_SUM", ReportOnly),
    (FkMax, "FK_MAX", ReportOnly),
    (Bonami, "BONAMI", Proven),
    (EnergyAdd, "ENERGY_ADD", Identity),
    (SobIsop, "SOB_ISOP", Proven),
    (DiBound, "DI_BOUND", Proven),
    (HalfcubeId, "HALFCUBE_ID", Identity),
    (VarDist, "VAR_DIST", Proven),
    (EntDecomp, "ENT_DECOMP", Identity),
    (AppbCs, "APPB_CS", Proven),
];

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl InequalityId {
    /// Whether the statement is only defined for boolean inputs.
    pub fn requires_boolean(self) -> bool {
        matches!(
            self,
            InequalityId::EdgeIso
                | InequalityId::KklSum
                | InequalityId::KklAsymptotic
                | InequalityId::Talagrand
                | InequalityId::CnjBool
                | InequalityId::CnjSob
                | InequalityId::FkSum
                | InequalityId::FkMax
        )
    }

    /// Whether the statement is tied to the uniform measure.
    pub fn requires_uniform(self) -> bool {
        matches!(
            self,
            InequalityId::EdgeIso
                | InequalityId::KklSum
                | InequalityId::KklAsymptotic
                | InequalityId::Talagrand
                | InequalityId::CnjBool
                | InequalityId::CnjSob
                | InequalityId::Bonami
                | InequalityId::HalfcubeId
                | InequalityId::VarDist
                | InequalityId::EntDecomp
                | InequalityId::AppbCs
        )
    }

    /// Whether the reported values are invariant under coordinate
    /// permutations and per-coordinate input complementations (the symmetry
    /// group used by canonicalizing searches).
    pub fn permutation_invariant(self) -> bool {
        matches!(
            self,
            InequalityId::EdgeIso
                | InequalityId::FuncIso
                | InequalityId::LogSob
                | InequalityId::KklSum
                | InequalityId::KklAsymptotic
                | InequalityId::Talagrand
                | InequalityId::CnjBool
                | InequalityId::FkSum
                | InequalityId::FkMax
                | InequalityId::Bonami
                | InequalityId::SobIsop
        )
    }
}

/// Verification parameters. `Default` gives the standard tolerances.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    /// Absolute slack tolerance for inequalities: satisfied iff
    /// `slack >= -tol`.
    pub tol: f64,
    /// Relative tolerance for identities.
    pub rel_tol: f64,
    /// Override for the statement's constant (log-Sobolev constant for
    /// LOG_SOB / MAIN / LOG_SOB_MARTINGALE / FUNC_ISO, explicit constant for
    /// the report-only ids).
    pub constant: Option<f64>,
    /// Martingale ordering for ordering-dependent ids; natural by default.
    pub ordering: Option<CoordinateOrdering>,
    /// Noise rate for BONAMI.
    pub eps: f64,
    /// Split coordinate for the half-cube statements; defaults to `n`.
    pub split_coordinate: Option<usize>,
    /// Free-form function description recorded in the report context.
    pub label: Option<String>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            rel_tol: 1e-10,
            constant: None,
            ordering: None,
            eps: 0.5,
            split_coordinate: None,
            label: None,
        }
    }
}

/// Input to a verifier: packed boolean or dense real.
#[derive(Debug, Clone, Copy)]
pub enum VerifyInput<'a> {
    Boolean(&'a BooleanFunction),
    Real(&'a RealFunction),
}

impl<'a> VerifyInput<'a> {
    pub fn n(&self) -> usize {
        match self {
            VerifyInput::Boolean(f) => f.n(),
            VerifyInput::Real(f) => f.n(),
        }
    }

    pub fn boolean(&self) -> Option<&'a BooleanFunction> {
        match self {
            VerifyInput::Boolean(f) => Some(f),
            VerifyInput::Real(_) => None,
        }
    }

    pub fn to_real(&self) -> Result<RealFunction> {
        match self {
            VerifyInput::Boolean(f) => f.to_real(),
            VerifyInput::Real(f) => Ok((*f).clone()),
        }
    }
}

/// Outcome of one verification.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, with `+inf` as the sentinel when `rhs == 0`.
    pub ratio: f64,
    pub slack: f64,
    pub satisfied: bool,
    /// Tolerance used (absolute for inequalities, relative for identities).
    pub tol: f64,
    /// Set when a degenerate convention decided the outcome.
    pub degenerate: Option<String>,
    /// Extra scalars: expectation, variance, influence sums, constants used.
    pub context: BTreeMap<String, Value>,
}

impl InequalityReport {
    /// JSON object per the report schema; non-finite ratios map to `null`.
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id.name(),
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": if self.ratio.is_finite() { Value::from(self.ratio) } else { Value::Null },
            "slack": self.slack,
            "satisfied": self.satisfied,
            "degenerate": self.degenerate.clone().map(Value::from).unwrap_or(Value::Null),
            "context": Value::Object(self.context.clone().into_iter().collect()),
        })
    }

    pub fn csv_header() -> &'static str {
        "id,n,lhs,rhs,ratio,slack,satisfied,degenerate,context"
    }

    /// One CSV row with the same field names as the JSON schema; the context
    /// object is embedded as a quoted JSON string.
    pub fn to_csv_row(&self) -> String {
        let ratio = if self.ratio.is_finite() {
            format!("{}", self.ratio)
        } else {
            String::new()
        };
        let context = serde_json::to_string(&Value::Object(
            self.context.clone().into_iter().collect(),
        ))
        .unwrap_or_default()
        .replace('"', "\"\"");
        format!(
            "{},{},{},{},{},{},{},{},\"{}\"",
            self.id.name(),
            self.n,
            self.lhs,
            self.rhs,
            ratio,
            self.slack,
            self.satisfied,
            self.degenerate.clone().unwrap_or_default(),
            context
        )
    }
}

/// The optimal log-Sobolev constant of a single bias: 2 at `p = 1/2`,
/// otherwise `(1-2p)/(p(1-p)) / (log(1-p) - log p)`.
pub fn log_sobolev_constant_bias(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.5 {
        return Ok(2.0);
    }
    Ok((1.0 - 2.0 * p) / (p * (1.0 - p)) / ((1.0 - p).ln() - p.ln()))
}

/// Log-Sobolev constant of a product measure: `C(p)` for a common bias,
/// the minimum of the per-coordinate constants for mixed biases.
pub fn log_sobolev_constant(mu: &ProductMeasure) -> f64 {
    mu.biases()
        .iter()
        .map(|&p| log_sobolev_constant_bias(p).expect("measure biases are valid"))
        .fold(f64::INFINITY, f64::min)
}

/// Most influential coordinate of a non-constant boolean function under the
/// uniform measure; ties broken by the smallest index.
pub fn kkl_max_influence(f: &BooleanFunction) -> Result<(usize, f64)> {
    if f.is_constant() {
        return Err(Error::precondition(
            "constant function is degenerate: no influential coordinate",
        ));
    }
    let infl = boolean_influences(f, &ProductMeasure::uniform(f.n()))?;
    Ok(infl.max_with_index())
}

/// Verifies statement `id` on the given function under `mu`.
///
/// Precondition violations (wrong function class, wrong measure, out-of-range parameters)
/// are errors; inequality violations are reported with `satisfied = false`.
pub fn verify(
    id: InequalityId,
    input: VerifyInput<'_>,
    mu: &ProductMeasure,
    params: &VerifyParams,
) -> Result<InequalityReport> {
    verifiers::dispatch(id, input, mu, params)
}

#[cfg(test)]
mod tests;
