//! Command-line front end: function-spec parsing, batch verification,
//! searches, constructions, and report emission.
//!
//! Exit codes: 0 = success / statement satisfied; 1 = a violation was found
//! (for conjecture ids this signals a discovery); 2 = usage or tool error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cubelab::analysis::{boolean_influences, martingale, real_influences, variance};
use cubelab::constructions::symmetric_analytics;
use cubelab::funcspec::{Family, FunctionSpec};
use cubelab::inequalities::{
    scalar_checks, verify, InequalityId, InequalityReport, ScalarSuite, VerifyInput, VerifyParams,
};
use cubelab::io::{CubeFunction, FunctionFile};
use cubelab::search::{
    exhaustive_search, local_search, LocalSearchOptions, SearchOptions, SearchSpace,
};
use cubelab::spectral::fwht;
use cubelab::{CoordinateOrdering, Error, ProductMeasure, REAL_DENSE_CAP};

#[derive(Parser)]
#[command(name = "cubelab", version, about = "Influence, Fourier, martingale and entropy analytics on the discrete cube, with inequality verifiers, extremal constructions, and search engines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Common bias p for every coordinate (default: uniform, p = 1/2).
    #[arg(long)]
    bias: Option<f64>,
    /// Comma-separated per-coordinate biases.
    #[arg(long, conflicts_with = "bias")]
    biases: Option<String>,
}

impl MeasureArgs {
    fn measure(&self, n: usize) -> Result<ProductMeasure, Error> {
        if let Some(p) = self.bias {
            return ProductMeasure::with_bias(n, p);
        }
        if let Some(list) = &self.biases {
            let biases = parse_f64_list(list)?;
            if biases.len() != n {
                return Err(Error::Parameter(format!(
                    "expected {n} biases, got {}",
                    biases.len()
                )));
            }
            return ProductMeasure::new(biases);
        }
        Ok(ProductMeasure::uniform(n))
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad float {t:?}")))
        })
        .collect()
}

fn parse_ordering(text: &str) -> Result<CoordinateOrdering, Error> {
    let perm: Result<Vec<usize>, Error> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad coordinate {t:?}")))
        })
        .collect();
    CoordinateOrdering::new(perm?)
}

#[derive(Subcommand)]
enum Command {
    /// Print expectation, variance, influences, Fourier level weights, and
    /// martingale statistics of a function.
    Analyze {
        /// Function spec, e.g. subcube:n=8,t=3 or hex:n=2,bits=8.
        spec: String,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Martingale ordering, e.g. 4,1,2,3 (default natural).
        #[arg(long)]
        ordering: Option<String>,
        /// Densest dimension analyzed pointwise (symmetric profiles above
        /// this use level analytics only).
        #[arg(long, default_value_t = REAL_DENSE_CAP)]
        dense_cap: usize,
    },
    /// Verify one inequality/identity id on a function (or run a scalar
    /// suite id, which needs no function).
    Verify {
        /// Id, e.g. EDGE_ISO, MAIN, CNJ_BOOL, APPA_SCALARS.
        id: String,
        /// Function spec (not needed for scalar suites).
        spec: Option<String>,
        #[command(flatten)]
        measure: MeasureArgs,
        /// Absolute slack tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Martingale ordering for ordering-dependent ids.
        #[arg(long)]
        ordering: Option<String>,
        /// Constant override (log-Sobolev constant or report constant).
        #[arg(long)]
        constant: Option<f64>,
        /// Noise rate for BONAMI.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Split coordinate for half-cube statements (default n).
        #[arg(long)]
        split: Option<usize>,
        /// Grid resolution per axis for scalar suites.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Output format.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Minimize an inequality's ratio over a function space.
    Search {
        /// Inequality id.
        id: String,
        #[arg(long)]
        n: usize,
        /// all | monotone | balanced | random | local.
        #[arg(long, default_value = "all")]
        space: String,
        /// Seed for random/local spaces (required there).
        #[arg(long)]
        seed: Option<u64>,
        /// Sample count for the random space.
        #[arg(long, default_value_t = 1000)]
        count: u64,
        /// Hill-climbing restarts for the local space.
        #[arg(long, default_value_t = 1)]
        restarts: u64,
        /// Maximum descent steps per restart.
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        /// Start function spec for local search.
        #[arg(long)]
        start: Option<String>,
        /// Worker threads (0 = default pool).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Unlock the large exhaustive spaces.
        #[arg(long)]
        long_run: bool,
        /// Canonicalize the reported witness.
        #[arg(long)]
        canonical: bool,
        /// Write the min-ratio frontier CSV here.
        #[arg(long)]
        frontier: Option<PathBuf>,
        /// Absolute slack tolerance for violation counting.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Build a function and write it as a JSON function file.
    Construct {
        /// Function spec; krawchouk specs also emit diagnostics.
        spec: String,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Junta extraction (or the monotone stability probe with --probe).
    Junta {
        /// Function spec (boolean families only).
        spec: String,
        /// Approximation budget.
        #[arg(long)]
        eps: f64,
        /// Slack parameter standing in for the vanishing error term.
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Run the stability probe instead of extraction.
        #[arg(long)]
        probe: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn boolean_spec(spec: &str) -> Result<cubelab::BooleanFunction, Error> {
    let parsed = FunctionSpec::parse(spec)?;
    match parsed.build()? {
        CubeFunction::Boolean(f) => Ok(f),
        _ => Err(Error::Parameter(format!(
            "{spec} does not describe a boolean function"
        ))),
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Analyze {
            spec,
            measure,
            ordering,
            dense_cap,
        } => {
            let parsed = FunctionSpec::parse(&spec)?;
            let function = parsed.build()?;
            let n = function.n();
            let out = if matches!(&function, CubeFunction::Symmetric(_)) && n > dense_cap {
                analyze_symmetric(&parsed, &function)?
            } else {
                if n > dense_cap {
                    return Err(Error::Parameter(format!(
                        "n = {n} exceeds the dense cap {dense_cap}"
                    )));
                }
                let mu = measure.measure(n)?;
                let ord = match ordering {
                    Some(text) => parse_ordering(&text)?,
                    None => CoordinateOrdering::natural(n),
                };
                analyze_dense(&parsed, &function, &mu, &ord)?
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Command::Verify {
            id,
            spec,
            measure,
            tol,
            ordering,
            constant,
            eps,
            split,
            grid,
            format,
        } => {
            if let Ok(suite) = ScalarSuite::from_str(&id) {
                let report = scalar_checks(suite, grid)?;
                println!("{}", serde_json::to_string_pretty(&report.to_json())?);
                return Ok(if report.passed { 0 } else { 1 });
            }
            let id = InequalityId::from_str(&id)?;
            let spec_text = spec.ok_or_else(|| {
                Error::Parameter(format!("{id} needs a function spec argument"))
            })?;
            let parsed = FunctionSpec::parse(&spec_text)?;
            let function = parsed.build()?;
            let mu = measure.measure(function.n())?;
            let params = VerifyParams {
                tol,
                constant,
                eps,
                split_coordinate: split,
                ordering: match ordering {
                    Some(text) => Some(parse_ordering(&text)?),
                    None => None,
                },
                label: Some(parsed.render()),
                ..VerifyParams::default()
            };
            let report = match &function {
                CubeFunction::Boolean(f) => verify(id, VerifyInput::Boolean(f), &mu, &params)?,
                other => {
                    let dense = other.to_real()?;
                    verify(id, VerifyInput::Real(&dense), &mu, &params)?
                }
            };
            emit_report(&report, &format)?;
            Ok(if report.satisfied { 0 } else { 1 })
        }
        Command::Search {
            id,
            n,
            space,
            seed,
            count,
            restarts,
            steps,
            start,
            threads,
            long_run,
            canonical,
            frontier,
            tol,
        } => {
            let id = InequalityId::from_str(&id)?;
            let params = VerifyParams {
                tol,
                ..VerifyParams::default()
            };
            let result = if space == "local" {
                let opts = LocalSearchOptions {
                    seed: seed.ok_or_else(|| {
                        Error::Parameter("local search requires --seed".into())
                    })?,
                    restarts,
                    steps,
                    start: match start {
                        Some(s) => Some(boolean_spec(&s)?),
                        None => None,
                    },
                    params,
                };
                local_search(id, n, &opts)?
            } else {
                let space = match space.as_str() {
                    "all" => SearchSpace::All,
                    "monotone" => SearchSpace::Monotone,
                    "balanced" => SearchSpace::Balanced,
                    "random" => SearchSpace::Random {
                        seed: seed.ok_or_else(|| {
                            Error::Parameter("random search requires --seed".into())
                        })?,
                        count,
                    },
                    other => {
                        return Err(Error::Parameter(format!("unknown space {other:?}")))
                    }
                };
                let opts = SearchOptions {
                    threads,
                    long_run,
                    canonicalize_witness: canonical,
                    collect_frontier: frontier.is_some(),
                    params,
                };
                exhaustive_search(id, n, &space, &opts)?
            };
            if let (Some(path), Some(csv)) = (&frontier, result.frontier_csv()) {
                std::fs::write(path, csv)?;
            }
            println!("{}", serde_json::to_string_pretty(&result.to_json())?);
            Ok(if result.violations > 0 { 1 } else { 0 })
        }
        Command::Construct { spec, out } => {
            let parsed = FunctionSpec::parse(&spec)?;
            let function = parsed.build()?;
            let mut file_json = serde_json::to_value(FunctionFile::from_function(&function))?;
            if parsed.family == Family::Krawchouk {
                let build = parsed.build_krawchouk()?;
                let d = &build.diagnostics;
                file_json.as_object_mut().unwrap().insert(
                    "diagnostics".into(),
                    json!({
                        "s": build.s,
                        "mode": match build.mode {
                            cubelab::NumericMode::Exact => "exact",
                            cubelab::NumericMode::LogFloat => "logfloat",
                        },
                        "truncation_m": build.truncation,
                        "support_fraction": d.support_fraction,
                        "mean": d.mean,
                        "second_moment": d.second_moment,
                        "dirichlet": d.dirichlet,
                        "neighbor_margin_min": d.neighbor_margin_min,
                        "level1_sum": d.level1_sum,
                        "profile_nonincreasing": d.profile_nonincreasing,
                        "regime_warning": d.regime_warning,
                    }),
                );
            }
            std::fs::write(&out, serde_json::to_string_pretty(&file_json)?)?;
            println!(
                "{}",
                json!({"spec": parsed.render(), "n": function.n(), "out": out})
            );
            Ok(0)
        }
        Command::Junta {
            spec,
            eps,
            delta,
            probe,
        } => {
            let f = boolean_spec(&spec)?;
            let out = if probe {
                cubelab::junta::stability_probe(&f, eps, delta)?.to_json()
            } else {
                cubelab::junta::extract_junta(&f, eps, delta)?.to_json()
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
    }
}

fn analyze_symmetric(spec: &FunctionSpec, function: &CubeFunction) -> Result<Value, Error> {
    let CubeFunction::Symmetric(profile) = function else {
        unreachable!()
    };
    let a = symmetric_analytics(profile);
    Ok(json!({
        "spec": spec.render(),
        "n": profile.n(),
        "kind": "symmetric",
        "mu": a.mean,
        "second_moment": a.second_moment,
        "sigma2": a.second_moment - a.mean * a.mean,
        "dirichlet": a.dirichlet,
        "influence_each": a.influence_each,
        "sum_influence": a.dirichlet,
        "level1_sum": a.level1_sum,
    }))
}

fn analyze_dense(
    spec: &FunctionSpec,
    function: &CubeFunction,
    mu: &ProductMeasure,
    ordering: &CoordinateOrdering,
) -> Result<Value, Error> {
    let n = function.n();
    let dense = function.to_real()?;
    let infl = match function.as_boolean() {
        Some(f) => boolean_influences(f, mu)?,
        None => real_influences(&dense, mu)?,
    };
    let mean = mu.expect(dense.values());
    let sigma2 = variance(&dense, mu)?;
    let (argmax, max_influence) = infl.max_with_index();
    let dec = martingale(&dense, mu, ordering)?;
    let mut out = json!({
        "spec": spec.render(),
        "n": n,
        "kind": match function {
            CubeFunction::Boolean(_) => "boolean",
            CubeFunction::Real(_) => "real",
            CubeFunction::Symmetric(_) => "symmetric",
        },
        "mu": mean,
        "sigma2": sigma2,
        "influences": infl.values(),
        "sum_influence": infl.total(),
        "sum_influence_sq": infl.sum_squares(),
        "max_influence": {"coordinate": argmax, "value": max_influence},
        "martingale": {
            "ordering": ordering.as_slice(),
            "e_abs": (1..=n).map(|i| dec.e_abs(i)).collect::<Vec<_>>(),
            "e_sq": (1..=n).map(|i| dec.e_sq(i)).collect::<Vec<_>>(),
            "sum_sq_e_abs": dec.sum_sq_e_abs(),
        },
    });
    if mu.is_uniform() {
        let weights = fwht(&dense).weight_by_level();
        out.as_object_mut()
            .unwrap()
            .insert("fourier_weight_by_level".into(), json!(weights));
    }
    Ok(out)
}

fn emit_report(report: &InequalityReport, format: &str) -> Result<(), Error> {
    match format {
        "json" => println!("{}", serde_json::to_string_pretty(&report.to_json())?),
        "csv" => {
            println!("{}", InequalityReport::csv_header());
            println!("{}", report.to_csv_row());
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown format {other:?} (expected json or csv)"
            )))
        }
    }
    Ok(())
}
