//! Grid checks for the scalar inequalities behind the two appendix
//! inductions.

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Which appendix suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarSuite {
    /// Entropy/AM-GM/divergence chain of the isoperimetric induction.
    AppA,
    /// The `g(r) h(r) <= 1` analysis of the martingale log-Sobolev induction.
    AppB,
}

impl ScalarSuite {
    pub fn id(self) -> &'static str {
        match self {
            ScalarSuite::AppA => "APPA_SCALARS",
            ScalarSuite::AppB => "APPB_SCALARS",
        }
    }
}

impl std::str::FromStr for ScalarSuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "APPA_SCALARS" => Ok(ScalarSuite::AppA),
            "APPB_SCALARS" => Ok(ScalarSuite::AppB),
            other => Err(Error::parameter(format!("unknown scalar suite {other:?}"))),
        }
    }
}

/// One named sub-check: worst slack found over its grid (negative = violated).
#[derive(Debug, Clone)]
pub struct ScalarCheck {
    pub name: String,
    pub points: usize,
    /// Most negative slack encountered (0 when every point had slack >= 0).
    pub worst_violation: f64,
    pub worst_location: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// Full report for one suite.
#[derive(Debug, Clone)]
pub struct ScalarCheckReport {
    pub id: &'static str,
    pub grid: String,
    pub checks: Vec<ScalarCheck>,
    pub passed: bool,
}

impl ScalarCheckReport {
    pub fn worst(&self) -> Option<&ScalarCheck> {
        self.checks
            .iter()
            .min_by(|a, b| a.worst_violation.total_cmp(&b.worst_violation))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "grid": self.grid,
            "passed": self.passed,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "points": c.points,
                "worst_violation": c.worst_violation,
                "worst_location": c.worst_location,
                "tol": c.tol,
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        })
    }
}

struct CheckAccumulator {
    name: String,
    points: usize,
    worst: f64,
    location: Vec<f64>,
    tol: f64,
}

impl CheckAccumulator {
    fn new(name: &str, tol: f64) -> Self {
        Self {
            name: name.into(),
            points: 0,
            worst: 0.0,
            location: Vec::new(),
            tol,
        }
    }

    fn observe(&mut self, slack: f64, location: &[f64]) {
        self.points += 1;
        if slack < self.worst {
            self.worst = slack;
            self.location = location.to_vec();
        }
    }

    fn finish(self) -> ScalarCheck {
        ScalarCheck {
            passed: self.worst >= -self.tol,
            name: self.name,
            points: self.points,
            worst_violation: self.worst,
            worst_location: self.location,
            tol: self.tol,
        }
    }
}

/// Natural-log binary entropy with the `0 log 0 = 0` convention.
fn h_entropy(x: f64) -> f64 {
    let term = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// Two-point divergence `D(p || q)`.
fn divergence(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a > 0.0 { a * (a / b).ln() } else { 0.0 };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// `g(r) = 1 + 2r + 2 sqrt(r(1+r)) = (sqrt r + sqrt(1+r))^2`.
pub fn appb_g(r: f64) -> f64 {
    let s = r.sqrt() + (1.0 + r).sqrt();
    s * s
}

/// `h(r) = (1+r) log(1+r) + r log r - (1+2r) log((1+2r)/2)`.
///
/// Direct evaluation cancels catastrophically once `h ~ 1/(4r)` shrinks
/// below the ~1e-16 absolute noise of its O(r log r) terms; with
/// `d = 1/(2r+1)` the expansion collapses to the all-positive series
/// `sum_j d^(2j-1) / ((2j-1)(2j))`, which is used for `r >= 1/4`.
pub fn appb_h(r: f64) -> f64 {
    if r == 0.0 {
        return std::f64::consts::LN_2;
    }
    if r < 0.25 {
        let d = 0.5 / (r + 0.5);
        return (1.0 + r) * d.ln_1p() + r * (-d).ln_1p();
    }
    let d = 1.0 / (2.0 * r + 1.0);
    let d2 = d * d;
    let mut power = d;
    let mut total = 0.0;
    let mut j = 1.0f64;
    loop {
        let term = power / ((2.0 * j - 1.0) * (2.0 * j));
        total += term;
        if term < 1e-18 * total {
            return total;
        }
        power *= d2;
        j += 1.0;
    }
}

fn grid_points(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(move |i| lo + step * i as f64)
}

/// Runs one suite on grids with `resolution >= 100` points per axis
/// (one-dimensional checks use `resolution^2` points).
pub fn scalar_checks(suite: ScalarSuite, resolution: usize) -> Result<ScalarCheckReport> {
    if resolution < 100 {
        return Err(Error::parameter(
            "scalar check grids need at least 100 points per axis",
        ));
    }
    match suite {
        ScalarSuite::AppA => Ok(appa_checks(resolution)),
        ScalarSuite::AppB => Ok(appb_checks(resolution)),
    }
}

fn appa_checks(res: usize) -> ScalarCheckReport {
    let dense = res * res;
    let tol = 1e-12;

    // (a) 1 - sqrt(1-y^2) >= log 2 - H((1-y)/2) on [-1, 1].
    let mut entropy_bound = CheckAccumulator::new("entropy_vs_sqrt", tol);
    for y in grid_points(-1.0, 1.0, dense) {
        let lhs = 1.0 - (1.0 - y * y).max(0.0).sqrt();
        let rhs = std::f64::consts::LN_2 - h_entropy((1.0 - y) / 2.0);
        entropy_bound.observe(lhs - rhs, &[y]);
    }

    // (b) (1+y)(1-t)^2 + (1-y)(1+t)^2 >= 2 sqrt(1-y^2) (1-t^2) on [-1,1]^2.
    let mut am_gm = CheckAccumulator::new("am_gm_step", tol);
    for y in grid_points(-1.0, 1.0, res) {
        for t in grid_points(-1.0, 1.0, res) {
            let lhs = (1.0 + y) * (1.0 - t) * (1.0 - t) + (1.0 - y) * (1.0 + t) * (1.0 + t);
            let rhs = 2.0 * (1.0 - y * y).max(0.0).sqrt() * (1.0 - t * t);
            am_gm.observe(lhs - rhs, &[y, t]);
        }
    }

    // (c) D(p||q) >= 0 on the open square.
    let mut div = CheckAccumulator::new("divergence_nonnegative", tol);
    for p in grid_points(1e-6, 1.0 - 1e-6, res) {
        for q in grid_points(1e-6, 1.0 - 1e-6, res) {
            div.observe(divergence(p, q), &[p, q]);
        }
    }

    // (d) The full induction-step inequality over feasible (t, y, v):
    // with mu0 = 1+t, mu1 = 1-t, v0 = v(1+y), v1 = v(1-y) and v_i >= mu_i^2,
    // v0 log(v0/mu0^2) + v1 log(v1/mu1^2)
    //   + [v0 + v1 - 2 sqrt(v0-mu0^2) sqrt(v1-mu1^2) - 2 mu0 mu1] >= 2v log v.
    let mut induction = CheckAccumulator::new("induction_step", 1e-9);
    let axis = (res as f64).powf(2.0 / 3.0).ceil() as usize; // ~ res^2 total
    for t in grid_points(-0.999, 0.999, axis) {
        let mu0 = 1.0 + t;
        let mu1 = 1.0 - t;
        for y in grid_points(-0.999, 0.999, axis) {
            let v_min = (mu0 * mu0 / (1.0 + y)).max(mu1 * mu1 / (1.0 - y));
            for k in 0..axis {
                let v = v_min * (1.0 + 0.25 * k as f64);
                let v0 = v * (1.0 + y);
                let v1 = v * (1.0 - y);
                let xlnx = |a: f64, b: f64| if a > 0.0 { a * (a / b).ln() } else { 0.0 };
                let lhs = xlnx(v0, mu0 * mu0)
                    + xlnx(v1, mu1 * mu1)
                    + (v0 + v1
                        - 2.0 * (v0 - mu0 * mu0).max(0.0).sqrt() * (v1 - mu1 * mu1).max(0.0).sqrt()
                        - 2.0 * mu0 * mu1);
                let rhs = 2.0 * v * v.ln();
                // Normalize by v to keep the slack scale-free for large v.
                induction.observe((lhs - rhs) / v, &[t, y, v]);
            }
        }
    }

    // (e) Base case n = 1: 2x >= (1+x) log(1+x) on [0, 1].
    let mut base = CheckAccumulator::new("base_case_n1", tol);
    for x in grid_points(0.0, 1.0, dense) {
        base.observe(2.0 * x - (1.0 + x) * x.ln_1p(), &[x]);
    }

    let checks: Vec<ScalarCheck> = vec![
        entropy_bound.finish(),
        am_gm.finish(),
        div.finish(),
        induction.finish(),
        base.finish(),
    ];
    ScalarCheckReport {
        id: ScalarSuite::AppA.id(),
        grid: format!("{res} points per axis ({dense} for 1-D checks)"),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn appb_checks(res: usize) -> ScalarCheckReport {
    let dense = res * res;
    let tol = 1e-12;

    // Log-spaced grid on [0, 1e6]: r = 0 plus geometric points.
    let mut grid = vec![0.0f64];
    let lo: f64 = 1e-8;
    let hi: f64 = 1e6;
    let count = dense - 1;
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        grid.push(lo * (hi / lo).powf(t));
    }

    let mut bounded = CheckAccumulator::new("gh_at_most_one", tol);
    // The true increment of g*h between adjacent tail grid points falls to
    // ~1e-16, at the evaluation noise floor; the tolerance only needs to
    // absorb that rounding, not any real slack.
    let mut increasing = CheckAccumulator::new("gh_nondecreasing", 1e-12);
    let mut prev: Option<(f64, f64)> = None;
    for &r in &grid {
        let gh = appb_g(r) * appb_h(r);
        bounded.observe(1.0 - gh, &[r]);
        if let Some((pr, pgh)) = prev {
            increasing.observe(gh - pgh, &[pr, r]);
        }
        prev = Some((r, gh));
    }

    let mut at_zero = CheckAccumulator::new("gh_at_zero_is_log2", 1e-12);
    let gh0 = appb_g(0.0) * appb_h(0.0);
    at_zero.observe(-(gh0 - std::f64::consts::LN_2).abs(), &[0.0]);

    // (gh)(1e6) within [1 - 1e-3, 1]; the tolerance comes from evaluating
    // the product at r = 1e6, where 1 - gh ~ 2.5e-7.
    let mut limit = CheckAccumulator::new("gh_limit_at_1e6", 0.0);
    let gh_hi = appb_g(1e6) * appb_h(1e6);
    limit.observe(gh_hi - (1.0 - 1e-3), &[1e6]);
    limit.observe(1.0 - gh_hi, &[1e6]);

    let checks: Vec<ScalarCheck> = vec![
        bounded.finish(),
        increasing.finish(),
        at_zero.finish(),
        limit.finish(),
    ];
    ScalarCheckReport {
        id: ScalarSuite::AppB.id(),
        grid: format!("log grid on [0, 1e6] with {dense} points"),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
