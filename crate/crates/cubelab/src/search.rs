//! Search engines that extremize inequality slack/ratio over boolean
//! function spaces: exhaustive scans, the monotone lattice, random sampling,
//! and hill-climbing, with canonicalization under the cube's symmetry group.
//!
//! Results are deterministic regardless of worker count: candidates are
//! evaluated independently and reduced with an associative minimum whose
//! ties break toward the smallest truth-table encoding.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::boolean_influences;
use crate::error::{Error, Result};
use crate::function::BooleanFunction;
use crate::inequalities::{verify, InequalityId, VerifyInput, VerifyParams};
use crate::measure::ProductMeasure;
use crate::numeric::ksum;

/// Known values of the number of monotone functions (Dedekind numbers) for
/// `n = 0..=6`, used to cross-check enumeration.
pub const DEDEKIND: [u64; 7] = [2, 3, 6, 20, 168, 7581, 7_828_354];

/// Which space a search ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchSpace {
    All,
    Monotone,
    Balanced,
    Random { seed: u64, count: u64 },
}

impl SearchSpace {
    pub fn describe(&self) -> String {
        match self {
            SearchSpace::All => "all".into(),
            SearchSpace::Monotone => "monotone".into(),
            SearchSpace::Balanced => "balanced".into(),
            SearchSpace::Random { seed, count } => format!("random(seed={seed},count={count})"),
        }
    }

    /// Cardinality of the space when exhaustive.
    pub fn cardinality(&self, n: usize) -> Option<u64> {
        match self {
            SearchSpace::All => Some(1u64 << (1u64 << n)),
            SearchSpace::Monotone => DEDEKIND.get(n).copied(),
            SearchSpace::Balanced => {
                let size = 1u64 << n;
                let mut c: u64 = 1;
                for k in 0..size / 2 {
                    c = c * (size - k) / (k + 1);
                }
                Some(c)
            }
            SearchSpace::Random { count, .. } => Some(*count),
        }
    }
}

/// Options shared by the search entry points.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Unlocks the large exhaustive spaces (n = 5 over all functions).
    pub long_run: bool,
    /// Canonicalize the reported witness (requires an id invariant under
    /// the symmetry group).
    pub canonicalize_witness: bool,
    /// Collect the per-expectation minimum-ratio frontier.
    pub collect_frontier: bool,
    pub params: VerifyParams,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            long_run: false,
            canonicalize_witness: false,
            collect_frontier: false,
            params: VerifyParams::default(),
        }
    }
}

/// Decoded statistics of the best witness.
#[derive(Debug, Clone)]
pub struct WitnessInfo {
    pub hex: String,
    pub mu: f64,
    pub influences: Vec<f64>,
    pub sum_influence: f64,
    pub sum_influence_sq: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// One row of the min-ratio frontier (per expectation bucket).
#[derive(Debug, Clone)]
pub struct FrontierRow {
    pub encoding_hex: String,
    pub mu: f64,
    pub sum_i: f64,
    pub sum_i2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Outcome of a search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub id: InequalityId,
    pub n: usize,
    pub space: String,
    pub best_ratio: f64,
    pub witness: Option<WitnessInfo>,
    pub functions_scanned: u64,
    /// Wall-clock time; deliberately excluded from the JSON form so searches
    /// are byte-reproducible across runs and thread counts.
    pub duration: Duration,
    pub canonicalization: bool,
    /// Number of in-space functions whose statement was violated.
    pub violations: u64,
    /// For local search: whether no single-bit flip improves the final best.
    pub local_minimum: Option<bool>,
    pub frontier: Option<Vec<FrontierRow>>,
}

impl SearchResult {
    pub fn to_json(&self) -> Value {
        let witness = self.witness.as_ref().map(|w| {
            json!({
                "hex": w.hex,
                "mu": w.mu,
                "influences": w.influences,
                "sum_influence": w.sum_influence,
                "sum_influence_sq": w.sum_influence_sq,
                "lhs": w.lhs,
                "rhs": w.rhs,
            })
        });
        let mut obj = json!({
            "id": self.id.name(),
            "n": self.n,
            "space": self.space,
            "best_ratio": if self.best_ratio.is_finite() { Value::from(self.best_ratio) } else { Value::Null },
            "witness": witness.unwrap_or(Value::Null),
            "functions_scanned": self.functions_scanned,
            "canonicalization": self.canonicalization,
            "violations": self.violations,
        });
        if let Some(local) = self.local_minimum {
            obj.as_object_mut()
                .unwrap()
                .insert("local_minimum".into(), Value::from(local));
        }
        obj
    }

    pub fn frontier_csv_header() -> &'static str {
        "encoding_hex,mu,sum_I,sum_I2,lhs,rhs,ratio"
    }

    pub fn frontier_csv(&self) -> Option<String> {
        let rows = self.frontier.as_ref()?;
        let mut out = String::from(Self::frontier_csv_header());
        out.push('\n');
        for r in rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.encoding_hex, r.mu, r.sum_i, r.sum_i2, r.lhs, r.rhs, r.ratio
            ));
        }
        Some(out)
    }
}

/// Evaluation of one candidate function.
#[derive(Debug, Clone)]
struct CandidateEval {
    mu: f64,
    sum_i: f64,
    sum_i2: f64,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    satisfied: bool,
}

/// Ids whose left/right sides are functions of `(mu, I_1..I_n)` only, which
/// unlocks the packed word kernel.
fn influence_family(id: InequalityId) -> bool {
    matches!(
        id,
        InequalityId::EdgeIso
            | InequalityId::KklSum
            | InequalityId::CnjBool
            | InequalityId::KklAsymptotic
            | InequalityId::Talagrand
    )
}

fn influence_eval(
    id: InequalityId,
    n: usize,
    mu: f64,
    influences: &[f64],
    params: &VerifyParams,
) -> Option<CandidateEval> {
    if mu == 0.0 || mu == 1.0 {
        return None; // constants are degenerate for every searched statement
    }
    if id == InequalityId::EdgeIso && mu > 0.5 {
        return None; // outside the statement's precondition
    }
    let sum_i = ksum(influences.iter().copied());
    let sum_i2 = ksum(influences.iter().map(|v| v * v));
    let sigma2 = mu * (1.0 - mu);
    let (lhs, rhs) = match id {
        InequalityId::EdgeIso => (
            sum_i,
            2.0 / std::f64::consts::LN_2 * mu * (1.0 / mu).ln(),
        ),
        InequalityId::KklSum => (sum_i2, 4.0 * sigma2 * (-0.5 * sum_i / sigma2).exp()),
        InequalityId::CnjBool => (
            sum_i2,
            4.0 * sigma2 * (-std::f64::consts::LN_2 / 2.0 * sum_i / sigma2).exp(),
        ),
        InequalityId::KklAsymptotic => {
            let c = params.constant.unwrap_or(4.0);
            let nf = n as f64;
            (sum_i2, c * sigma2 * sigma2 * nf.ln() * nf.ln() / nf)
        }
        InequalityId::Talagrand => {
            let c = params.constant.unwrap_or(1.0);
            let lhs = ksum(
                influences
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|&v| v / (std::f64::consts::E / v).ln()),
            );
            (lhs, c * sigma2)
        }
        _ => unreachable!(),
    };
    let ratio = if rhs != 0.0 { lhs / rhs } else { f64::INFINITY };
    Some(CandidateEval {
        mu,
        sum_i,
        sum_i2,
        lhs,
        rhs,
        ratio,
        satisfied: lhs - rhs >= -params.tol,
    })
}

/// Word kernel: influences of a packed table on `n <= 6` variables via
/// shift/XOR/popcount, exact integer counts.
fn word_influences(word: u64, n: usize) -> (f64, Vec<f64>) {
    let size = 1u64 << n;
    let table_mask = if n == 6 { u64::MAX } else { (1u64 << size) - 1 };
    let w = word & table_mask;
    let half = (size / 2) as f64;
    let mut influences = Vec::with_capacity(n);
    for bit in 0..n {
        let stride = 1usize << bit;
        let mut lo_mask = 0u64;
        let mut b = 0usize;
        while b < size as usize {
            if b & stride == 0 {
                lo_mask |= 1u64 << b;
            }
            b += 1;
        }
        let edges = ((w ^ (w >> stride)) & lo_mask).count_ones() as f64;
        influences.push(edges / half);
    }
    (w.count_ones() as f64 / size as f64, influences)
}

fn eval_word(
    id: InequalityId,
    word: u64,
    n: usize,
    params: &VerifyParams,
) -> Option<CandidateEval> {
    let (mu, influences) = word_influences(word, n);
    influence_eval(id, n, mu, &influences, params)
}

/// Packed-path evaluation for any supported id. Returns `Ok(None)` for
/// candidates skipped as degenerate or out of the statement's precondition.
fn eval_packed(
    id: InequalityId,
    f: &BooleanFunction,
    params: &VerifyParams,
) -> Result<Option<CandidateEval>> {
    if f.is_constant() {
        return Ok(None);
    }
    let mu = f.mean_uniform();
    if influence_family(id) {
        let infl = boolean_influences(f, &ProductMeasure::uniform(f.n()))?;
        return Ok(influence_eval(id, f.n(), mu, infl.values(), params));
    }
    if id == InequalityId::EdgeIso && mu > 0.5 {
        return Ok(None);
    }
    let mu_measure = ProductMeasure::uniform(f.n());
    let report = verify(id, VerifyInput::Boolean(f), &mu_measure, params)?;
    let infl = boolean_influences(f, &mu_measure)?;
    Ok(Some(CandidateEval {
        mu,
        sum_i: infl.total(),
        sum_i2: infl.sum_squares(),
        lhs: report.lhs,
        rhs: report.rhs,
        ratio: report.ratio,
        satisfied: report.satisfied,
    }))
}

/// Fold state for the deterministic min-reduction.
#[derive(Debug, Clone, Default)]
struct ScanState {
    scanned: u64,
    violations: u64,
    best: Option<(f64, BooleanFunction, CandidateEval)>,
    frontier: Option<BTreeMap<u64, (f64, BooleanFunction, CandidateEval)>>,
}

impl ScanState {
    fn new(collect_frontier: bool) -> Self {
        Self {
            frontier: collect_frontier.then(BTreeMap::new),
            ..Default::default()
        }
    }

    fn observe(&mut self, f: impl FnOnce() -> BooleanFunction, eval: Option<CandidateEval>) {
        self.scanned += 1;
        let Some(eval) = eval else { return };
        if !eval.satisfied {
            self.violations += 1;
        }
        let func = f();
        if let Some(frontier) = &mut self.frontier {
            let key = (func.mean_uniform() * func.size() as f64).round() as u64;
            match frontier.get_mut(&key) {
                Some(entry) if better(eval.ratio, &func, entry.0, &entry.1) => {
                    *entry = (eval.ratio, func.clone(), eval.clone());
                }
                None => {
                    frontier.insert(key, (eval.ratio, func.clone(), eval.clone()));
                }
                _ => {}
            }
        }
        if self
            .best
            .as_ref()
            .map_or(true, |(r, bf, _)| better(eval.ratio, &func, *r, bf))
        {
            self.best = Some((eval.ratio, func, eval));
        }
    }

    fn merge(mut self, other: ScanState) -> ScanState {
        self.scanned += other.scanned;
        self.violations += other.violations;
        if let Some((r, f, e)) = other.best {
            if self
                .best
                .as_ref()
                .map_or(true, |(br, bf, _)| better(r, &f, *br, bf))
            {
                self.best = Some((r, f, e));
            }
        }
        if let (Some(mine), Some(theirs)) = (&mut self.frontier, other.frontier) {
            for (key, (r, f, e)) in theirs {
                match mine.get_mut(&key) {
                    Some(entry) if better(r, &f, entry.0, &entry.1) => *entry = (r, f, e),
                    None => {
                        mine.insert(key, (r, f, e));
                    }
                    _ => {}
                }
            }
        }
        self
    }
}

/// Total order on candidates: smaller ratio wins, ties break toward the
/// smaller truth-table encoding.
fn better(ratio: f64, f: &BooleanFunction, best_ratio: f64, best_f: &BooleanFunction) -> bool {
    match ratio.total_cmp(&best_ratio) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => f.cmp_encoding(best_f) == std::cmp::Ordering::Less,
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        Ok(job())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::parameter(format!("thread pool: {e}")))?;
        Ok(pool.install(job))
    }
}

fn finish(
    id: InequalityId,
    n: usize,
    space: &SearchSpace,
    state: ScanState,
    opts: &SearchOptions,
    started: Instant,
    local_minimum: Option<bool>,
) -> Result<SearchResult> {
    let (best_ratio, witness) = match state.best {
        None => (f64::INFINITY, None),
        Some((ratio, f, eval)) => {
            let reported = if opts.canonicalize_witness {
                canonicalize(&f)?
            } else {
                f
            };
            let infl = boolean_influences(&reported, &ProductMeasure::uniform(n))?;
            (
                ratio,
                Some(WitnessInfo {
                    hex: reported.encode_hex(),
                    mu: eval.mu,
                    influences: infl.values().to_vec(),
                    sum_influence: eval.sum_i,
                    sum_influence_sq: eval.sum_i2,
                    lhs: eval.lhs,
                    rhs: eval.rhs,
                }),
            )
        }
    };
    let frontier = state.frontier.map(|map| {
        map.into_values()
            .map(|(ratio, f, eval)| FrontierRow {
                encoding_hex: f.encode_hex(),
                mu: eval.mu,
                sum_i: eval.sum_i,
                sum_i2: eval.sum_i2,
                lhs: eval.lhs,
                rhs: eval.rhs,
                ratio,
            })
            .collect()
    });
    Ok(SearchResult {
        id,
        n,
        space: space.describe(),
        best_ratio,
        witness,
        functions_scanned: state.scanned,
        duration: started.elapsed(),
        canonicalization: opts.canonicalize_witness,
        violations: state.violations,
        local_minimum,
        frontier,
    })
}

/// Exhaustive (or sampled, for `Random`) search for the minimum-ratio
/// witness of `id` over the given space under the uniform measure.
pub fn exhaustive_search(
    id: InequalityId,
    n: usize,
    space: &SearchSpace,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    let started = Instant::now();
    if opts.canonicalize_witness {
        if !id.permutation_invariant() {
            return Err(Error::parameter(format!(
                "{id} is not invariant under the canonicalization group"
            )));
        }
        check_group_invariance(id, n.min(6), 32, 0xC0DE)?;
    }
    let state = match space {
        SearchSpace::All | SearchSpace::Balanced => {
            let max_n = if opts.long_run { 5 } else { 4 };
            if n > max_n {
                return Err(Error::SpaceTooLarge(format!(
                    "exhaustive scan over all functions capped at n = {max_n}"
                )));
            }
            if n == 5 && !influence_family(id) {
                return Err(Error::SpaceTooLarge(format!(
                    "{id} has no word kernel; the n = 5 scan is only available for influence-based ids"
                )));
            }
            let total: u64 = 1u64 << (1u64 << n);
            let balanced_only = matches!(space, SearchSpace::Balanced);
            let half = (1u64 << n) / 2;
            let params = &opts.params;
            // Chunk the encoding range so each task scans a block
            // sequentially; the block partition does not affect the result.
            let block: u64 = 1 << 16;
            let blocks = total.div_ceil(block) as usize;
            with_pool(opts.threads, || {
                (0..blocks)
                    .into_par_iter()
                    .fold(
                        || ScanState::new(opts.collect_frontier),
                        |mut acc, b| {
                            let lo = b as u64 * block;
                            let hi = (lo + block).min(total);
                            for word in lo..hi {
                                if balanced_only && word.count_ones() as u64 != half {
                                    continue;
                                }
                                let eval = eval_word_or_packed(id, word, n, params);
                                acc.observe(
                                    || BooleanFunction::from_word(n, word).expect("n <= 6"),
                                    eval,
                                );
                            }
                            acc
                        },
                    )
                    .reduce(|| ScanState::new(opts.collect_frontier), ScanState::merge)
            })?
        }
        SearchSpace::Monotone => {
            let max_n = if opts.long_run { 6 } else { 5 };
            if n > max_n {
                return Err(Error::SpaceTooLarge(format!(
                    "monotone enumeration capped at n = {max_n}"
                )));
            }
            let words: Vec<u64> = enumerate_monotone_words(n)?;
            let params = &opts.params;
            with_pool(opts.threads, || {
                words
                    .par_iter()
                    .with_min_len(512)
                    .fold(
                        || ScanState::new(opts.collect_frontier),
                        |mut acc, &word| {
                            let eval = eval_word_or_packed(id, word, n, params);
                            acc.observe(
                                || BooleanFunction::from_word(n, word).expect("n <= 6"),
                                eval,
                            );
                            acc
                        },
                    )
                    .reduce(|| ScanState::new(opts.collect_frontier), ScanState::merge)
            })?
        }
        SearchSpace::Random { seed, count } => {
            if n > 20 {
                return Err(Error::SpaceTooLarge("random sampling capped at n = 20".into()));
            }
            if !influence_family(id) && n > 12 {
                return Err(Error::SpaceTooLarge(
                    "dense verification in random search capped at n = 12".into(),
                ));
            }
            let params = &opts.params;
            let seed = *seed;
            with_pool(opts.threads, || -> Result<ScanState> {
                (0..*count)
                    .into_par_iter()
                    .fold(
                        || Ok(ScanState::new(opts.collect_frontier)),
                        |acc: Result<ScanState>, idx| {
                            let mut acc = acc?;
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            rng.set_stream(idx);
                            let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5))?;
                            let eval = eval_packed(id, &f, params)?;
                            acc.observe(|| f, eval);
                            Ok(acc)
                        },
                    )
                    .reduce(
                        || Ok(ScanState::new(opts.collect_frontier)),
                        |a, b| Ok(a?.merge(b?)),
                    )
            })??
        }
    };
    finish(id, n, space, state, opts, started, None)
}

/// Shared candidate evaluation for word-sized functions: word kernel when
/// available, packed/dense otherwise.
fn eval_word_or_packed(
    id: InequalityId,
    word: u64,
    n: usize,
    params: &VerifyParams,
) -> Option<CandidateEval> {
    if influence_family(id) {
        eval_word(id, word, n, params)
    } else {
        let f = BooleanFunction::from_word(n, word).expect("n <= 6");
        eval_packed(id, &f, params).expect("uniform dense evaluation cannot fail")
    }
}

/// Options for hill-climbing.
#[derive(Debug, Clone)]
pub struct LocalSearchOptions {
    pub seed: u64,
    /// Number of hill-climbing runs; 0 evaluates the start function only.
    pub restarts: u64,
    /// Maximum descent steps per run.
    pub steps: u64,
    /// Start of the first run (later restarts draw random starts).
    pub start: Option<BooleanFunction>,
    pub params: VerifyParams,
}

impl Default for LocalSearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 1,
            steps: 10_000,
            start: None,
            params: VerifyParams::default(),
        }
    }
}

/// Best-improvement hill climbing on single-bit truth-table flips,
/// minimizing the ratio. Deterministic given the seed: neighbors are
/// scanned in point order and ties break toward the smallest flip index.
pub fn local_search(id: InequalityId, n: usize, opts: &LocalSearchOptions) -> Result<SearchResult> {
    let started = Instant::now();
    if n > 20 {
        return Err(Error::SpaceTooLarge("local search capped at n = 20".into()));
    }
    if !influence_family(id) && n > 12 {
        return Err(Error::SpaceTooLarge(
            "dense verification in local search capped at n = 12".into(),
        ));
    }
    let mut state = ScanState::new(false);
    let draw_start = |run: u64| -> Result<BooleanFunction> {
        if run == 0 {
            if let Some(f) = &opts.start {
                if f.n() != n {
                    return Err(Error::parameter("start function dimension mismatch"));
                }
                return Ok(f.clone());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(run);
        BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5))
    };

    let runs = opts.restarts.max(1);
    let mut final_is_local_min = None;
    for run in 0..runs {
        let mut current = draw_start(run)?;
        let mut current_eval = eval_packed(id, &current, &opts.params)?;
        state.observe(|| current.clone(), current_eval.clone());
        if opts.restarts == 0 {
            final_is_local_min = None;
            break;
        }
        let mut steps_left = opts.steps;
        let mut at_local_min = false;
        while steps_left > 0 {
            steps_left -= 1;
            let mut best_neighbor: Option<(f64, u64)> = None;
            for flip in 0..current.size() {
                let neighbor = flip_point(&current, flip)?;
                if let Some(eval) = eval_packed(id, &neighbor, &opts.params)? {
                    let improves = match (&best_neighbor, &current_eval) {
                        (Some((br, _)), _) => eval.ratio < *br,
                        (None, Some(cur)) => eval.ratio < cur.ratio,
                        (None, None) => true,
                    };
                    if improves {
                        best_neighbor = Some((eval.ratio, flip));
                    }
                }
            }
            match best_neighbor {
                Some((_, flip)) => {
                    current = flip_point(&current, flip)?;
                    current_eval = eval_packed(id, &current, &opts.params)?;
                    state.observe(|| current.clone(), current_eval.clone());
                }
                None => {
                    at_local_min = true;
                    break;
                }
            }
        }
        if run == runs - 1 {
            final_is_local_min = Some(at_local_min);
        }
    }
    let space = SearchSpace::Random {
        seed: opts.seed,
        count: opts.restarts,
    };
    let mut result = finish(
        id,
        n,
        &space,
        state,
        &SearchOptions::default(),
        started,
        final_is_local_min,
    )?;
    result.space = format!("local(seed={},restarts={})", opts.seed, opts.restarts);
    Ok(result)
}

fn flip_point(f: &BooleanFunction, x: u64) -> Result<BooleanFunction> {
    BooleanFunction::from_fn(f.n(), |y| if y == x { !f.value(y) } else { f.value(y) })
}

/// All monotone functions on `n <= 6` variables as word truth tables,
/// each exactly once: a function splits on the last coordinate into a
/// pointwise-ordered pair of monotone functions on `n - 1` variables.
fn enumerate_monotone_words(n: usize) -> Result<Vec<u64>> {
    if n < 1 || n > 6 {
        return Err(Error::parameter(
            "monotone enumeration supports 1 <= n <= 6",
        ));
    }
    let mut level: Vec<u64> = vec![0b0, 0b1]; // M(0): the two constants
    for k in 0..n {
        let bits = 1u64 << k;
        let mut next = Vec::new();
        for &g in &level {
            for &h in &level {
                if g & !h == 0 {
                    next.push(g | (h << bits));
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Streams every monotone function on `n <= 6` variables exactly once.
pub fn enumerate_monotone(n: usize) -> Result<impl Iterator<Item = BooleanFunction>> {
    let words = enumerate_monotone_words(n)?;
    Ok(words
        .into_iter()
        .map(move |w| BooleanFunction::from_word(n, w).expect("n <= 6")))
}

/// Canonical representative of `f` under coordinate permutations composed
/// with per-coordinate input complementations: the orbit member with the
/// lexicographically least hex encoding. Exact scan over `n! 2^n` group
/// elements, capped at `n <= 8`.
pub fn canonicalize(f: &BooleanFunction) -> Result<BooleanFunction> {
    let n = f.n();
    if n > 8 {
        return Err(Error::parameter("canonicalization capped at n = 8"));
    }
    let size = f.size();
    let mut best = f.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    loop {
        // Table permuted by the current coordinate relabeling.
        let base = BooleanFunction::from_fn(n, |x| {
            let mut y = 0u64;
            for (new_bit, &old_bit) in perm.iter().enumerate() {
                if (x >> new_bit) & 1 == 1 {
                    y |= 1 << old_bit;
                }
            }
            f.value(y)
        })?;
        // Complement masks in Gray-code order: one xor_shift per step.
        let mut current = base;
        let mut gray_prev = 0u64;
        for k in 0..size {
            if k > 0 {
                let gray = k ^ (k >> 1);
                let changed = (gray ^ gray_prev).trailing_zeros() as usize + 1;
                gray_prev = gray;
                current = current.xor_shift(changed)?;
            }
            if current.cmp_encoding(&best) == std::cmp::Ordering::Less {
                best = current.clone();
            }
        }
        // Heap's algorithm, iterative step.
        let mut i = 0;
        loop {
            if i >= n {
                return Ok(best);
            }
            if counters[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(counters[i], i);
                }
                counters[i] += 1;
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Applies one symmetry-group element to `f` (used by invariance checks).
pub fn apply_symmetry(
    f: &BooleanFunction,
    perm: &[usize],
    complement_mask: u64,
) -> Result<BooleanFunction> {
    let n = f.n();
    if perm.len() != n {
        return Err(Error::parameter("permutation length mismatch"));
    }
    BooleanFunction::from_fn(n, |x| {
        let mut y = 0u64;
        for (new_bit, &old_bit) in perm.iter().enumerate() {
            if (x >> new_bit) & 1 == 1 {
                y |= 1 << (old_bit - 1);
            }
        }
        f.value(y ^ complement_mask)
    })
}

/// Samples random functions and group elements and confirms that the
/// reported values of `id` are invariant. Errors on the first mismatch.
pub fn check_group_invariance(
    id: InequalityId,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = VerifyParams::default();
    for _ in 0..samples {
        let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5))?;
        let mut perm: Vec<usize> = (1..=n).collect();
        for k in (1..n).rev() {
            perm.swap(k, rng.gen_range(0..=k));
        }
        let mask = rng.gen_range(0..f.size());
        let g = apply_symmetry(&f, &perm, mask)?;
        let a = eval_packed(id, &f, &params)?;
        let b = eval_packed(id, &g, &params)?;
        match (a, b) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                if crate::numeric::rel_err(a.ratio, b.ratio) > 1e-9 {
                    return Err(Error::parameter(format!(
                        "{id} not invariant: ratio {} vs {} under perm {perm:?} mask {mask:#x}",
                        a.ratio, b.ratio
                    )));
                }
            }
            _ => {
                return Err(Error::parameter(format!(
                    "{id} not invariant: one orbit member degenerate, the other not"
                )))
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dictator, subcube};
    use crate::numeric::rel_err;

    #[test]
    fn monotone_counts_match_dedekind() {
        for n in 1..=5 {
            let count = enumerate_monotone(n).unwrap().count() as u64;
            assert_eq!(count, DEDEKIND[n], "n={n}");
        }
        // Every enumerated function is monotone and distinct.
        let all: Vec<BooleanFunction> = enumerate_monotone(4).unwrap().collect();
        assert!(all.iter().all(|f| f.is_monotone()));
        let mut hexes: Vec<String> = all.iter().map(|f| f.encode_hex()).collect();
        hexes.sort();
        hexes.dedup();
        assert_eq!(hexes.len(), 168);
    }

    #[test]
    fn monotone_brute_force_oracle_n4() {
        // Independent oracle: filter all 65536 truth tables.
        let brute = (0..(1u64 << 16))
            .filter(|&w| BooleanFunction::from_word(4, w).unwrap().is_monotone())
            .count() as u64;
        assert_eq!(brute, DEDEKIND[4]);
    }

    #[test]
    fn word_kernel_matches_packed_influences() {
        let mut rng = ChaCha8Rng::seed_from_u64(157);
        for _ in 0..2000 {
            let n = rng.gen_range(1..=6usize);
            let word: u64 = rng.gen();
            let f = BooleanFunction::from_word(n, word).unwrap();
            let (mu, infl) = word_influences(word, n);
            assert_eq!(mu, f.mean_uniform());
            let packed = boolean_influences(&f, &ProductMeasure::uniform(n)).unwrap();
            assert_eq!(&infl, packed.values());
        }
    }

    #[test]
    fn packed_fast_path_matches_dense_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(163);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=10usize);
            let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5)).unwrap();
            let mu = ProductMeasure::uniform(n);
            let packed = boolean_influences(&f, &mu).unwrap();
            let dense =
                crate::analysis::real_influences(&f.to_real().unwrap(), &mu).unwrap();
            assert_eq!(packed.values(), dense.values());
        }
    }

    #[test]
    fn edge_iso_exhaustive_n4_minimum_is_subcube() {
        let result = exhaustive_search(
            InequalityId::EdgeIso,
            4,
            &SearchSpace::All,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.functions_scanned, 1 << 16);
        assert!((result.best_ratio - 1.0).abs() < 1e-12);
        assert_eq!(result.violations, 0);
        // The reported witness reproduces its ratio on re-verification.
        let w = result.witness.as_ref().unwrap();
        let f = BooleanFunction::decode_hex(4, &w.hex).unwrap();
        let again = eval_packed(InequalityId::EdgeIso, &f, &VerifyParams::default())
            .unwrap()
            .unwrap();
        assert!(rel_err(again.ratio, result.best_ratio) < 1e-12);
        // Tightness witnesses are subcubes (the tie-break favors the
        // smallest encoding, the point {0}, a subcube of co-dimension 4).
        let canon = canonicalize(&f).unwrap();
        let subcube_canons: Vec<BooleanFunction> = (1..=4)
            .map(|t| canonicalize(&subcube(4, t).unwrap()).unwrap())
            .collect();
        assert!(subcube_canons.contains(&canon));
    }

    #[test]
    fn kkl_sum_exhaustive_n4_no_violations() {
        let result = exhaustive_search(
            InequalityId::KklSum,
            4,
            &SearchSpace::All,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.violations, 0);
        assert!(result.best_ratio >= 1.0);
    }

    #[test]
    fn thread_count_independence() {
        let mut jsons = Vec::new();
        for threads in [1usize, 4, 16] {
            let result = exhaustive_search(
                InequalityId::KklSum,
                4,
                &SearchSpace::All,
                &SearchOptions {
                    threads,
                    collect_frontier: true,
                    ..Default::default()
                },
            )
            .unwrap();
            jsons.push((
                serde_json::to_string(&result.to_json()).unwrap(),
                result.frontier_csv().unwrap(),
            ));
        }
        assert_eq!(jsons[0], jsons[1]);
        assert_eq!(jsons[1], jsons[2]);
    }

    #[test]
    fn balanced_space_filters() {
        let result = exhaustive_search(
            InequalityId::KklSum,
            3,
            &SearchSpace::Balanced,
            &SearchOptions::default(),
        )
        .unwrap();
        // C(8, 4) = 70 balanced functions.
        assert_eq!(result.functions_scanned, 70);
        assert_eq!(result.violations, 0);
    }

    #[test]
    fn random_space_is_seeded_and_capped() {
        let space = SearchSpace::Random { seed: 9, count: 200 };
        let a = exhaustive_search(InequalityId::CnjBool, 6, &space, &SearchOptions::default())
            .unwrap();
        let b = exhaustive_search(InequalityId::CnjBool, 6, &space, &SearchOptions::default())
            .unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap()
        );
        assert_eq!(a.functions_scanned, 200);
        assert!(exhaustive_search(
            InequalityId::Main,
            13,
            &SearchSpace::Random { seed: 1, count: 10 },
            &SearchOptions::default()
        )
        .is_err());
    }

    #[test]
    fn space_caps_enforced() {
        assert!(matches!(
            exhaustive_search(
                InequalityId::KklSum,
                5,
                &SearchSpace::All,
                &SearchOptions::default()
            ),
            Err(Error::SpaceTooLarge(_))
        ));
        assert!(matches!(
            exhaustive_search(
                InequalityId::Main,
                5,
                &SearchSpace::All,
                &SearchOptions {
                    long_run: true,
                    ..Default::default()
                }
            ),
            Err(Error::SpaceTooLarge(_))
        ));
    }

    #[test]
    fn monotone_search_n5_completes_and_reverifies() {
        let result = exhaustive_search(
            InequalityId::CnjBool,
            5,
            &SearchSpace::Monotone,
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.functions_scanned, DEDEKIND[5]);
        assert_eq!(result.violations, 0);
        let w = result.witness.as_ref().unwrap();
        let f = BooleanFunction::decode_hex(5, &w.hex).unwrap();
        let again = eval_packed(InequalityId::CnjBool, &f, &VerifyParams::default())
            .unwrap()
            .unwrap();
        assert!(rel_err(again.ratio, result.best_ratio) < 1e-12);
    }

    #[test]
    fn local_search_descends() {
        let opts = LocalSearchOptions {
            seed: 42,
            restarts: 1,
            steps: 500,
            ..Default::default()
        };
        let result = local_search(InequalityId::KklSum, 8, &opts).unwrap();
        // The best is no worse than the seeded start function.
        let start = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            rng.set_stream(0);
            BooleanFunction::from_fn(8, |_| rng.gen_bool(0.5)).unwrap()
        };
        let start_eval = eval_packed(InequalityId::KklSum, &start, &VerifyParams::default())
            .unwrap()
            .unwrap();
        assert!(result.best_ratio <= start_eval.ratio + 1e-12);
        assert_eq!(result.local_minimum, Some(true));
    }

    #[test]
    fn local_search_zero_restarts_reports_start() {
        let start = subcube(6, 3).unwrap();
        let opts = LocalSearchOptions {
            seed: 1,
            restarts: 0,
            steps: 100,
            start: Some(start.clone()),
            ..Default::default()
        };
        let result = local_search(InequalityId::CnjBool, 6, &opts).unwrap();
        let direct = eval_packed(InequalityId::CnjBool, &start, &VerifyParams::default())
            .unwrap()
            .unwrap();
        assert!(rel_err(result.best_ratio, direct.ratio) < 1e-12);
        assert_eq!(result.functions_scanned, 1);
    }

    #[test]
    fn subcube_is_locally_minimal_for_cnj_bool() {
        let start = subcube(10, 10).unwrap();
        let opts = LocalSearchOptions {
            seed: 3,
            restarts: 1,
            steps: 50,
            start: Some(start),
            ..Default::default()
        };
        let result = local_search(InequalityId::CnjBool, 10, &opts).unwrap();
        assert!(result.best_ratio >= 1.0);
    }

    #[test]
    fn canonicalize_examples() {
        // A dictator on coordinate 3 canonicalizes like the dictator on 1.
        let x3 = BooleanFunction::from_fn(4, |x| (x >> 2) & 1 == 1).unwrap();
        let x1 = dictator(4).unwrap();
        assert_eq!(
            canonicalize(&x3).unwrap(),
            canonicalize(&x1).unwrap()
        );
        // Complementing an input coordinate stays in the orbit.
        let f = subcube(5, 2).unwrap();
        let flipped = f.xor_shift(2).unwrap();
        assert_eq!(canonicalize(&f).unwrap(), canonicalize(&flipped).unwrap());
        assert!(canonicalize(&BooleanFunction::zeros(9).unwrap()).is_err());
    }

    #[test]
    fn orbit_partition_covers_all_n3_functions() {
        use std::collections::HashMap;
        let mut orbit_sizes: HashMap<String, u64> = HashMap::new();
        for w in 0..256u64 {
            let f = BooleanFunction::from_word(3, w).unwrap();
            *orbit_sizes
                .entry(canonicalize(&f).unwrap().encode_hex())
                .or_default() += 1;
        }
        let total: u64 = orbit_sizes.values().sum();
        assert_eq!(total, 256);
        // Each orbit size divides the group order 3! * 2^3 = 48.
        assert!(orbit_sizes.values().all(|&s| 48 % s == 0));
    }

    #[test]
    fn invariance_check_accepts_invariant_ids() {
        for id in [InequalityId::KklSum, InequalityId::EdgeIso, InequalityId::CnjBool] {
            check_group_invariance(id, 5, 50, 11).unwrap();
        }
    }

    #[test]
    fn canonical_witness_requires_invariant_id() {
        let opts = SearchOptions {
            canonicalize_witness: true,
            ..Default::default()
        };
        assert!(exhaustive_search(InequalityId::CnjSob, 3, &SearchSpace::All, &opts).is_err());
        let ok = exhaustive_search(InequalityId::KklSum, 3, &SearchSpace::All, &opts).unwrap();
        assert!(ok.canonicalization);
    }
}
