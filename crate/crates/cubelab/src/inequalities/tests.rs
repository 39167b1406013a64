use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{dictator, parity, subcube, tribes};
use crate::function::{BooleanFunction, RealFunction};
use crate::measure::{CoordinateOrdering, ProductMeasure};
use crate::numeric::rel_err;

use super::*;

fn uniform(n: usize) -> ProductMeasure {
    ProductMeasure::uniform(n)
}

fn defaults() -> VerifyParams {
    VerifyParams::default()
}

#[test]
fn edge_iso_tight_on_dictator() {
    let f = dictator(8).unwrap();
    let r = verify(InequalityId::EdgeIso, VerifyInput::Boolean(&f), &uniform(8), &defaults())
        .unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-12);
    assert!((r.rhs - 1.0).abs() < 1e-12);
    assert!((r.ratio - 1.0).abs() < 1e-12);
    assert!(r.satisfied);
}

#[test]
fn edge_iso_preconditions() {
    let ones = BooleanFunction::from_fn(4, |_| true).unwrap();
    assert!(matches!(
        verify(InequalityId::EdgeIso, VerifyInput::Boolean(&ones), &uniform(4), &defaults()),
        Err(crate::Error::Precondition(_))
    ));
    let real = RealFunction::constant(4, 0.3).unwrap();
    assert!(verify(InequalityId::EdgeIso, VerifyInput::Real(&real), &uniform(4), &defaults())
        .is_err());
    let zero = BooleanFunction::zeros(4).unwrap();
    let r = verify(InequalityId::EdgeIso, VerifyInput::Boolean(&zero), &uniform(4), &defaults())
        .unwrap();
    assert!(r.satisfied);
    assert!(r.degenerate.is_some());
}

#[test]
fn kkl_sum_subcube_example() {
    // Oracle: mu = 1/8, sigma^2 = 7/64, sum I = 3/4, sum I^2 = 3/16.
    let f = subcube(8, 3).unwrap();
    let r = verify(InequalityId::KklSum, VerifyInput::Boolean(&f), &uniform(8), &defaults())
        .unwrap();
    let sigma2: f64 = 7.0 / 64.0;
    let rhs_oracle = 4.0 * sigma2 * (-(0.75) / (2.0 * sigma2)).exp();
    assert!((r.lhs - 0.1875).abs() < 1e-15);
    assert!(rel_err(r.rhs, rhs_oracle) < 1e-12);
    assert!((r.rhs - 0.01419).abs() < 1e-4);
    assert!(r.satisfied);
}

#[test]
fn cnj_bool_subcube_ratio_near_codimension() {
    // Closed-form oracle with t = 10, n = 12.
    let t = 10;
    let f = subcube(12, t).unwrap();
    let r = verify(InequalityId::CnjBool, VerifyInput::Boolean(&f), &uniform(12), &defaults())
        .unwrap();
    let mu = 0.5f64.powi(t as i32);
    let sigma2 = mu * (1.0 - mu);
    let sum_i = t as f64 * 2.0 * mu;
    let lhs_oracle = t as f64 * (2.0 * mu) * (2.0 * mu);
    let rhs_oracle =
        4.0 * sigma2 * (-std::f64::consts::LN_2 * sum_i / (2.0 * sigma2)).exp();
    assert!(rel_err(r.lhs, lhs_oracle) < 1e-12);
    assert!(rel_err(r.rhs, rhs_oracle) < 1e-12);
    // The displayed closed form approximates sigma^2 by mu, giving ratio = t.
    assert!((r.ratio / t as f64 - 1.0).abs() < 0.01, "ratio = {}", r.ratio);
    assert!(r.satisfied);
}

#[test]
fn energy_additivity_is_exact_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let f = RealFunction::from_fn(6, |_| rng.gen_range(-1.0..1.0)).unwrap();
    let r = verify(InequalityId::EnergyAdd, VerifyInput::Real(&f), &uniform(6), &defaults())
        .unwrap();
    assert!(r.slack.abs() <= 1e-10 * r.lhs.abs());
    assert!(r.satisfied);
}

#[test]
fn main_degenerate_on_constants() {
    for id in [InequalityId::Main, InequalityId::CnjBool, InequalityId::KklSum] {
        let f = BooleanFunction::from_fn(5, |_| true).unwrap();
        let r = verify(id, VerifyInput::Boolean(&f), &uniform(5), &defaults()).unwrap();
        assert!(r.satisfied, "{id}");
        assert!(r.degenerate.is_some());
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
    }
}

#[test]
fn main_is_affine_invariant_up_to_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(127);
    let f = RealFunction::from_fn(5, |_| rng.gen_range(-1.0..1.0)).unwrap();
    let mu = ProductMeasure::new((0..5).map(|_| rng.gen_range(0.2..0.8)).collect()).unwrap();
    let base = verify(InequalityId::Main, VerifyInput::Real(&f), &mu, &defaults()).unwrap();
    for (a, b) in [(2.0, 0.0), (2.0, 1.0), (-3.0, 0.0), (-3.0, 1.0)] {
        let g = f.affine(a, b).unwrap();
        let r = verify(InequalityId::Main, VerifyInput::Real(&g), &mu, &defaults()).unwrap();
        assert_eq!(r.satisfied, base.satisfied);
        assert!(rel_err(r.lhs, a * a * base.lhs) < 1e-9, "a={a} b={b}");
        assert!(rel_err(r.rhs, a * a * base.rhs) < 1e-9, "a={a} b={b}");
    }
}

#[test]
fn proven_statements_hold_exhaustively_n_le_3() {
    // Every proven inequality and identity on every boolean function.
    let proven: Vec<InequalityId> = InequalityId::ALL
        .iter()
        .copied()
        .filter(|id| {
            matches!(id.statement(), Statement::Proven | Statement::Identity)
        })
        .collect();
    for n in 1..=3usize {
        let mu = uniform(n);
        for table in 0..(1u64 << (1 << n)) {
            let f = BooleanFunction::from_word(n, table).unwrap();
            for &id in &proven {
                if n < 2
                    && matches!(
                        id,
                        InequalityId::HalfcubeId
                            | InequalityId::VarDist
                            | InequalityId::EntDecomp
                            | InequalityId::AppbCs
                    )
                {
                    continue;
                }
                if id == InequalityId::EdgeIso && f.mean_uniform() > 0.5 {
                    continue;
                }
                if matches!(id, InequalityId::FkSum | InequalityId::FkMax) {
                    continue; // biased-measure statements, separate test
                }
                let r = verify(id, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
                assert!(
                    r.satisfied,
                    "{id} violated at n={n} table={table:#x}: lhs={} rhs={}",
                    r.lhs, r.rhs
                );
            }
        }
    }
}

#[test]
fn fk_reports_on_biased_measures() {
    let f = tribes(6, 2).unwrap();
    let mu = ProductMeasure::with_bias(6, 0.3).unwrap();
    for id in [InequalityId::FkSum, InequalityId::FkMax] {
        let r = verify(id, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
        assert!(r.lhs.is_finite() && r.rhs.is_finite());
        assert_eq!(r.context["constant"], serde_json::json!(1.0));
    }
    // Mixed biases are rejected.
    let mixed = ProductMeasure::new(vec![0.3, 0.3, 0.3, 0.3, 0.3, 0.4]).unwrap();
    assert!(verify(InequalityId::FkSum, VerifyInput::Boolean(&f), &mixed, &defaults()).is_err());
    let high = ProductMeasure::with_bias(6, 0.7).unwrap();
    assert!(verify(InequalityId::FkMax, VerifyInput::Boolean(&f), &high, &defaults()).is_err());
}

#[test]
fn bonami_across_noise_rates() {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    let eps_grid = [0.0, 0.25, 0.5, 3f64.sqrt() / 3.0, 0.75, 1.0];
    for _ in 0..50 {
        let n = rng.gen_range(1..=6usize);
        let f = RealFunction::from_fn(n, |_| rng.gen_range(-2.0..2.0)).unwrap();
        for eps in eps_grid {
            let params = VerifyParams { eps, ..defaults() };
            let r = verify(InequalityId::Bonami, VerifyInput::Real(&f), &uniform(n), &params)
                .unwrap();
            assert!(r.satisfied, "eps={eps} slack={}", r.slack);
        }
    }
}

#[test]
fn chain_log_sob_implies_func_iso() {
    // Whenever LOG_SOB holds with slack >= 0, FUNC_ISO holds on the same
    // nonnegative function (its right side is smaller).
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6usize);
        let f = RealFunction::from_fn(n, |_| rng.gen_range(0.0..2.0)).unwrap();
        let mu = uniform(n);
        let log_sob =
            verify(InequalityId::LogSob, VerifyInput::Real(&f), &mu, &defaults()).unwrap();
        let sob_isop =
            verify(InequalityId::SobIsop, VerifyInput::Real(&f), &mu, &defaults()).unwrap();
        let func_iso =
            verify(InequalityId::FuncIso, VerifyInput::Real(&f), &mu, &defaults()).unwrap();
        assert!(sob_isop.satisfied);
        if log_sob.slack >= 0.0 {
            assert!(func_iso.slack >= -1e-12);
        }
        assert!(func_iso.rhs <= log_sob.rhs + 1e-12);
    }
}

#[test]
fn kkl_sum_dominates_four_times_main_lhs() {
    // Under the uniform measure E|d_i| <= I_i / 2, so sum I_i^2 >= 4 sum E^2|d_i|.
    let mut rng = ChaCha8Rng::seed_from_u64(139);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6usize);
        let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.5)).unwrap();
        if f.is_constant() {
            continue;
        }
        let mu = uniform(n);
        let kkl =
            verify(InequalityId::KklSum, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
        let main =
            verify(InequalityId::Main, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
        assert!(kkl.lhs >= 4.0 * main.lhs - 1e-12);
    }
}

#[test]
fn cnj_sob_respects_ordering_parameter() {
    let f = parity(4).unwrap();
    let params = VerifyParams {
        ordering: Some(CoordinateOrdering::new(vec![4, 1, 2, 3]).unwrap()),
        ..defaults()
    };
    let r = verify(InequalityId::CnjSob, VerifyInput::Boolean(&f), &uniform(4), &params)
        .unwrap();
    assert!(r.lhs.is_finite() && r.rhs.is_finite());
    assert_eq!(
        r.context["ordering"],
        serde_json::json!("[4, 1, 2, 3]")
    );
}

#[test]
fn verifier_reports_are_deterministic() {
    let f = tribes(6, 2).unwrap();
    let mu = uniform(6);
    for &id in InequalityId::ALL {
        if matches!(id, InequalityId::FkSum | InequalityId::FkMax) {
            continue;
        }
        if id == InequalityId::EdgeIso {
            continue; // tribes has mu > 1/2
        }
        let a = verify(id, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
        let b = verify(id, VerifyInput::Boolean(&f), &mu, &defaults()).unwrap();
        assert_eq!(
            serde_json::to_string(&a.to_json()).unwrap(),
            serde_json::to_string(&b.to_json()).unwrap(),
            "{id}"
        );
        assert_eq!(a.lhs.to_bits(), b.lhs.to_bits());
        assert_eq!(a.rhs.to_bits(), b.rhs.to_bits());
    }
}

#[test]
fn log_sobolev_constant_values() {
    assert_eq!(log_sobolev_constant_bias(0.5).unwrap(), 2.0);
    let c01 = log_sobolev_constant_bias(0.1).unwrap();
    assert!(rel_err(c01, (0.8 / 0.09) / 9f64.ln()) < 1e-14);
    assert!((c01 - 4.045).abs() < 1e-3);
    // Symmetry p <-> 1-p.
    assert!(rel_err(c01, log_sobolev_constant_bias(0.9).unwrap()) < 1e-14);
    // Small-p regime: C(p) p log(1/p) -> 1.
    let p = 1e-6;
    let c = log_sobolev_constant_bias(p).unwrap();
    assert!((c * p * (1.0 / p).ln() - 1.0).abs() < 1e-2);
    assert!(log_sobolev_constant_bias(0.0).is_err());
    // Mixed-bias measure takes the per-coordinate minimum.
    let mixed = ProductMeasure::new(vec![0.5, 0.1, 0.3]).unwrap();
    let expect = log_sobolev_constant_bias(0.1)
        .unwrap()
        .min(log_sobolev_constant_bias(0.3).unwrap())
        .min(2.0);
    assert_eq!(log_sobolev_constant(&mixed), expect);
    assert_eq!(log_sobolev_constant(&uniform(7)), 2.0);
}

#[test]
fn max_influence_examples() {
    let (i, v) = kkl_max_influence(&dictator(6).unwrap()).unwrap();
    assert_eq!((i, v), (1, 1.0));
    let (i, v) = kkl_max_influence(&subcube(8, 3).unwrap()).unwrap();
    assert_eq!((i, v), (1, 0.25)); // ties broken by the smallest index
    let (i, v) = kkl_max_influence(&tribes(6, 2).unwrap()).unwrap();
    assert_eq!((i, v), (1, 9.0 / 32.0));
    assert!(kkl_max_influence(&BooleanFunction::zeros(4).unwrap()).is_err());
}

#[test]
fn report_json_shape() {
    let f = dictator(4).unwrap();
    let r = verify(InequalityId::EdgeIso, VerifyInput::Boolean(&f), &uniform(4), &defaults())
        .unwrap();
    let json = r.to_json();
    for key in ["id", "n", "lhs", "rhs", "ratio", "slack", "satisfied", "degenerate", "context"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    // Infinite ratio serializes as null.
    let c = BooleanFunction::zeros(4).unwrap();
    let r0 = verify(InequalityId::EdgeIso, VerifyInput::Boolean(&c), &uniform(4), &defaults())
        .unwrap();
    assert!(r0.to_json()["ratio"].is_null());
    // CSV header matches the JSON field names.
    assert!(InequalityReport::csv_header().starts_with("id,n,lhs,rhs,ratio"));
    assert!(r.to_csv_row().starts_with("EDGE_ISO,4,"));
}

#[test]
fn ratio_times_rhs_reproduces_lhs() {
    let mut rng = ChaCha8Rng::seed_from_u64(149);
    for _ in 0..100 {
        let n = rng.gen_range(2..=5usize);
        let f = BooleanFunction::from_fn(n, |_| rng.gen_bool(0.4)).unwrap();
        let r = verify(InequalityId::KklSum, VerifyInput::Boolean(&f), &uniform(n), &defaults())
            .unwrap();
        if r.rhs > 0.0 {
            assert!(rel_err(r.ratio * r.rhs, r.lhs) < 1e-9);
        }
    }
}
