use approx::assert_abs_diff_eq;
use echo_chamber::censor::expected_utility;
use echo_chamber::mc::*;
use echo_chamber::{Error, ModelParams, NumericsConfig, Quality, Radius, SamplingPolicy};

const SEED: u64 = 20_240_601;

fn baseline_params() -> ModelParams {
    ModelParams::baseline()
}

#[test]
fn same_seed_same_draws_any_thread_count() {
    let p = baseline_params();
    let pol = SamplingPolicy::radius(1.5);
    let a = simulate_draws(&p, &pol, 50_000, SEED).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| simulate_draws(&p, &pol, 50_000, SEED).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.fingerprint(), b.fingerprint());
    let c = simulate_draws(&p, &pol, 50_000, SEED + 1).unwrap();
    assert_ne!(a.fingerprint(), c.fingerprint());
    let ea = mc_expected_utility(&a, |s| 0.5 * s);
    let eb = one.install(|| mc_expected_utility(&b, |s| 0.5 * s));
    assert_eq!(ea, eb);
}

#[test]
fn single_type_draws() {
    let p = baseline_params().with_high_share(1.0).unwrap();
    let d = simulate_draws(&p, &SamplingPolicy::UNCENSORED, 10_000, SEED).unwrap();
    assert!(d.records.iter().all(|r| r.quality == Quality::High));
    let e = mc_high_prob_within_radius(&p, 1.0, 10_000, SEED).unwrap();
    assert_eq!(e.value, 1.0);
    assert!(e.std_error > 0.0);
}

#[test]
fn radius_draws_respect_window() {
    let d = simulate_draws(&baseline_params(), &SamplingPolicy::radius(0.7), 100_000, SEED).unwrap();
    assert_eq!(d.records.len(), 100_000);
    assert!(d.records.iter().all(|r| r.accepted && r.signal.abs() < 0.7));
    assert!(d.attempts > 100_000);
}

#[test]
fn uncensored_signal_variance() {
    let d = simulate_draws(&baseline_params(), &SamplingPolicy::UNCENSORED, 1_000_000, SEED).unwrap();
    let m = mc_mean(&d, |r| r.signal);
    let v = mc_mean(&d, |r| (r.signal - m.value).powi(2));
    assert!(v.z_score(2.75) < 3.0, "{v:?}");
}

#[test]
fn constant_action_loses_prior_variance() {
    let d = simulate_draws(&baseline_params(), &SamplingPolicy::UNCENSORED, 1_000_000, SEED).unwrap();
    let e = mc_expected_utility(&d, |_| 0.0);
    assert!(e.z_score(-1.0) < 3.0, "{e:?}");
    assert_eq!(e.n_effective, 1_000_000);
}

#[test]
fn utility_agrees_with_quadrature() {
    let p = baseline_params();
    let cfg = NumericsConfig::default();
    for r in [Radius::Unbounded, Radius::Finite(2.35), Radius::Finite(1.0)] {
        let pol = SamplingPolicy::Radius(r);
        let table = ActionTable::new(&p, &pol, &cfg, ActionTable::DEFAULT_POINTS).unwrap();
        let d = simulate_draws(&p, &pol, 1_000_000, SEED).unwrap();
        let e = mc_expected_utility(&d, |s| table.action(s));
        let q = expected_utility(r, &p, &cfg).unwrap();
        assert!(e.z_score(q) < 3.0, "{r}: {e:?} vs {q}");
    }
}

#[test]
fn quality_share_rises_with_low_noise() {
    let p = baseline_params();
    let ladder: Vec<McEstimate> = [3.0, 48.0, 768.0]
        .iter()
        .map(|&l| mc_high_prob_within_radius(&p.with_low_var(l).unwrap(), 1.0, 1_000_000, SEED).unwrap())
        .collect();
    for w in ladder.windows(2) {
        let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        assert!(w[1].value - w[0].value > 3.0 * se);
    }
}

#[test]
fn quality_share_uninformative_when_types_match() {
    let p = ModelParams::new(0.0, 1.0, 0.5, 0.5, 0.5).unwrap();
    let e = mc_high_prob_within_radius(&p, 1.0, 1_000_000, SEED).unwrap();
    assert!(e.z_score(0.5) < 3.0, "{e:?}");
}

#[test]
fn stall_on_vanishing_window() {
    let p = ModelParams::new(0.0, 1.0, 1e-6, 1e-6, 1.0).unwrap();
    let e = simulate_draws(&p, &SamplingPolicy::radius(1e-12), 10, SEED);
    assert!(matches!(e, Err(Error::RejectionStall { .. })));
}

#[test]
fn grid_oracle_checks() {
    let p = baseline_params();
    let (m, _) = grid_posterior_oracle(0.0, &SamplingPolicy::radius(2.0), &p, 4001).unwrap();
    assert_abs_diff_eq!(m, 0.0, epsilon = 1e-12);
    let single = p.with_high_share(1.0).unwrap();
    let (m, v) = grid_posterior_oracle(1.3, &SamplingPolicy::UNCENSORED, &single, 4001).unwrap();
    assert_abs_diff_eq!(m, 1.3 / 1.5, epsilon = 1e-6);
    assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-6);
    let (a, _) = grid_posterior_oracle(1.0, &SamplingPolicy::radius(2.0), &p, 4001).unwrap();
    let (b, _) = grid_posterior_oracle(1.0, &SamplingPolicy::radius(2.0), &p, 8001).unwrap();
    assert!((a - b).abs() < 1e-8);
}
