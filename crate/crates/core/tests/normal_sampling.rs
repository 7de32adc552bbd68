use approx::assert_abs_diff_eq;
use echo_chamber::mc::{mc_mean, simulate_draws};
use echo_chamber::normal_sampling::*;
use echo_chamber::{ModelParams, NumericsConfig, Quality, SamplingPolicy, SamplingVariance};

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn fin(v: f64) -> SamplingVariance {
    SamplingVariance::Finite(v)
}

#[test]
fn weight_identities() {
    let p = ModelParams::baseline();
    for v in [1e-3, 0.1, 1.0, 7.0, 1e4] {
        let w = WeightBundle::new(&p, fin(v)).unwrap();
        for q in Quality::BOTH {
            let vq = p.noise_var(q);
            assert_abs_diff_eq!(w.alpha(q), 1.0 / (1.0 + 1.0 / v + 1.0 / vq), epsilon = 1e-15);
            assert_abs_diff_eq!(w.lambda(q), (1.0 / vq) / (1.0 / vq + 1.0 / v), epsilon = 1e-15);
            assert_abs_diff_eq!(w.conv_var(q), 1.0 / (1.0 / v + 1.0 / vq), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(w.lambda_bar, 0.5 * (w.lambda_h + w.lambda_l), epsilon = 1e-15);
        assert_abs_diff_eq!(w.alpha_bar_at(0.5), w.alpha_bar, epsilon = 1e-15);
    }
}

#[test]
fn middle_term_vanishes_when_degenerate() {
    for p in [
        ModelParams::new(0.0, 1.0, 0.5, 3.0, 1.0).unwrap(),
        ModelParams::new(0.0, 1.0, 0.5, 3.0, 0.0).unwrap(),
        ModelParams::new(0.0, 1.0, 2.0, 2.0, 0.4).unwrap(),
    ] {
        let w = WeightBundle::new(&p, fin(2.0)).unwrap();
        let h = p.high_share();
        assert_eq!(h * (1.0 - h) * (w.lambda_h - w.lambda_l).powi(2), 0.0);
    }
}

#[test]
fn single_type_form_matches_closed_form() {
    for (h, q) in [(1.0, Quality::High), (0.0, Quality::Low)] {
        let p = ModelParams::new(0.0, 1.0, 0.5, 3.0, h).unwrap();
        for v in [0.1, 1.0, 10.0] {
            let a = single_type_objective(&p, q, fin(v), 0.0).unwrap();
            let b = closed_form_objective(&p, fin(v)).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }
}

#[test]
fn closed_form_matches_quadrature_when_degenerate() {
    for p in [
        ModelParams::new(0.0, 1.0, 0.5, 3.0, 1.0).unwrap(),
        ModelParams::new(0.0, 1.0, 2.0, 2.0, 0.4).unwrap(),
    ] {
        for v in [1.0, 4.0, 16.0] {
            let a = closed_form_objective(&p, fin(v)).unwrap();
            let b = quadrature_objective(&p, fin(v), &cfg()).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 10.0 * cfg().abs_tol);
        }
    }
}

#[test]
fn closed_form_departs_from_quadrature_with_mixed_types() {
    let p = ModelParams::baseline();
    let a = closed_form_objective(&p, fin(4.0)).unwrap();
    let b = quadrature_objective(&p, fin(4.0), &cfg()).unwrap();
    assert!((a - b).abs() > 1e-3);
}

#[test]
fn single_type_critical_point_is_a_minimum() {
    let p = ModelParams::new(0.0, 1.0, 4.0, 4.0, 1.0).unwrap();
    let c = single_type_critical_point(&p, Quality::High);
    assert_abs_diff_eq!(c, 0.4, epsilon = 1e-15);
    let f = |v: f64| closed_form_objective(&p, fin(v)).unwrap();
    let d = 1e-4;
    assert_abs_diff_eq!((f(c + d) - f(c - d)) / (2.0 * d), 0.0, epsilon = 1e-6);
    assert!(f(c + d) > f(c) && f(c - d) > f(c));
    assert_abs_diff_eq!(f(1e-12), -1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(closed_form_objective(&p, SamplingVariance::Unbounded).unwrap(), -0.8, epsilon = 1e-12);
}

#[test]
fn optimizer_corner_and_interior() {
    let single = ModelParams::new(0.0, 1.0, 0.5, 3.0, 1.0).unwrap();
    assert!(!optimize_sampling_variance(&single, &cfg()).unwrap().is_finite);
    let same = ModelParams::new(0.0, 1.0, 0.5, 0.5, 0.5).unwrap();
    assert!(!optimize_sampling_variance(&same, &cfg()).unwrap().is_finite);
    let noisy = ModelParams::baseline().with_low_var(300.0).unwrap();
    let o = optimize_sampling_variance(&noisy, &cfg()).unwrap();
    assert!(o.is_finite);
    assert!(o.utility_at_opt > o.utility_uncensored);
}

#[test]
fn centre_check() {
    let p = ModelParams::new(0.0, 1.0, 0.5, 0.5, 1.0).unwrap();
    let r = sampling_center_check(&p, 1.0, &[0.0, 0.5, 1.0, 2.0]).unwrap();
    assert!(r.all_dominate);
    assert_eq!(r.checks[0].margin, 0.0);
    assert_abs_diff_eq!(r.checks[2].margin, 1.0 / 9.0, epsilon = 1e-12);
    assert!(sampling_center_check(&ModelParams::baseline(), 1.0, &[1.0]).is_err());
}

#[test]
fn signal_distribution_matches_simulation() {
    let p = ModelParams::new(0.0, 1.0, 0.5, 3.0, 1.0).unwrap();
    let policy = SamplingPolicy::NormalWeight { mean: 0.0, var: fin(0.5) };
    let draws = simulate_draws(&p, &policy, 1_000_000, 5).unwrap();
    let w = WeightBundle::new(&p, fin(0.5)).unwrap();
    let l = w.lambda_h;
    // s − λω is independent of ω with the conditional law's variance.
    let resid = mc_mean(&draws, |r| r.signal - l * r.omega);
    assert!(resid.z_score(0.0) < 3.0, "{resid:?}");
    let var = mc_mean(&draws, |r| (r.signal - l * r.omega).powi(2));
    assert!(var.z_score(w.conv_var(Quality::High)) < 3.0, "{var:?}");
    let (m, v) = sampled_signal_distribution(1.0, &p, 0.0, fin(0.5), Quality::High).unwrap();
    assert_eq!((m, v), (0.5, 0.25));
}
