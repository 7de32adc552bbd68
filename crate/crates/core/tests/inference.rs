use approx::assert_abs_diff_eq;
use echo_chamber::inference::*;
use echo_chamber::mc::grid_posterior_oracle;
use echo_chamber::quad::{GaussLegendre, Rule};
use echo_chamber::{Error, ModelParams, NumericsConfig, Quality, SamplingPolicy};

fn baseline_params() -> ModelParams {
    ModelParams::baseline()
}

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn policies() -> Vec<SamplingPolicy> {
    vec![
        SamplingPolicy::radius(0.5),
        SamplingPolicy::radius(2.0),
        SamplingPolicy::radius(4.0),
        SamplingPolicy::UNCENSORED,
    ]
}

#[test]
fn posterior_density_normalised() {
    let p = baseline_params();
    let rule = Rule::composite(&[-10.0, 10.0], 1.0, &GaussLegendre::new(201));
    for pol in policies() {
        let post = Posterior::new(&p, &pol, &cfg()).unwrap();
        let m = rule.integrate(|w| post.density(w, 0.3).unwrap());
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-8);
    }
}

#[test]
fn single_type_posterior_is_conjugate() {
    let p = baseline_params().with_high_share(1.0).unwrap();
    let (s, v) = (1.2, 1.0 / 3.0);
    let mean = uncensored_linear_action(s, &p, Quality::High);
    for w in [-1.0, 0.0, 0.8, 2.0] {
        let exact = (-(w - mean) * (w - mean) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
        let got = posterior_density(w, s, &SamplingPolicy::UNCENSORED, &p, &cfg()).unwrap();
        assert_abs_diff_eq!(got, exact, epsilon = 1e-10);
    }
}

#[test]
fn posterior_symmetric_at_prior_mean() {
    let p = baseline_params();
    for pol in policies() {
        let a = optimal_action(0.0, &pol, &p, &cfg()).unwrap();
        assert_abs_diff_eq!(a.action, 0.0, epsilon = 1e-12);
        let d1 = posterior_density(0.7, 0.0, &pol, &p, &cfg()).unwrap();
        let d2 = posterior_density(-0.7, 0.0, &pol, &p, &cfg()).unwrap();
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-12);
    }
}

#[test]
fn posterior_matches_grid_oracle() {
    let p = baseline_params();
    for pol in policies() {
        for s in [-0.4, 0.3, 0.45] {
            let a = optimal_action(s, &pol, &p, &cfg()).unwrap();
            let (m, v) = grid_posterior_oracle(s, &pol, &p, 4001).unwrap();
            assert_abs_diff_eq!(a.action, m, epsilon = 1e-8);
            assert_abs_diff_eq!(a.posterior_var, v, epsilon = 1e-8);
        }
    }
    let pol = SamplingPolicy::radius(2.0);
    let a = optimal_action(1.0, &pol, &p, &cfg()).unwrap();
    let (m, _) = grid_posterior_oracle(1.0, &pol, &p, 4001).unwrap();
    assert_abs_diff_eq!(a.action, m, epsilon = 1e-8);
    let post = Posterior::new(&p, &pol, &cfg()).unwrap();
    let d = post.density(0.4, 1.0).unwrap();
    assert!(d > 0.0 && d.is_finite());
}

#[test]
fn odds_closed_form() {
    let p = baseline_params();
    assert_abs_diff_eq!(source_odds_closed(0.0, &p).unwrap(), 1.632993161855452, epsilon = 1e-12);
    assert_abs_diff_eq!(source_odds_closed(2.0, &p).unwrap(), 1.632993161855452 * (-10.0f64 / 12.0).exp(), epsilon = 1e-12);
    assert_abs_diff_eq!(prob_high_closed(2.0, &p).unwrap(), 0.4152, epsilon = 1e-4);
    let same = ModelParams::new(0.0, 1.0, 2.0, 2.0, 0.3).unwrap();
    for s in [-3.0, 0.0, 5.0] {
        assert_abs_diff_eq!(source_odds_closed(s, &same).unwrap(), 0.3 / 0.7, epsilon = 1e-15);
    }
    for h in [0.0, 1.0] {
        let e = source_odds_closed(0.0, &baseline_params().with_high_share(h).unwrap());
        assert!(matches!(e, Err(Error::UndefinedOdds(_))));
    }
}

#[test]
fn quadrature_quality_belief_matches_closed_form_uncensored() {
    let p = baseline_params();
    let post = Posterior::new(&p, &SamplingPolicy::UNCENSORED, &cfg()).unwrap();
    for k in 0..=24 {
        let s = -6.0 + 0.5 * k as f64;
        assert_abs_diff_eq!(post.prob_high(s).unwrap(), prob_high_closed(s, &p).unwrap(), epsilon = 1e-9);
    }
}

#[test]
fn quality_belief_depends_on_radius_under_truncation() {
    // The window mass depends on the state, so truncation moves P(H|s).
    let p = baseline_params();
    let closed = prob_high_closed(1.0, &p).unwrap();
    let r2 = prob_high(1.0, &SamplingPolicy::radius(2.0), &p, &cfg()).unwrap();
    assert!((closed - r2).abs() > 1e-3);
    assert_abs_diff_eq!(r2, 0.56496, epsilon = 1e-4);
}

#[test]
fn type_conditional_action_values() {
    let p = baseline_params();
    let unc = type_conditional_action(1.0, &SamplingPolicy::UNCENSORED, &p, Quality::High, &cfg()).unwrap();
    assert_abs_diff_eq!(unc, 1.0 / 1.5, epsilon = 1e-10);
    let r2 = type_conditional_action(1.0, &SamplingPolicy::radius(2.0), &p, Quality::High, &cfg()).unwrap();
    let single = p.with_high_share(1.0).unwrap();
    let (oracle, _) = grid_posterior_oracle(1.0, &SamplingPolicy::radius(2.0), &single, 4001).unwrap();
    assert_abs_diff_eq!(r2, oracle, epsilon = 1e-8);
    assert!(r2 > unc);
    for pol in policies() {
        for q in Quality::BOTH {
            let a = type_conditional_action(0.0, &pol, &p, q, &cfg()).unwrap();
            assert_abs_diff_eq!(a, 0.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn linear_action_matches_quadrature() {
    let p = baseline_params();
    assert_abs_diff_eq!(uncensored_linear_action(4.0, &p, Quality::Low), 1.0, epsilon = 1e-15);
    assert_eq!(uncensored_linear_action(0.0, &p, Quality::High), 0.0);
    let post = Posterior::new(&p, &SamplingPolicy::UNCENSORED, &cfg()).unwrap();
    for k in 0..21 {
        let s = -5.0 + 0.5 * k as f64;
        for q in Quality::BOTH {
            let a = post.type_conditional_action(s, q).unwrap();
            assert_abs_diff_eq!(a, uncensored_linear_action(s, &p, q), epsilon = 1e-6);
        }
    }
}

#[test]
fn optimal_action_examples() {
    let a = optimal_action(2.0, &SamplingPolicy::UNCENSORED, &baseline_params(), &cfg()).unwrap();
    assert_abs_diff_eq!(a.action, 0.846, epsilon = 1e-3);
    let p30 = baseline_params().with_low_var(30.0).unwrap();
    let a2 = optimal_action(2.0, &SamplingPolicy::UNCENSORED, &p30, &cfg()).unwrap().action;
    let a3 = optimal_action(3.0, &SamplingPolicy::UNCENSORED, &p30, &cfg()).unwrap().action;
    assert_abs_diff_eq!(a2, 0.776, epsilon = 5e-3);
    assert_abs_diff_eq!(a3, 0.492, epsilon = 5e-3);
    assert!(a2 > a3);
}

#[test]
fn figure_four_narration_values() {
    let p = baseline_params();
    let a2 = optimal_action(2.0, &SamplingPolicy::UNCENSORED, &p, &cfg()).unwrap().action;
    let a4 = optimal_action(4.0, &SamplingPolicy::UNCENSORED, &p, &cfg()).unwrap().action;
    assert_abs_diff_eq!(a4, 1.092, epsilon = 2e-3);
    assert!(a2 < a4);
}

#[test]
fn action_decomposition_and_symmetry() {
    let p = baseline_params();
    for pol in policies() {
        let post = Posterior::new(&p, &pol, &cfg()).unwrap();
        for k in 0..=40 {
            let s = -6.0 + 0.3 * k as f64;
            if !post.law().contains(s) {
                continue;
            }
            let a = post.summary(s).unwrap();
            assert!(a.decomposition_residual() < 1e-10, "{pol:?} {s} {a:?}");
            assert!((0.0..=1.0).contains(&a.prob_high));
            let b = post.summary(-s).unwrap();
            assert_abs_diff_eq!(a.action, -b.action, epsilon = 1e-10);
        }
    }
}

#[test]
fn type_actions_increase_in_signal() {
    let p = baseline_params();
    for pol in policies() {
        let post = Posterior::new(&p, &pol, &cfg()).unwrap();
        for q in Quality::BOTH {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=60 {
                let s = -6.0 + 0.2 * k as f64;
                if !post.law().contains(s) {
                    continue;
                }
                let a = post.type_conditional_action(s, q).unwrap();
                assert!(a > prev, "{pol:?} {q:?} {s}");
                prev = a;
            }
        }
    }
}

#[test]
fn quality_belief_falls_with_distance() {
    let p = baseline_params();
    let mut prev = 1.0;
    for k in 0..40 {
        let ph = prob_high_closed(0.25 * k as f64, &p).unwrap();
        assert!(ph < prev);
        prev = ph;
    }
}

#[test]
fn updating_in_direction_of_signal() {
    let p = baseline_params();
    for q in Quality::BOTH {
        for s in [-3.0, -0.2, 0.2, 3.0] {
            let a = type_conditional_action(s, &SamplingPolicy::UNCENSORED, &p, q, &cfg()).unwrap();
            assert_eq!(a.signum(), s.signum());
        }
    }
}

#[test]
fn action_responds_to_prior_variance() {
    let p = baseline_params();
    let wide = p.with_prior_var(2.0).unwrap();
    for q in Quality::BOTH {
        for s in [-2.0, 1.0, 3.0] {
            let a = type_conditional_action(s, &SamplingPolicy::UNCENSORED, &p, q, &cfg()).unwrap();
            let b = type_conditional_action(s, &SamplingPolicy::UNCENSORED, &wide, q, &cfg()).unwrap();
            assert!(b.abs() > a.abs());
        }
    }
}

#[test]
fn high_type_contribution_vanishes_far_out() {
    let a = optimal_action(10.0, &SamplingPolicy::UNCENSORED, &baseline_params(), &cfg()).unwrap();
    assert!(a.prob_high * a.type_actions.0 < 1e-6);
}

#[test]
fn outside_support_is_error() {
    let p = baseline_params();
    let pol = SamplingPolicy::radius(1.0);
    assert!(matches!(optimal_action(1.0, &pol, &p, &cfg()), Err(Error::SignalOutsideSupport { .. })));
    assert!(matches!(
        type_conditional_action(-1.5, &pol, &p, Quality::Low, &cfg()),
        Err(Error::SignalOutsideSupport { .. })
    ));
    assert!(posterior_density(0.0, 1.0, &pol, &p, &cfg()).is_err());
}
