use approx::assert_abs_diff_eq;
use echo_chamber::censor::*;
use echo_chamber::inference::Posterior;
use echo_chamber::{ModelParams, NumericsConfig, Radius, SamplingPolicy};

fn baseline_params() -> ModelParams {
    ModelParams::baseline()
}

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

#[test]
fn utility_endpoints() {
    assert_eq!(expected_utility(Radius::Finite(0.0), &baseline_params(), &cfg()).unwrap(), -1.0);
    let single = baseline_params().with_high_share(1.0).unwrap();
    let u = expected_utility(Radius::Unbounded, &single, &cfg()).unwrap();
    assert_abs_diff_eq!(u, -1.0 / 3.0, epsilon = 1e-9);
    let small = expected_utility(Radius::Finite(1e-3), &baseline_params(), &cfg()).unwrap();
    assert_abs_diff_eq!(small, -1.0, epsilon = 1e-5);
}

#[test]
fn blackwell_single_type_beats_mixture() {
    let single = expected_utility(Radius::Unbounded, &baseline_params().with_high_share(1.0).unwrap(), &cfg()).unwrap();
    let mixed = expected_utility(Radius::Unbounded, &baseline_params(), &cfg()).unwrap();
    assert!(single > mixed + 1e-3);
}

#[test]
fn utility_converges_at_scan_bound() {
    for p in [baseline_params(), baseline_params().with_low_var(30.0).unwrap()] {
        let hi = cfg().radius_grid.upper(&p);
        let u_hi = expected_utility(Radius::Finite(hi), &p, &cfg()).unwrap();
        let u_inf = expected_utility(Radius::Unbounded, &p, &cfg()).unwrap();
        assert_abs_diff_eq!(u_hi, u_inf, epsilon = 10.0 * cfg().abs_tol);
    }
}

#[test]
fn curve_layout_and_single_type_monotone() {
    let p = baseline_params().with_high_share(1.0).unwrap();
    let radii: Vec<f64> = (1..=30).map(|k| 0.2 * k as f64).collect();
    let c = utility_curve(&p, &radii, &cfg()).unwrap();
    assert_eq!(c.radii.len(), radii.len() + 2);
    assert_eq!(c.radii[0], Radius::Finite(0.0));
    assert_eq!(*c.radii.last().unwrap(), Radius::Unbounded);
    assert_eq!(c.utilities[0], -1.0);
    for w in c.utilities.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
}

#[test]
fn single_type_optimum_is_unbounded() {
    let p = baseline_params().with_high_share(1.0).unwrap();
    let o = optimize_radius(&p, &cfg()).unwrap();
    assert!(!o.is_finite);
    assert_eq!(o.optimum, None);
}

#[test]
fn finite_optimum_with_noisy_low_type() {
    let p30 = baseline_params().with_low_var(30.0).unwrap();
    let o = optimize_radius(&p30, &cfg()).unwrap();
    assert!(o.is_finite);
    assert_abs_diff_eq!(o.optimum.unwrap(), 2.35, epsilon = 0.1);
    assert!(o.utility_at_opt > o.utility_uncensored);

    let p300 = baseline_params().with_low_var(300.0).unwrap();
    let o300 = optimize_radius(&p300, &cfg()).unwrap();
    assert!(o300.is_finite);
    let gap_base = {
        let best = optimize_radius(&baseline_params(), &cfg()).unwrap();
        best.utility_at_opt - best.utility_uncensored
    };
    assert!(o300.utility_at_opt - o300.utility_uncensored > gap_base);
}

#[test]
fn signal_moments_shape() {
    let p = baseline_params();
    let (v0, _) = signal_moments_vs_r(&p, Radius::Finite(1e-3), &cfg()).unwrap();
    assert!(v0 < 1e-6);
    let mut prev = 0.0;
    for k in 1..=30 {
        let (v, c) = signal_moments_vs_r(&p, Radius::Finite(0.25 * k as f64), &cfg()).unwrap();
        assert!(v > prev);
        assert!((-1.0..=1.0).contains(&c));
        prev = v;
    }
    let (v, _) = signal_moments_vs_r(&p, Radius::Unbounded, &cfg()).unwrap();
    assert_abs_diff_eq!(v, 1.0 + 0.5 * 0.5 + 0.5 * 3.0, epsilon = 1e-8);
}

#[test]
fn correlation_peaks_near_optimum_with_noisy_low_type() {
    let p = baseline_params().with_low_var(30.0).unwrap();
    let radii: Vec<f64> = (1..=40).map(|k| 0.2 * k as f64).collect();
    let corr: Vec<f64> = radii
        .iter()
        .map(|&r| signal_moments_vs_r(&p, Radius::Finite(r), &cfg()).unwrap().1)
        .collect();
    let (i, _) = corr
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, &c)| if c > b.1 { (i, c) } else { b });
    assert!(i > 0 && i < radii.len() - 1);
    assert!((radii[i] - 2.35).abs() < 0.5, "peak at {}", radii[i]);
}

#[test]
fn expected_action_symmetry_and_response() {
    let p = baseline_params();
    for r in [Radius::Finite(1.0), Radius::Finite(2.35), Radius::Unbounded] {
        let e = expected_action_given_state(0.0, r, &p, &cfg()).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
    }
    let p30 = baseline_params().with_low_var(30.0).unwrap();
    let r_star = optimize_radius(&p30, &cfg()).unwrap().optimum.unwrap();
    let c = expected_action_given_state(1.0, Radius::Finite(r_star), &p30, &cfg()).unwrap();
    let u = expected_action_given_state(1.0, Radius::Unbounded, &p30, &cfg()).unwrap();
    assert!(c > u);
}

#[test]
fn action_falls_with_radius() {
    let p = baseline_params();
    let a = |pol: SamplingPolicy| Posterior::new(&p, &pol, &cfg()).unwrap().action(1.0).unwrap();
    let (a2, a4, ai) = (
        a(SamplingPolicy::radius(2.0)),
        a(SamplingPolicy::radius(4.0)),
        a(SamplingPolicy::UNCENSORED),
    );
    assert!(a2 - a4 > 1e-4 && a4 - ai > 1e-4);
}

#[test]
fn uncensored_action_has_interior_peak_with_noisy_low_type() {
    let p = baseline_params().with_low_var(30.0).unwrap();
    let post = Posterior::new(&p, &SamplingPolicy::UNCENSORED, &cfg()).unwrap();
    let xs: Vec<f64> = (0..=80).map(|k| 0.1 * k as f64).collect();
    let a: Vec<f64> = xs.iter().map(|&s| post.action(s).unwrap()).collect();
    let peak = (1..a.len() - 1).any(|i| a[i] > a[i - 1] && a[i] > a[i + 1]);
    assert!(peak);
}

#[test]
fn deterministic_under_thread_count() {
    let p = baseline_params().with_low_var(30.0).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = one.install(|| expected_utility(Radius::Finite(2.0), &p, &cfg()).unwrap());
    let b = expected_utility(Radius::Finite(2.0), &p, &cfg()).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}
