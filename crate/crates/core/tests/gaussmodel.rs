use coma_core::gaussmodel::quadrature::{hermite_expectation, rule_128, rule_256, Moment};
use coma_core::gaussmodel::*;
use coma_core::normal;
use rand::{Rng, SeedableRng};

fn moment(r: f64) -> Moment {
    if r == 0.0 {
        Moment::Log
    } else {
        Moment::Power(r)
    }
}

#[test]
fn node_doubling_changes_little() {
    for rho in [0.1f64, 0.3, 0.5, 0.7, 0.9] {
        for r in [-0.5, 0.0, 0.5, 1.0, 2.0] {
            for z0 in [-2.0, -1.0, 0.0, 1.0, 1.645, 3.0] {
                let (a, b) = (rho.sqrt() * z0, (1.0 - rho).sqrt());
                let lo = hermite_expectation(rule_128(), a, b, moment(r));
                let hi = hermite_expectation(rule_256(), a, b, moment(r));
                assert!((lo - hi).abs() <= 1e-8 * hi.abs(), "rho {rho} r {r} z0 {z0}: {lo} vs {hi}");
            }
        }
    }
}

#[test]
fn monotone_in_conditioning_value() {
    for rho in [0.2, 0.5, 0.8] {
        for r in [-0.8, -0.3, 0.5, 1.0, 3.0] {
            let vals: Vec<f64> = (-30..=30).map(|i| g_rho_r(i as f64 * 0.1, rho, r).unwrap()).collect();
            for w in vals.windows(2) {
                if r >= 0.0 {
                    assert!(w[1] <= w[0] * (1.0 + 1e-12));
                } else {
                    assert!(w[1] >= w[0] * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn decreasing_in_correlation_at_level_quantile() {
    for alpha in [0.01, 0.05, 0.1, 0.3] {
        let z0 = -normal::quantile(alpha);
        for r in [0.5, 1.0, 2.0] {
            let vals: Vec<f64> = (0..=20).map(|i| g_rho_r(z0, i as f64 * 0.05, r).unwrap()).collect();
            for w in vals.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "alpha {alpha} r {r}: {vals:?}");
            }
        }
    }
}

#[test]
fn inverse_round_trips() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let rho = rng.random_range(0.05..1.0);
        let r = [-0.5, 0.5, 1.0, 2.0][rng.random_range(0..4)];
        let z = rng.random_range(-3.0..3.0);
        let t = g_rho_r(z, rho, r).unwrap();
        let back = g_rho_r_inverse(t, rho, r).unwrap();
        assert!((g_rho_r(back, rho, r).unwrap() - t).abs() <= 1e-9, "rho {rho} r {r} z {z}");
    }
    assert_eq!(g_rho_r_inverse(0.3, 0.0, 1.0).unwrap(), f64::INFINITY);
    assert!(g_rho_r_inverse(0.5, 1.0, 1.0).unwrap().abs() < 1e-9);
    assert!(g_rho_r_inverse(2.0, 0.5, 1.0).is_err());
}

#[test]
fn divergent_region_is_flagged() {
    assert_eq!(g_rho_r(0.0, 0.0, -1.0).unwrap(), DIVERGENT);
    assert_eq!(g_rho_r(0.0, 0.2, -2.0).unwrap(), DIVERGENT);
    assert!(g_rho_r(0.0, 0.6, -2.0).unwrap().is_finite());
    assert!(is_integrable(0.6, -2.0) && !is_integrable(0.5, -2.0));
}

#[test]
fn type1_limits() {
    for r in [-1.0, -2.0] {
        assert_eq!(asymptotic_type1(0.0, r, 0.05).unwrap(), 0.05);
        assert_eq!(asymptotic_type1(0.5, r, 0.05).unwrap(), 0.0);
    }
    assert!((asymptotic_type1(1.0, 1.0, 0.05).unwrap() - 0.05).abs() < 1e-9);
    assert_eq!(asymptotic_power(0.4, 1.0, 0.05, SignalMean::Infinite, 1.0).unwrap(), 1.0);
    let t = asymptotic_type1(0.4, 1.0, 0.05).unwrap();
    assert!((asymptotic_power(0.4, 1.0, 0.05, SignalMean::Finite(2.0), 0.0).unwrap() - t).abs() < 1e-12);
    assert!(asymptotic_power(1e-6, 1.0, 0.05, SignalMean::Infinite, 0.3).unwrap() < 1e-6);
    assert!(asymptotic_power(0.4, -1.0, 0.05, SignalMean::Finite(2.0), 0.3).is_err());
}

#[test]
fn detection_boundary_values() {
    assert_eq!(detection_boundary(0.0, 1.0).unwrap(), 0.0);
    assert_eq!(detection_boundary(1.0, 0.3).unwrap(), 1.0);
    assert!((detection_boundary(0.0, 0.25).unwrap() - 0.25).abs() < 1e-15);
}

fn within_three_se(est: &PowerEstimate, target: f64) -> bool {
    let se = (target * (1.0 - target) / est.n_trials as f64).sqrt();
    (est.value - target).abs() <= 3.0 * se
}

#[test]
fn type1_of_uniform_and_comonotone_scores() {
    let one = GaussianModelConfig::null(1, 0.3, 4);
    assert!(within_three_se(&empirical_type1(&one, 1.0, 0.05, 20_000).unwrap(), 0.05));
    let como = GaussianModelConfig::null(50, 1.0, 4);
    assert!(within_three_se(&empirical_type1(&como, 1.0, 0.05, 20_000).unwrap(), 0.05));
}

#[test]
fn sampler_is_deterministic_and_correlated() {
    let cfg = GaussianModelConfig::null(2, 0.5, 21);
    let a: Vec<Trial> = sample_model(&cfg, 5).unwrap().collect();
    let b: Vec<Trial> = sample_model(&cfg, 5).unwrap().collect();
    assert_eq!(a, b);
    let n = 100_000;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for t in sample_model(&cfg, n).unwrap() {
        sxy += t.x[0] * t.x[1];
        sxx += t.x[0] * t.x[0];
        syy += t.x[1] * t.x[1];
    }
    let corr = sxy / (sxx * syy).sqrt();
    let se = (1.0 - 0.25) / (n as f64).sqrt();
    assert!((corr - 0.5).abs() < 3.0 * se, "{corr}");
}
