use coma_core::calibration::*;
use coma_core::gaussmodel::{empirical_type1, GaussianModelConfig};
use coma_core::{build_score_set, generalized_mean, Error};
use rand::{Rng, SeedableRng};

const ALPHA: f64 = 0.05;

#[test]
fn lemma_constants() {
    for m in [2usize, 7, 100, 10_000] {
        assert!((vovk_alpha_factor(1.0, m).unwrap() - 2.0).abs() < 1e-12);
        assert!((vovk_alpha_factor(0.0, m).unwrap() - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(vovk_alpha_factor(f64::NEG_INFINITY, m).unwrap(), m as f64);
    }
    assert_eq!(vovk_alpha_factor(-1.0, 2).unwrap(), 2.0);
    assert_eq!(vovk_alpha_factor(f64::INFINITY, 9).unwrap(), 1.0);
    assert!((vovk_alpha_factor(2.0, 5).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    assert!((vovk_alpha_factor(-2.0, 4).unwrap() - 2.0 * 4f64.sqrt()).abs() < 1e-12);
}

#[test]
fn harmonic_roots() {
    for m in 3..=1000 {
        let y = harmonic_root(m).unwrap();
        assert!(y > 0.0);
        assert!(harmonic_root_residual(m, y).abs() < 1e-10, "m = {m}");
    }
    assert_eq!(harmonic_root(2), Err(Error::InvalidSize(2)));
}

#[test]
fn gauss_thresholds_never_exceed_level() {
    for r in [-3.0, -1.0, -0.7, -0.2, 0.0, 0.3, 1.0, 4.0] {
        for m in [2usize, 50, 10_000] {
            for a in [0.01, 0.05, 0.2] {
                let c = gauss_asymptotic_threshold(r, m, a).unwrap();
                assert!(c <= a, "r {r} m {m} a {a}: {c:e}");
            }
        }
    }
}

#[test]
fn comonotone_scores_stay_valid() {
    // all p-values equal to one uniform draw
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let n = 20_000;
    let draws: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let se = (ALPHA * (1.0 - ALPHA) / n as f64).sqrt();
    for r in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for m in [2usize, 10, 100] {
            let c = ALPHA / vovk_alpha_factor(r, m).unwrap();
            let hits = draws.iter().filter(|&&u| generalized_mean(r, &vec![u; m]) <= c).count();
            assert!((hits as f64 / n as f64) <= ALPHA + 3.0 * se, "r {r} m {m}");
        }
    }
}

#[test]
fn harmonic_pair_of_independent_uniforms() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
    let n = 100_000;
    let hits = (0..n)
        .filter(|_| generalized_mean(-1.0, &[rng.random::<f64>(), rng.random::<f64>()]) <= ALPHA / 2.0)
        .count();
    let se = (ALPHA * (1.0 - ALPHA) / n as f64).sqrt();
    assert!(hits as f64 / n as f64 <= ALPHA + 3.0 * se);
}

#[test]
fn empirical_table_properties() {
    let n = 4_000u64;
    for r in [-1.0, 1.0] {
        let t = empirical_calibration(r, ALPHA, 40, n, 17).unwrap();
        assert_eq!(t, empirical_calibration(r, ALPHA, 40, n, 17).unwrap());
        let back = CalibrationTable::from_json(&t.to_json()).unwrap();
        for s in 1..=40 {
            assert_eq!(back.lookup(s).unwrap().to_bits(), t.lookup(s).unwrap().to_bits());
        }
        // quantile s.e. relative to the quantile, density taken as alpha / c
        let rel_se = ((1.0 - ALPHA) / (ALPHA * n as f64)).sqrt();
        for &(s, c) in &t.grid {
            let vovk = ALPHA / vovk_alpha_factor(r, s).unwrap();
            assert!(c >= vovk * (1.0 - 3.0 * rel_se), "r {r} s {s}: {c} < {vovk}");
            assert!(c <= ALPHA * (1.0 + 3.0 * rel_se));
        }
        // interpolation stays between neighbouring grid values
        for w in t.grid.windows(2) {
            for s in w[0].0 + 1..w[1].0 {
                let v = t.lookup(s).unwrap();
                assert!(v >= w[0].1.min(w[1].1) && v <= w[0].1.max(w[1].1), "s {s} {v:e} {:?} {:?}", w[0], w[1]);
            }
        }
        assert!(t.lookup(41).is_err());
    }
    let one = empirical_calibration(1.0, ALPHA, 1, 500, 1).unwrap();
    assert_eq!(one.grid.len(), 1);
    let se = (ALPHA * (1.0 - ALPHA) / 500.0).sqrt();
    assert!((one.grid[0].1 - ALPHA).abs() <= 3.0 * se + 1e-12);
}

#[test]
fn empirical_thresholds_hold_their_level() {
    let t = empirical_calibration(-1.0, ALPHA, 20, 5_000, 40).unwrap();
    let spec = LocalTestSpec::empirical(t.clone());
    let tf = threshold_fn(&spec, 20).unwrap();
    let c = tf.critical_value(20, ALPHA).unwrap();
    assert_eq!(c, t.lookup(20).unwrap());
    assert!(tf.critical_value(20, 0.1).is_err());
    let n = 20_000;
    let se = (ALPHA * (1.0 - ALPHA) / n as f64).sqrt();
    for rho in [0.0, 0.3, 0.7] {
        // fresh seed: independent of the calibration draws
        let est = empirical_type1(&GaussianModelConfig::null(20, rho, 99), -1.0, c, n).unwrap();
        assert!(est.value <= ALPHA + 3.0 * se + 3.0 * (ALPHA * 0.95 / 5_000.0).sqrt(), "rho {rho}");
    }
    let sc = build_score_set(&[0.001; 20]).unwrap();
    let ct = coma_core::closure::ClosedTesting::new(&sc, &spec, ALPHA).unwrap();
    assert!(ct.local_test(&coma_core::SubsetQuery::all(&sc)));
}
