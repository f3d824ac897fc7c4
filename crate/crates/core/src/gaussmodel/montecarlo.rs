//! Monte Carlo rejection rates of generalized-mean tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{combine_noise, draw_noise, draw_signal, p_value, GaussianModelConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateKind {
    TypeI,
    Power,
    Fdp,
    Fwer,
}

/// A Monte Carlo probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub kind: EstimateKind,
}

impl PowerEstimate {
    pub fn from_count(hits: u64, n_trials: u64, kind: EstimateKind) -> Self {
        let value = if n_trials == 0 { 0.0 } else { hits as f64 / n_trials as f64 };
        let std_err = if n_trials == 0 { 0.0 } else { (value * (1.0 - value) / n_trials as f64).sqrt() };
        Self { value, std_err, n_trials, kind }
    }
}

/// The global test `M_r(p) <= c` on all `m` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanTest {
    pub r: f64,
    pub threshold: f64,
}

impl MeanTest {
    pub fn new(r: f64, threshold: f64) -> Result<Self> {
        if r.is_nan() {
            return Err(Error::InvalidExponent(r));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!("threshold {threshold} must lie in (0, 1]")));
        }
        Ok(Self { r, threshold })
    }

    #[inline]
    fn term(&self, p: f64, log_p: f64) -> f64 {
        let r = self.r;
        if r.is_infinite() {
            p
        } else if r > 0.0 {
            (r * log_p).exp()
        } else if r == 0.0 {
            log_p
        } else {
            -(r * log_p).exp()
        }
    }

    fn init(&self) -> f64 {
        if self.r == f64::INFINITY {
            f64::NEG_INFINITY
        } else if self.r == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            0.0
        }
    }

    #[inline]
    fn accumulate(&self, acc: f64, term: f64) -> f64 {
        if self.r == f64::INFINITY {
            acc.max(term)
        } else if self.r == f64::NEG_INFINITY {
            acc.min(term)
        } else {
            acc + term
        }
    }

    fn rejects(&self, acc: f64, m: usize) -> bool {
        let c = self.threshold;
        let r = self.r;
        if r == f64::INFINITY {
            acc <= c
        } else if r == f64::NEG_INFINITY {
            m as f64 * acc <= c
        } else {
            acc <= m as f64 * crate::scores::h_transform(r, c)
        }
    }
}

/// Rejection rates of several tests over a sweep of correlations.
///
/// Every trial draws its noise and signal mask once and reuses them for all
/// `rhos` and all tests, so differences across the sweep are not blurred by
/// independent sampling noise. Returns `rates[rho][test]`.
pub fn rejection_curve(
    base: &GaussianModelConfig,
    rhos: &[f64],
    tests: &[MeanTest],
    n_trials: u64,
    kind: EstimateKind,
) -> Result<Vec<Vec<PowerEstimate>>> {
    for &rho in rhos {
        GaussianModelConfig { rho, ..*base }.validate()?;
    }
    base.validate()?;
    let m = base.m;
    let cells = rhos.len() * tests.len();
    let counts = (0..n_trials)
        .into_par_iter()
        .fold(
            || (vec![0.0; m], vec![false; m], vec![0.0; m], vec![0.0; tests.len()], vec![0u64; cells]),
            |(mut z, mut mask, mut x, mut acc, mut hits), t| {
                let z0 = draw_noise(base.seed, t, &mut z);
                draw_signal(base.seed, t, base.pi, &mut mask);
                for (ri, &rho) in rhos.iter().enumerate() {
                    combine_noise(z0, &z, rho, base.mu, &mask, &mut x);
                    for (a, test) in acc.iter_mut().zip(tests) {
                        *a = test.init();
                    }
                    for &xi in &x {
                        let p = p_value(xi);
                        let lp = p.ln();
                        for (a, test) in acc.iter_mut().zip(tests) {
                            *a = test.accumulate(*a, test.term(p, lp));
                        }
                    }
                    for (ti, test) in tests.iter().enumerate() {
                        if test.rejects(acc[ti], m) {
                            hits[ri * tests.len() + ti] += 1;
                        }
                    }
                }
                (z, mask, x, acc, hits)
            },
        )
        .map(|state| state.4)
        .reduce(|| vec![0u64; cells], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    Ok(rhos
        .iter()
        .enumerate()
        .map(|(ri, _)| {
            (0..tests.len())
                .map(|ti| PowerEstimate::from_count(counts[ri * tests.len() + ti], n_trials, kind))
                .collect()
        })
        .collect())
}

/// Type-I error of `M_r <= c` under a null configuration.
pub fn empirical_type1(config: &GaussianModelConfig, r: f64, c: f64, n_trials: u64) -> Result<PowerEstimate> {
    if !config.is_null() {
        return Err(Error::InvalidConfig("type-I error needs mu = 0 or pi = 0".into()));
    }
    let test = MeanTest::new(r, c)?;
    Ok(rejection_curve(config, &[config.rho], &[test], n_trials, EstimateKind::TypeI)?[0][0])
}

/// Probability that `M_r <= c` rejects the global null under `config`.
pub fn empirical_power(config: &GaussianModelConfig, r: f64, c: f64, n_trials: u64) -> Result<PowerEstimate> {
    let test = MeanTest::new(r, c)?;
    Ok(rejection_curve(config, &[config.rho], &[test], n_trials, EstimateKind::Power)?[0][0])
}
