//! The positively equicorrelated Gaussian model and its sampler.

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::scores::P_FLOOR;

/// `X_i = mu * B_i + sqrt(rho) Z_0 + sqrt(1 - rho) Z_i`, `B_i ~ Bernoulli(pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModelConfig {
    pub m: usize,
    pub rho: f64,
    pub mu: f64,
    pub pi: f64,
    pub seed: u64,
}

impl GaussianModelConfig {
    pub fn null(m: usize, rho: f64, seed: u64) -> Self {
        Self { m, rho, mu: 0.0, pi: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidSize(0));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidConfig(format!("rho = {} must lie in [0, 1]", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.pi) {
            return Err(Error::InvalidConfig(format!("pi = {} must lie in [0, 1]", self.pi)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidConfig(format!("mu = {} must be finite and >= 0", self.mu)));
        }
        Ok(())
    }

    pub fn is_null(&self) -> bool {
        self.mu == 0.0 || self.pi == 0.0
    }
}

/// Signal strength for the limit formulas, where `mu = inf` is a case of
/// its own rather than a large number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalMean {
    Finite(f64),
    Infinite,
}

/// One draw from the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: u64,
    pub x: Vec<f64>,
    pub signal: Vec<bool>,
}

impl Trial {
    /// One-sided p-values `Phi(-X_i)`, floored like [`crate::scores::ScoreSet`].
    pub fn p_values(&self) -> Vec<f64> {
        self.x.iter().map(|&x| p_value(x)).collect()
    }
}

#[inline]
pub fn p_value(x: f64) -> f64 {
    normal::sf(x).max(P_FLOOR)
}

const NOISE_STREAM: u64 = 0x006e_6f69_7365;
const SIGNAL_STREAM: u64 = 0x7369_676e_616c;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG for `(seed, component, trial)`. Independent of `rho`, `mu` and `pi`,
/// so sweeps over those parameters reuse the same random numbers.
pub fn stream_rng(seed: u64, component: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(component)));
    rng.set_stream(trial);
    rng
}

/// Fills `z` with `Z_1..Z_m` and returns `Z_0`.
pub fn draw_noise(seed: u64, trial: u64, z: &mut [f64]) -> f64 {
    let mut rng = stream_rng(seed, NOISE_STREAM, trial);
    let z0 = rng.sample(StandardNormal);
    for v in z.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    z0
}

pub fn draw_signal(seed: u64, trial: u64, pi: f64, mask: &mut [bool]) {
    if pi <= 0.0 {
        mask.fill(false);
        return;
    }
    let mut rng = stream_rng(seed, SIGNAL_STREAM, trial);
    for b in mask.iter_mut() {
        *b = rng.random::<f64>() < pi;
    }
}

/// Combines shared noise into `X` for a given correlation and signal.
pub fn combine_noise(z0: f64, z: &[f64], rho: f64, mu: f64, mask: &[bool], x: &mut [f64]) {
    let a = rho.sqrt() * z0;
    let b = (1.0 - rho).sqrt();
    for ((xi, &zi), &si) in x.iter_mut().zip(z).zip(mask) {
        *xi = a + b * zi + if si { mu } else { 0.0 };
    }
}

/// Draws trial `index` of `config`.
pub fn draw_trial(config: &GaussianModelConfig, index: u64) -> Trial {
    let m = config.m;
    let mut z = vec![0.0; m];
    let mut signal = vec![false; m];
    let mut x = vec![0.0; m];
    let z0 = draw_noise(config.seed, index, &mut z);
    draw_signal(config.seed, index, config.pi, &mut signal);
    combine_noise(z0, &z, config.rho, config.mu, &signal, &mut x);
    Trial { index, x, signal }
}

/// Lazy stream of trials `0..n_trials`.
pub struct TrialStream {
    config: GaussianModelConfig,
    next: u64,
    end: u64,
}

impl Iterator for TrialStream {
    type Item = Trial;

    fn next(&mut self) -> Option<Trial> {
        if self.next >= self.end {
            return None;
        }
        let t = draw_trial(&self.config, self.next);
        self.next += 1;
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for TrialStream {}

pub fn sample_model(config: &GaussianModelConfig, n_trials: u64) -> Result<TrialStream> {
    config.validate()?;
    Ok(TrialStream { config: *config, next: 0, end: n_trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn correlation(pairs: &[(f64, f64)]) -> f64 {
        let n = pairs.len() as f64;
        let (mx, my) = pairs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn full_correlation_gives_identical_coordinates() {
        let cfg = GaussianModelConfig::null(5, 1.0, 3);
        for t in sample_model(&cfg, 50).unwrap() {
            for &x in &t.x {
                assert!((x - t.x[0]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sample_correlation_matches_rho() {
        for &rho in &[0.0, 0.5] {
            let cfg = GaussianModelConfig::null(2, rho, 11);
            let pairs: Vec<(f64, f64)> =
                sample_model(&cfg, 100_000).unwrap().map(|t| (t.x[0], t.x[1])).collect();
            let c = correlation(&pairs);
            // s.e. of a sample correlation is about (1 - rho^2) / sqrt(n)
            let se = (1.0 - rho * rho) / (pairs.len() as f64).sqrt();
            assert!((c - rho).abs() < 3.0 * se, "rho {rho}: {c}");
        }
    }

    #[test]
    fn deterministic_per_seed_and_trial() {
        let cfg = GaussianModelConfig { m: 4, rho: 0.3, mu: 1.0, pi: 0.5, seed: 9 };
        let a: Vec<Trial> = sample_model(&cfg, 5).unwrap().collect();
        let b: Vec<Trial> = sample_model(&cfg, 5).unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(draw_trial(&cfg, 3), a[3]);
        let other = GaussianModelConfig { seed: 10, ..cfg };
        assert_ne!(draw_trial(&other, 3).x, a[3].x);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = GaussianModelConfig::null(3, 0.5, 0);
        assert!(GaussianModelConfig { rho: 1.5, ..base }.validate().is_err());
        assert!(GaussianModelConfig { pi: -0.1, ..base }.validate().is_err());
        assert!(GaussianModelConfig { mu: -1.0, ..base }.validate().is_err());
        assert!(GaussianModelConfig { m: 0, ..base }.validate().is_err());
    }
}
