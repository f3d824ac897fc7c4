//! Monte Carlo calibration tables for the equicorrelated null model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::asymptotic::{check_level, rho_grid};
use super::interp::{pchip_eval, pchip_knots, Knot};
use crate::error::{Error, Result};
use crate::gaussmodel::{combine_noise, draw_noise, p_value};
use crate::scores::{h_inverse, h_transform};

/// Below this many trials a table is flagged as noisy.
pub const MIN_RECOMMENDED_TRIALS: u64 = 10_000;

/// Sizes `1..=10`, then every fifth size, always ending at `max_m`.
pub fn calibration_sizes(max_m: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..=max_m.min(10)).collect();
    let mut s = 15;
    while s <= max_m {
        sizes.push(s);
        s += 5;
    }
    if sizes.last() != Some(&max_m) {
        sizes.push(max_m);
    }
    sizes
}

/// Worst-case-over-correlation empirical critical values `c*(s, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub r: f64,
    pub alpha: f64,
    pub n_trials: u64,
    pub seed: u64,
    pub rho_grid_step: f64,
    /// `(s, c*)` pairs, strictly increasing in `s`.
    pub grid: Vec<(usize, f64)>,
    /// Monotone cubic over `(ln s, ln c*)`.
    pub interpolant_knots: Vec<Knot>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CalibrationTable {
    pub fn max_size(&self) -> usize {
        self.grid.last().map_or(0, |g| g.0)
    }

    /// Critical value for size `s`: stored values on the grid, the
    /// interpolant in between.
    pub fn lookup(&self, s: usize) -> Result<f64> {
        if s == 0 {
            return Err(Error::InvalidSize(0));
        }
        let i = match self.grid.binary_search_by_key(&s, |g| g.0) {
            Ok(i) => return Ok(self.grid[i].1),
            Err(i) if i < self.grid.len() => i,
            Err(_) => {
                return Err(Error::TableMismatch(format!("size {s} exceeds table maximum {}", self.max_size())))
            }
        };
        let (a, b) = (self.grid[i - 1].1, self.grid[i].1);
        let v = pchip_eval(&self.interpolant_knots, (s as f64).ln()).map_or(a, f64::exp);
        // the monotone cubic stays between its knots; remove exp/ln rounding
        Ok(v.clamp(a.min(b), a.max(b)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text).map_err(|e| Error::TableMismatch(e.to_string()))?;
        table.check()?;
        Ok(table)
    }

    fn check(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid[0].0 != 1 {
            return Err(Error::TableMismatch("grid must start at size 1".into()));
        }
        if self.grid.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::TableMismatch("grid sizes must increase strictly".into()));
        }
        if self.interpolant_knots.len() != self.grid.len() {
            return Err(Error::TableMismatch("one interpolation knot per grid size expected".into()));
        }
        check_level(self.alpha)
    }
}

/// Lower empirical `alpha`-quantile: the order statistic at 1-based index
/// `ceil(alpha n)`.
fn lower_quantile(values: &mut [f64], alpha: f64) -> f64 {
    let k = ((alpha * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let (_, v, _) = values.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
    *v
}

/// Estimates `c*(s, alpha)` for every calibration size: the smallest over a
/// correlation grid of the lower `alpha`-quantile of `M_r` on the first `s`
/// coordinates of null equicorrelated p-values.
///
/// Trial `t` reuses the same normals for every correlation.
pub fn empirical_calibration(r: f64, alpha: f64, max_m: usize, n_trials: u64, seed: u64) -> Result<CalibrationTable> {
    check_level(alpha)?;
    if max_m == 0 {
        return Err(Error::InvalidSize(0));
    }
    if !r.is_finite() {
        return Err(Error::InvalidExponent(r));
    }
    if n_trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let mut warnings = Vec::new();
    if n_trials < MIN_RECOMMENDED_TRIALS {
        warnings.push(format!(
            "{n_trials} trials is below the recommended {MIN_RECOMMENDED_TRIALS}; quantiles are noisy"
        ));
    }
    let sizes = calibration_sizes(max_m);
    let step = super::asymptotic::RHO_GRID_STEP;
    let mut best = vec![f64::INFINITY; sizes.len()];
    for rho in rho_grid(step) {
        if rho == 1.0 {
            // identical p-values: M_r = p_1 is uniform for every size
            for b in best.iter_mut() {
                *b = b.min(alpha);
            }
            continue;
        }
        let samples: Vec<Vec<f64>> = (0..n_trials)
            .into_par_iter()
            .map_init(
                || (vec![0.0; max_m], vec![0.0; max_m], vec![false; max_m]),
                |(z, x, mask), t| {
                    let z0 = draw_noise(seed, t, z);
                    combine_noise(z0, z, rho, 0.0, mask, x);
                    let mut out = Vec::with_capacity(sizes.len());
                    let mut acc = 0.0;
                    let mut next = 0;
                    for (i, &xi) in x.iter().enumerate() {
                        acc += h_transform(r, p_value(xi));
                        if sizes[next] == i + 1 {
                            out.push(h_inverse(r, acc / (i + 1) as f64));
                            next += 1;
                        }
                    }
                    out
                },
            )
            .collect();
        let mut column = vec![0.0; samples.len()];
        for (j, b) in best.iter_mut().enumerate() {
            for (c, s) in column.iter_mut().zip(&samples) {
                *c = s[j];
            }
            *b = b.min(lower_quantile(&mut column, alpha));
        }
    }
    let grid: Vec<(usize, f64)> = sizes.iter().copied().zip(best).collect();
    let xs: Vec<f64> = grid.iter().map(|g| (g.0 as f64).ln()).collect();
    let ys: Vec<f64> = grid.iter().map(|g| g.1.ln()).collect();
    Ok(CalibrationTable {
        r,
        alpha,
        n_trials,
        seed,
        rho_grid_step: step,
        interpolant_knots: pchip_knots(&xs, &ys),
        grid,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_grid() {
        assert_eq!(calibration_sizes(1), vec![1]);
        assert_eq!(calibration_sizes(12), vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12]);
        let g = calibration_sizes(1000);
        assert_eq!(g.len(), 10 + 198);
        assert_eq!(&g[9..12], &[10, 15, 20]);
        assert_eq!(*g.last().unwrap(), 1000);
    }

    #[test]
    fn quantile_index() {
        let mut v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(lower_quantile(&mut v, 0.05), 5.0);
        assert_eq!(lower_quantile(&mut v, 0.051), 6.0);
    }

    #[test]
    fn small_table_is_sane_and_round_trips() {
        let t = empirical_calibration(1.0, 0.1, 30, 2_000, 5).unwrap();
        assert_eq!(t.warnings.len(), 1);
        let se = (0.1f64 * 0.9 / 2_000.0).sqrt();
        assert!((t.lookup(1).unwrap() - 0.1).abs() < 3.0 * se + 1e-12);
        for &(s, c) in &t.grid {
            assert!(c <= 0.1 + 1e-12 && c > 0.0, "{s} {c}");
        }
        let back = CalibrationTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        for s in 1..=30 {
            assert_eq!(back.lookup(s).unwrap().to_bits(), t.lookup(s).unwrap().to_bits());
        }
        assert!(t.lookup(31).is_err());
        let again = empirical_calibration(1.0, 0.1, 30, 2_000, 5).unwrap();
        assert_eq!(again, t);
    }
}
