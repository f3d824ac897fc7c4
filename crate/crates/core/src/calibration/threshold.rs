//! Local test specifications and their critical values.

use std::sync::Arc;

use super::asymptotic::{check_level, gauss_asymptotic_threshold};
use super::empirical::CalibrationTable;
use super::vovk::vovk_alpha_factor;
use crate::error::{Error, Result};
use crate::scores::{h_inverse, h_transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    ArbitraryDep,
    GaussAsymptotic,
    EmpiricalTable,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Calibration {
    /// Valid under any dependence.
    ArbitraryDep,
    /// Asymptotically valid under equicorrelated Gaussian scores.
    GaussAsymptotic,
    /// Monte Carlo table at a fixed level.
    Empirical(Arc<CalibrationTable>),
}

/// A symmetric local test: reject `H_S` when `M_r` over `S` is at most
/// `c(|S|, alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTestSpec {
    r: f64,
    calibration: Calibration,
}

impl LocalTestSpec {
    pub fn new(r: f64, calibration: Calibration) -> Result<Self> {
        if r.is_nan() {
            return Err(Error::InvalidExponent(r));
        }
        match &calibration {
            Calibration::ArbitraryDep => {}
            Calibration::GaussAsymptotic if !r.is_finite() => return Err(Error::InvalidExponent(r)),
            Calibration::GaussAsymptotic => {}
            Calibration::Empirical(table) => {
                if table.r != r {
                    return Err(Error::TableMismatch(format!(
                        "table was built for r = {}, not r = {r}",
                        table.r
                    )));
                }
            }
        }
        Ok(Self { r, calibration })
    }

    pub fn arbitrary(r: f64) -> Result<Self> {
        Self::new(r, Calibration::ArbitraryDep)
    }

    pub fn gauss(r: f64) -> Result<Self> {
        Self::new(r, Calibration::GaussAsymptotic)
    }

    pub fn empirical(table: CalibrationTable) -> Self {
        Self { r: table.r, calibration: Calibration::Empirical(Arc::new(table)) }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }

    pub fn backend(&self) -> Backend {
        match self.calibration {
            Calibration::ArbitraryDep => Backend::ArbitraryDep,
            Calibration::GaussAsymptotic => Backend::GaussAsymptotic,
            Calibration::Empirical(_) => Backend::EmpiricalTable,
        }
    }

    /// Finite `r`: the test compares a sum of transformed scores.
    pub fn is_separable(&self) -> bool {
        self.r.is_finite()
    }
}

/// Critical values of a [`LocalTestSpec`] for sets of size `1..=m`.
///
/// Sizes one are always tested at `alpha` itself, since `M_r(p) = p`.
#[derive(Debug, Clone)]
pub struct ThresholdFn {
    spec: LocalTestSpec,
    m: usize,
}

pub fn threshold_fn(spec: &LocalTestSpec, m: usize) -> Result<ThresholdFn> {
    if m == 0 {
        return Err(Error::InvalidSize(0));
    }
    if let Calibration::Empirical(table) = &spec.calibration {
        if table.max_size() < m {
            return Err(Error::TableMismatch(format!(
                "table covers sizes up to {}, need {m}",
                table.max_size()
            )));
        }
    }
    Ok(ThresholdFn { spec: spec.clone(), m })
}

impl ThresholdFn {
    pub fn spec(&self) -> &LocalTestSpec {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check_size(&self, s: usize) -> Result<()> {
        if s == 0 || s > self.m {
            Err(Error::InvalidSize(s))
        } else {
            Ok(())
        }
    }

    /// Multiplier turning `M_r` into a valid p-value under arbitrary
    /// dependence. `M_{-inf}` already includes the Bonferroni factor.
    fn arbitrary_inflation(&self, s: usize) -> Result<f64> {
        if self.spec.r == f64::NEG_INFINITY {
            Ok(1.0)
        } else {
            vovk_alpha_factor(self.spec.r, s)
        }
    }

    /// Whether `c(s, alpha)` is the same for every `s >= 2`.
    pub fn is_size_free(&self) -> bool {
        match self.spec.calibration {
            Calibration::GaussAsymptotic => self.spec.r > -1.0,
            Calibration::ArbitraryDep => self.spec.r > -1.0,
            Calibration::Empirical(_) => false,
        }
    }

    /// Critical value `c(s, alpha)` on the scale of `M_r`.
    pub fn critical_value(&self, s: usize, alpha: f64) -> Result<f64> {
        check_level(alpha)?;
        self.check_size(s)?;
        if s == 1 {
            return Ok(alpha);
        }
        match &self.spec.calibration {
            Calibration::ArbitraryDep => Ok(alpha / self.arbitrary_inflation(s)?),
            Calibration::GaussAsymptotic => gauss_asymptotic_threshold(self.spec.r, s, alpha),
            Calibration::Empirical(table) => {
                self.check_table_level(table, alpha)?;
                table.lookup(s)
            }
        }
    }

    fn check_table_level(&self, table: &CalibrationTable, alpha: f64) -> Result<()> {
        if (table.alpha - alpha).abs() > 1e-12 {
            return Err(Error::TableMismatch(format!(
                "table was calibrated at alpha = {}, not {alpha}",
                table.alpha
            )));
        }
        Ok(())
    }

    /// Sum-scale threshold `g(s, alpha) = s h(c(s, alpha))`.
    pub fn g(&self, s: usize, alpha: f64) -> Result<f64> {
        if !self.spec.is_separable() {
            return Err(Error::InvalidExponent(self.spec.r));
        }
        Ok(s as f64 * h_transform(self.spec.r, self.critical_value(s, alpha)?))
    }

    /// Critical values for every size; entry 0 is unused.
    pub fn critical_values(&self, alpha: f64) -> Result<Vec<f64>> {
        check_level(alpha)?;
        let mut out = vec![f64::NAN; self.m + 1];
        if self.is_size_free() && self.m >= 2 {
            let c = self.critical_value(2, alpha)?;
            out[2..].fill(c);
        } else {
            for (s, slot) in out.iter_mut().enumerate().skip(2) {
                *slot = self.critical_value(s, alpha)?;
            }
        }
        out[1] = alpha;
        Ok(out)
    }

    /// `g(s, alpha)` for every size; entry 0 is unused.
    pub fn sum_thresholds(&self, alpha: f64) -> Result<Vec<f64>> {
        if !self.spec.is_separable() {
            return Err(Error::InvalidExponent(self.spec.r));
        }
        let r = self.spec.r;
        let mut out = self.critical_values(alpha)?;
        for (s, c) in out.iter_mut().enumerate().skip(1) {
            *c = s as f64 * h_transform(r, *c);
        }
        Ok(out)
    }

    pub fn has_inverse(&self) -> bool {
        !matches!(self.spec.calibration, Calibration::Empirical(_))
    }

    /// Local p-value of a set of size `s` whose generalized mean is `mean`:
    /// the smallest `alpha` at which `mean <= c(s, alpha)`, capped at 1.
    pub fn local_p(&self, s: usize, mean: f64) -> Result<f64> {
        self.check_size(s)?;
        if !self.has_inverse() {
            return Err(Error::UnsupportedInverse);
        }
        if s == 1 {
            return Ok(mean.min(1.0));
        }
        let r = self.spec.r;
        let sf = s as f64;
        let p = match self.spec.calibration {
            Calibration::ArbitraryDep => self.arbitrary_inflation(s)? * mean,
            _ if r > 0.0 => {
                let cap = 1.0 / vovk_alpha_factor(r, s)?;
                if mean <= cap {
                    mean
                } else {
                    1.0
                }
            }
            _ if r > -1.0 => self.invert_size_free(mean)?,
            _ if r == -1.0 => {
                let t = mean * sf.ln();
                if t < 1.0 {
                    mean / (1.0 - t)
                } else {
                    1.0
                }
            }
            _ => mean * sf.powf(1.0 - 1.0 / r.abs()),
        };
        Ok(p.min(1.0))
    }

    /// Local p-value from a sum of transformed scores.
    pub fn alpha_for_sum(&self, s: usize, sum: f64) -> Result<f64> {
        if !self.spec.is_separable() {
            return Err(Error::InvalidExponent(self.spec.r));
        }
        self.local_p(s, h_inverse(self.spec.r, sum / s as f64))
    }

    /// Smallest `alpha` with `c(alpha) >= mean` when `c` has no closed-form
    /// inverse; `c` is continuous and increasing in `alpha`.
    fn invert_size_free(&self, mean: f64) -> Result<f64> {
        let r = self.spec.r;
        let c = |a: f64| gauss_asymptotic_threshold(r, 2, a);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if mean <= 0.0 {
            return Ok(0.0);
        }
        let top = 1.0 - 1e-12;
        if c(top)? < mean {
            return Ok(1.0);
        }
        hi = hi.min(top);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if c(mid)? >= mean {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        Ok(hi)
    }
}
