//! Asymptotic thresholds of the `M_r` test under equicorrelated Gaussian
//! p-values, worst case over the correlation.

use super::vovk::vovk_alpha_factor;
use crate::error::{Error, Result};
use crate::gaussmodel::transformed_moment;
use crate::normal;
use crate::scores::h_inverse;

/// Resolution of the worst-correlation search.
pub const RHO_GRID_STEP: f64 = 0.01;

pub(crate) fn rho_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

pub(crate) fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(alpha))
    }
}

/// Worst correlation and the threshold it implies for `-1 < r <= 0`.
///
/// The limit test rejects when the conditional moment at the factor value
/// falls below `h(c)`; requiring level `alpha` at every `rho` gives
/// `h(c) = min over rho of T_rho(z_alpha)`.
pub fn worst_case_rho(r: f64, alpha: f64) -> Result<(f64, f64)> {
    check_level(alpha)?;
    if !(r > -1.0 && r <= 0.0) {
        return Err(Error::InvalidExponent(r));
    }
    let z = normal::quantile(1.0 - alpha);
    let mut best = (1.0, f64::INFINITY);
    for rho in rho_grid(RHO_GRID_STEP) {
        let t = transformed_moment(z, rho, r)?;
        if t < best.1 {
            best = (rho, t);
        }
    }
    Ok((best.0, h_inverse(r, best.1)))
}

/// Asymptotic critical value `c_r(m, alpha)` of `M_r` for equicorrelated
/// Gaussian p-values.
///
/// For `r > 0` this is `min(alpha, (r + 1)^(-1/r))`; for `-1 < r <= 0` the
/// worst case over a 0.01 grid of correlations; `alpha / (1 + alpha ln m)`
/// at `r = -1`; `alpha m^(1/|r| - 1)` below.
pub fn gauss_asymptotic_threshold(r: f64, m: usize, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    if m == 0 {
        return Err(Error::InvalidSize(0));
    }
    if !r.is_finite() {
        return Err(Error::InvalidExponent(r));
    }
    let mf = m as f64;
    if r > 0.0 {
        Ok(alpha.min(1.0 / vovk_alpha_factor(r, m)?))
    } else if r > -1.0 {
        // rho = 1 gives exactly alpha; clip the rounding of h^-1(h(alpha))
        Ok(worst_case_rho(r, alpha)?.1.min(alpha))
    } else if r == -1.0 {
        Ok(alpha / (1.0 + alpha * mf.ln()))
    } else {
        Ok(alpha * mf.powf(1.0 / r.abs() - 1.0))
    }
}
