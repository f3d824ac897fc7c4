//! Arbitrary-dependence inflation factors for generalized means.

use crate::error::{Error, Result};

/// Inflation `a` such that `a * M_r` is a valid p-value for any dependence
/// among `m` p-values.
///
/// `(r + 1)^(1/r)` for `r > -1`, with limits `e` at `r = 0` and `1` at
/// `r = inf`; the harmonic case uses the root of
/// [`harmonic_root`]; `r / (r + 1) * m^(1 + 1/r)` for `r < -1`, with limit
/// `m` at `r = -inf`.
pub fn vovk_alpha_factor(r: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidSize(0));
    }
    if r.is_nan() {
        return Err(Error::InvalidExponent(r));
    }
    let mf = m as f64;
    let factor = if r == f64::INFINITY {
        1.0
    } else if r == f64::NEG_INFINITY {
        mf
    } else if r == 0.0 {
        std::f64::consts::E
    } else if r > -1.0 {
        (r.ln_1p() / r).exp()
    } else if r == -1.0 {
        if m <= 2 {
            mf
        } else {
            let y = harmonic_root(m)?;
            (y + mf).powi(2) / ((y + 1.0) * mf)
        }
    } else {
        r / (r + 1.0) * mf.powf(1.0 + 1.0 / r)
    };
    Ok(factor)
}

/// `y - m ((y + 1) ln(1 + y) - y) / y`: the root equation
/// `y^2 = m ((y + 1) ln(1 + y) - y)` divided by `y`.
pub fn harmonic_root_residual(m: usize, y: f64) -> f64 {
    let mf = m as f64;
    y - mf * ((y + 1.0) * y.ln_1p() - y) / y
}

/// Unique positive root of `y^2 = m ((y + 1) ln(1 + y) - y)` for `m >= 3`,
/// by bisection on `(1e-8, 1e6 m)`.
pub fn harmonic_root(m: usize) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidSize(m));
    }
    let (mut lo, mut hi) = (1e-8, 1e6 * m as f64);
    // negative below the root, positive above
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if harmonic_root_residual(m, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = (harmonic_root_residual(m, lo).abs(), harmonic_root_residual(m, hi).abs());
    Ok(if rl <= rh { lo } else { hi })
}
