//! Limit quantities of the equicorrelated model: `g_{rho,r}`, asymptotic
//! type-I error and power, and the detection boundary.

use super::model::SignalMean;
use super::quadrature::{conditional_expectation, Moment};
use crate::calibration::gauss_asymptotic_threshold;
use crate::error::{Error, Result};
use crate::normal;
use crate::scores::h_transform;

/// Search interval for `z0` in every inversion.
pub const Z_RANGE: f64 = 40.0;

/// Returned by [`g_rho_r`] where the conditional moment diverges.
pub const DIVERGENT: f64 = f64::INFINITY;

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("rho = {rho} must lie in [0, 1]")))
    }
}

fn check_finite_r(r: f64) -> Result<()> {
    if r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(r))
    }
}

/// `E[p^r | Z0 = z0]` is finite iff `r (rho - 1) < 1`.
pub fn is_integrable(rho: f64, r: f64) -> bool {
    r * (rho - 1.0) < 1.0
}

/// `E[h(p) | Z0 = z0]`, non-increasing in `z0` for every finite `r`.
///
/// Divergent cases return `-inf` (only possible for `r < 0`).
pub fn transformed_moment(z0: f64, rho: f64, r: f64) -> Result<f64> {
    check_rho(rho)?;
    check_finite_r(r)?;
    if !is_integrable(rho, r) {
        return Ok(f64::NEG_INFINITY);
    }
    if rho == 1.0 {
        let log_p = normal::log_cdf(-z0);
        return Ok(if r == 0.0 {
            log_p
        } else {
            r.signum() * (r * log_p).exp()
        });
    }
    if rho == 0.0 {
        return Ok(if r == 0.0 { -1.0 } else { r.signum() / (1.0 + r) });
    }
    let a = rho.sqrt() * z0;
    let b = (1.0 - rho).sqrt();
    Ok(if r == 0.0 {
        conditional_expectation(a, b, Moment::Log)
    } else {
        r.signum() * conditional_expectation(a, b, Moment::Power(r))
    })
}

/// `g_{rho,r}(z0) = E[p^r | Z0 = z0]`; [`DIVERGENT`] outside the
/// integrable region.
pub fn g_rho_r(z0: f64, rho: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        check_rho(rho)?;
        return Ok(1.0);
    }
    let t = transformed_moment(z0, rho, r)?;
    Ok(if t == f64::NEG_INFINITY { DIVERGENT } else { r.signum() * t })
}

/// Solves `transformed_moment(z0) = target` for `z0` by bisection on
/// `[-40, 40]`. `rho = 0` gives `+inf` by convention.
pub fn transformed_moment_inverse(target: f64, rho: f64, r: f64) -> Result<f64> {
    check_rho(rho)?;
    check_finite_r(r)?;
    if rho == 0.0 {
        return Ok(f64::INFINITY);
    }
    let moment = |z: f64| transformed_moment(z, rho, r);
    let (mut lo, mut hi) = (-Z_RANGE, Z_RANGE);
    let top = moment(lo)?;
    let bottom = moment(hi)?;
    let slack = 1e-12 * target.abs().max(1e-300);
    if !(target <= top + slack && target >= bottom - slack) || top == f64::NEG_INFINITY {
        return Err(Error::OutOfRange { target });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if moment(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Inverse of [`g_rho_r`] in `z0`. At `r = 0` the function is constant and
/// no inverse exists; the log moment is inverted by
/// [`transformed_moment_inverse`] instead.
pub fn g_rho_r_inverse(target: f64, rho: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::Unsupported(
            "g is identically 1 at r = 0; invert the log moment instead".into(),
        ));
    }
    transformed_moment_inverse(r.signum() * target, rho, r)
}

/// `Phi(-z)` where `z` solves `moment(z) = target`, clamped to the search
/// interval when the target lies outside the range.
fn crossing_probability(target: f64, rho: f64, r: f64) -> Result<f64> {
    match transformed_moment_inverse(target, rho, r) {
        Ok(z) => Ok(normal::sf(z)),
        Err(Error::OutOfRange { .. }) => {
            let top = transformed_moment(-Z_RANGE, rho, r)?;
            Ok(if target > top { 1.0 } else { 0.0 })
        }
        Err(e) => Err(e),
    }
}

/// Mean of `h(U)` for a uniform `U`: the `rho = 0` limit of the moment.
fn uniform_moment(r: f64) -> f64 {
    if r == 0.0 {
        -1.0
    } else if r > -1.0 {
        r.signum() / (1.0 + r)
    } else {
        f64::NEG_INFINITY
    }
}

/// Limiting type-I error of the `M_r` test at the asymptotic Gaussian
/// threshold.
pub fn asymptotic_type1(rho: f64, r: f64, alpha: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    if r == f64::INFINITY {
        return Ok(if rho == 1.0 { alpha } else { 0.0 });
    }
    if r <= -1.0 {
        return Ok(if rho == 0.0 { alpha } else { 0.0 });
    }
    let c = gauss_asymptotic_threshold(r, 1, alpha)?;
    let target = h_transform(r, c);
    if rho == 0.0 {
        return Ok(if uniform_moment(r) <= target { 1.0 } else { 0.0 });
    }
    crossing_probability(target, rho, r)
}

/// Limiting power of the `M_r` test at the asymptotic threshold for
/// `r >= 0`, a signal fraction `pi` and mean `mu`.
///
/// The limit event is `pi T(Z0 + mu/sqrt(rho)) + (1 - pi) T(Z0) <= h(c)`
/// with `T` the transformed moment. `T` is monotone so the event is
/// `Z0 >= z*`, and `z*` is found by bisection.
pub fn asymptotic_power(rho: f64, r: f64, alpha: f64, mu: SignalMean, pi: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::InvalidConfig(format!("pi = {pi} must lie in [0, 1]")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Unsupported(format!(
            "no closed-form asymptotic power for r = {r}; use empirical_power"
        )));
    }
    if let SignalMean::Finite(m) = mu {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::InvalidConfig(format!("mu = {m} must be finite and >= 0")));
        }
    }
    if pi == 0.0 || mu == SignalMean::Finite(0.0) {
        return asymptotic_type1(rho, r, alpha);
    }
    if pi == 1.0 && mu == SignalMean::Infinite {
        return Ok(1.0);
    }
    let c = gauss_asymptotic_threshold(r, 1, alpha)?;
    let target = h_transform(r, c);
    // Moment of a signal coordinate whose factor value is z.
    let signal_moment = |z: f64| -> Result<f64> {
        match mu {
            SignalMean::Infinite => Ok(if r == 0.0 { f64::NEG_INFINITY } else { 0.0 }),
            SignalMean::Finite(m) => {
                if rho == 0.0 {
                    let moment = if r == 0.0 { Moment::Log } else { Moment::Power(r) };
                    Ok(conditional_expectation(m, 1.0, moment))
                } else {
                    transformed_moment(z + m / rho.sqrt(), rho, r)
                }
            }
        }
    };
    let limit = |z: f64| -> Result<f64> {
        let s = signal_moment(z)?;
        if s == f64::NEG_INFINITY {
            return Ok(s);
        }
        Ok(pi * s + (1.0 - pi) * transformed_moment(z, rho, r)?)
    };
    if rho == 0.0 {
        return Ok(if limit(0.0)? <= target { 1.0 } else { 0.0 });
    }
    let (mut lo, mut hi) = (-Z_RANGE, Z_RANGE);
    if limit(lo)? <= target {
        return Ok(normal::sf(lo));
    }
    if limit(hi)? > target {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if limit(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(normal::sf(0.5 * (lo + hi)))
}

/// Smallest signal exponent `c` (with `mu = sqrt(2 c log m)`) at which the
/// test has full asymptotic power for sparsity `gamma` and correlation `rho`.
pub fn detection_boundary(rho: f64, gamma_sparsity: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(gamma_sparsity > 0.0 && gamma_sparsity <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "sparsity exponent {gamma_sparsity} must lie in (0, 1]"
        )));
    }
    let root = 1.0 - (gamma_sparsity * (1.0 - rho)).sqrt();
    Ok(root.max(0.0).powi(2))
}
