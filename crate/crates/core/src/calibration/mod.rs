//! Critical values for generalized-mean local tests.

mod asymptotic;
mod empirical;
mod interp;
mod threshold;
mod vovk;

pub use asymptotic::{gauss_asymptotic_threshold, worst_case_rho, RHO_GRID_STEP};
pub use empirical::{calibration_sizes, empirical_calibration, CalibrationTable, MIN_RECOMMENDED_TRIALS};
pub use interp::{pchip_eval, pchip_knots, Knot};
pub use threshold::{threshold_fn, Backend, Calibration, LocalTestSpec, ThresholdFn};
pub use vovk::{harmonic_root, harmonic_root_residual, vovk_alpha_factor};
