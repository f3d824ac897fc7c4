//! Equicorrelated Gaussian model: sampler, conditional moments, and limit
//! formulas for type-I error and power.

mod model;
mod montecarlo;
pub mod quadrature;
mod theory;

pub use model::{
    combine_noise, draw_noise, draw_signal, draw_trial, p_value, sample_model, stream_rng,
    GaussianModelConfig, SignalMean, Trial, TrialStream,
};
pub use montecarlo::{
    empirical_power, empirical_type1, rejection_curve, EstimateKind, MeanTest, PowerEstimate,
};
pub use theory::{
    asymptotic_power, asymptotic_type1, detection_boundary, g_rho_r, g_rho_r_inverse,
    is_integrable, transformed_moment, transformed_moment_inverse, DIVERGENT, Z_RANGE,
};
