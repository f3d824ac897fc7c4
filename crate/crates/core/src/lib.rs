//! Closed testing with generalized-mean local tests.
//!
//! Scores are p-values. A local test rejects an intersection hypothesis
//! `H_S` when the generalized mean `M_r` of the p-values in `S` falls below
//! a size-dependent critical value; closed testing then rejects `H_S` only
//! if every superset is rejected locally. For finite `r` the local test is
//! a sum of transformed scores, which the [`closure`] shortcuts exploit to
//! answer queries in linear time after sorting.

pub mod calibration;
pub mod closure;
pub mod error;
pub mod gaussmodel;
pub mod normal;
pub mod scores;

pub use calibration::{threshold_fn, Backend, Calibration, CalibrationTable, LocalTestSpec, ThresholdFn};
pub use error::{Error, Result};
pub use scores::{build_score_set, generalized_mean, transform, ScoreSet, SubsetQuery, TransformedScores};
