//! Closed testing: adjusted p-values, post-hoc rejection, bounds on false
//! discoveries and automatic selection, with an exhaustive reference.

mod engine;
mod fdp;
mod oracle;
mod select;

pub use engine::{
    adjusted_p_closed, adjusted_p_local, coma, local_test, post_hoc_reject, ClosedTesting, ClosureResult,
};
pub use oracle::{brute_force_closure, BruteForceClosure, ORACLE_MAX_M};
pub use select::{Guarantee, SelectionResult};

use crate::calibration::LocalTestSpec;
use crate::error::Result;
use crate::scores::{ScoreSet, SubsetQuery};

pub fn fdp_bound(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery, alpha: f64) -> Result<usize> {
    Ok(ClosedTesting::new(scores, spec, alpha)?.fdp_bound(query))
}

pub fn largest_fwer_set(scores: &ScoreSet, spec: &LocalTestSpec, alpha: f64) -> Result<SelectionResult> {
    Ok(ClosedTesting::new(scores, spec, alpha)?.largest_fwer_set())
}

pub fn largest_fdp_set(
    scores: &ScoreSet,
    spec: &LocalTestSpec,
    alpha: f64,
    gamma: f64,
    chain: Option<&[SubsetQuery]>,
) -> Result<SelectionResult> {
    ClosedTesting::new(scores, spec, alpha)?.largest_fdp_set(gamma, chain)
}
