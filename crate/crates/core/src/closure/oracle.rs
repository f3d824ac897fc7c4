//! Exhaustive closed testing over the subset lattice, for small `m`.

use super::engine::ClosedTesting;
use crate::calibration::LocalTestSpec;
use crate::error::{Error, Result};
use crate::scores::{generalized_mean, ScoreSet};

pub const ORACLE_MAX_M: usize = 15;

/// Closure of every subset, indexed by bitmask over original indices
/// (bit `i` is hypothesis `i`, 0-based).
#[derive(Debug, Clone)]
pub struct BruteForceClosure {
    pub m: usize,
    pub local: Vec<bool>,
    pub closed: Vec<bool>,
    /// Size of the largest non-rejected subset.
    pub bound: Vec<u8>,
    pub p_local: Option<Vec<f64>>,
    pub p_closed: Option<Vec<f64>>,
}

impl BruteForceClosure {
    pub fn mask_of(indices: &[usize]) -> usize {
        indices.iter().fold(0, |acc, &i| acc | (1 << i))
    }

    /// Elementary hypotheses rejected after closure, ascending.
    pub fn rejected_elementary(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.closed[1 << i]).collect()
    }
}

pub fn brute_force_closure(scores: &ScoreSet, spec: &LocalTestSpec, alpha: f64) -> Result<BruteForceClosure> {
    let m = scores.m();
    if m > ORACLE_MAX_M {
        return Err(Error::OracleTooLarge { m, max: ORACLE_MAX_M });
    }
    let ct = ClosedTesting::new(scores, spec, alpha)?;
    let tf = ct.threshold();
    let values = scores.values();
    let full = 1usize << m;
    let mut local = vec![false; full];
    let mut p_local = tf.has_inverse().then(|| vec![0.0; full]);
    let mut buf = Vec::with_capacity(m);
    for mask in 1..full {
        buf.clear();
        buf.extend((0..m).filter(|i| mask & (1 << i) != 0).map(|i| values[i]));
        let s = buf.len();
        let mean = generalized_mean(spec.r(), &buf);
        local[mask] = mean <= tf.critical_value(s, alpha)?;
        if let Some(p) = p_local.as_mut() {
            p[mask] = tf.local_p(s, mean)?;
        }
    }
    let mut closed = vec![false; full];
    let mut p_closed = p_local.clone();
    for mask in (1..full).rev() {
        let mut ok = local[mask];
        for i in 0..m {
            let bit = 1 << i;
            if mask & bit == 0 {
                ok &= closed[mask | bit];
                if let Some(p) = p_closed.as_mut() {
                    p[mask] = p[mask].max(p[mask | bit]);
                }
            }
        }
        closed[mask] = ok;
    }
    let mut bound = vec![0u8; full];
    for mask in 1..full {
        bound[mask] = if !closed[mask] {
            mask.count_ones() as u8
        } else {
            (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| bound[mask ^ (1 << i)])
                .max()
                .unwrap_or(0)
        };
    }
    Ok(BruteForceClosure { m, local, closed, bound, p_local, p_closed })
}
