//! Automatic selection of large rejection sets.

use serde::Serialize;

use super::engine::{ClosedTesting, Statistic};
use crate::error::{Error, Result};
use crate::scores::SubsetQuery;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Guarantee {
    /// No false rejections with probability at least `1 - alpha`.
    Fwer { alpha: f64 },
    /// False discovery proportion at most `gamma` with probability at least
    /// `1 - alpha`.
    Fdp { gamma: f64, alpha: f64 },
}

impl std::fmt::Display for Guarantee {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Guarantee::Fwer { alpha } => write!(f, "FWER <= {alpha}"),
            Guarantee::Fdp { gamma, alpha } => write!(f, "FDP <= {gamma} with prob >= {}", 1.0 - alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    /// Selected hypotheses as ascending 0-based indices.
    pub selected: Vec<usize>,
    pub size: usize,
    pub guarantee: Guarantee,
    pub chain_used: String,
}

fn from_positions(ct: &ClosedTesting<'_>, first: usize) -> Vec<usize> {
    let mut out: Vec<usize> = ct.scores().order()[first..].to_vec();
    out.sort_unstable();
    out
}

impl ClosedTesting<'_> {
    /// Sorted position of the largest p-value rejected by closed testing;
    /// `m` when none is. All smaller p-values are rejected too.
    pub fn fwer_first_position(&self) -> usize {
        match &self.statistic {
            Statistic::Sum(h) => self.fwer_sweep(h.h_values()),
            _ => self.fwer_by_search(),
        }
    }

    /// Single pass over the descending transformed scores `u_1 >= ... >= u_m`.
    ///
    /// Position `k` is rejected iff `u_k + P_{s-1} <= g(s)` for `s < k` and
    /// `P_s <= g(s)` for `s >= k`, with `P` the prefix sums. The state
    /// `(k, s)` advances one step at a time: below the diagonal `Q = u_k`
    /// and `c = g(s) - P_{s-1}`; on and above it `Q = u_k + ... + u_s` and
    /// `c = g(s) - P_{k-1}`. A failed check moves to `k + 1`, whose
    /// earlier checks are implied by monotonicity.
    fn fwer_sweep(&self, hv: &[f64]) -> usize {
        let m = self.m();
        let g = &self.g;
        let u = |i: usize| hv[i - 1];
        let (mut k, mut s) = (1usize, 1usize);
        let mut q = u(1);
        let mut c = g.at(1);
        while k <= m {
            if q > c {
                if s > k {
                    c -= u(k);
                    q -= u(k);
                } else if k < m {
                    q = q - u(k) + u(k + 1);
                }
                k += 1;
            } else {
                if s == m {
                    break;
                }
                c += g.at(s + 1) - g.at(s);
                if s >= k {
                    q += u(s + 1);
                } else {
                    c -= u(s);
                }
                s += 1;
            }
        }
        k - 1
    }

    /// Bisection over positions using single-hypothesis closed tests.
    fn fwer_by_search(&self) -> usize {
        let m = self.m();
        let rejected = |pos: usize| {
            let mut mask = vec![false; m];
            mask[pos] = true;
            self.post_hoc_reject(&SubsetQuery::from_position_mask(&mask, self.scores()))
        };
        let (mut lo, mut hi) = (0usize, m);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if rejected(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// All elementary hypotheses rejected by closed testing: the largest set
    /// with a zero bound on false discoveries.
    pub fn largest_fwer_set(&self) -> SelectionResult {
        let first = self.fwer_first_position();
        let selected = from_positions(self, first);
        SelectionResult {
            size: selected.len(),
            selected,
            guarantee: Guarantee::Fwer { alpha: self.alpha() },
            chain_used: "elementary hypotheses by ascending p-value".into(),
        }
    }

    /// Largest member `S_k` of a nested chain with `e(S_k) <= gamma |S_k|`.
    ///
    /// Without a chain, `S_k` is the set of the `k` smallest p-values. After
    /// a failure at `S_k` no member larger than `(|S_k| - e) / (1 - gamma)`
    /// can qualify, so the search jumps there.
    pub fn largest_fdp_set(&self, gamma: f64, chain: Option<&[SubsetQuery]>) -> Result<SelectionResult> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidGamma(gamma));
        }
        let m = self.m();
        let default_chain;
        let (members, description): (Vec<SubsetQuery>, String) = match chain {
            Some(c) => {
                for w in c.windows(2) {
                    if w[1].len() <= w[0].len() {
                        return Err(Error::InvalidConfig("chain sizes must increase strictly".into()));
                    }
                }
                (c.to_vec(), format!("custom nested chain of {} sets", c.len()))
            }
            None => {
                default_chain = (1..=m).map(|k| SubsetQuery::smallest(k, self.scores())).collect();
                (default_chain, "k smallest p-values, k = 1..m".into())
            }
        };
        // FDP <= 0 is the familywise statement
        let guarantee = if gamma == 0.0 {
            Guarantee::Fwer { alpha: self.alpha() }
        } else {
            Guarantee::Fdp { gamma, alpha: self.alpha() }
        };
        let sizes: Vec<usize> = members.iter().map(SubsetQuery::len).collect();
        let mut idx = members.len();
        while idx > 0 {
            let set = &members[idx - 1];
            let size = sizes[idx - 1];
            let e = self.fdp_bound(set);
            if e as f64 <= gamma * size as f64 {
                let mut selected = set.members().to_vec();
                selected.sort_unstable();
                return Ok(SelectionResult { size: selected.len(), selected, guarantee, chain_used: description });
            }
            let limit = ((size - e) as f64 / (1.0 - gamma)).floor() as usize;
            let limit = limit.min(size - 1);
            // number of chain members with size <= limit
            idx = sizes[..idx - 1].partition_point(|&s| s <= limit);
        }
        Ok(SelectionResult { selected: Vec::new(), size: 0, guarantee, chain_used: description })
    }
}
