//! Simultaneous upper bounds on the number of true nulls in a set.

use super::engine::{ClosedTesting, Statistic};
use crate::scores::SubsetQuery;

/// `x - 1`, or the nearest value below `x` when `1` is lost to rounding.
fn below(x: f64) -> f64 {
    let y = x - 1.0;
    if y < x {
        y
    } else {
        x - x.abs() * 4.0 * f64::EPSILON
    }
}

impl ClosedTesting<'_> {
    /// Upper bound `e(S)` on the number of true nulls in `S`: the size of
    /// the largest subset of `S` that closed testing does not reject.
    pub fn fdp_bound(&self, query: &SubsetQuery) -> usize {
        if query.is_empty() {
            return 0;
        }
        match &self.statistic {
            Statistic::Sum(h) => self.sweep_bound(h.h_values(), query),
            Statistic::Bonferroni => {
                let first = self.fwer_first_position();
                query.len() - query.positions().iter().filter(|&&q| q >= first).count()
            }
            Statistic::Max => {
                if self.post_hoc_reject(query) {
                    0
                } else {
                    query.len()
                }
            }
        }
    }

    /// Linear sweep over the sizes `a` of candidate non-rejected supersets.
    ///
    /// Indices are 1-based as in the usual presentation: `u` gives the
    /// transformed scores of `S`, `v` those of `S^c`, both non-increasing,
    /// with sentinels `v(0)` and `u(s + 1)`, plus `v(m - s + 1) = -inf` so
    /// that sizes beyond `m - s` complement scores are still visited.
    fn sweep_bound(&self, hv: &[f64], query: &SubsetQuery) -> usize {
        let m = self.m();
        let s = query.len();
        let n_c = m - s;
        let (pos, comp) = (query.positions(), query.complement());
        let (v0, u_end) = if n_c == 0 {
            (hv[pos[0]], below(hv[pos[s - 1]]))
        } else {
            (hv[pos[0]].max(hv[comp[0]]), below(hv[pos[s - 1]].min(hv[comp[n_c - 1]])))
        };
        let u = |i: usize| if i <= s { hv[pos[i - 1]] } else { u_end };
        // past the last complement score only members of S can be added
        let v = |j: usize| match j {
            0 => v0,
            j if j <= n_c => hv[comp[j - 1]],
            _ => f64::NEG_INFINITY,
        };
        let g = &self.g;

        let s_i = s as isize;
        let (mut k, mut a, mut b): (isize, isize, isize) = (1, 1, -1);
        let mut q = 0.0;
        while a <= m as isize && k + b <= s_i {
            let j = (a - k - b) as usize;
            let next = (k + b + 1) as usize;
            if a == 1 || u(next) >= v(j) {
                q += u(next);
                b += 1;
            } else {
                q += v(j);
            }
            while k <= s_i.min(a) && q > g.at(a as usize) {
                if b > 0 {
                    b -= 1;
                } else {
                    q += u((k + 1) as usize) - v((a - k) as usize);
                }
                k += 1;
            }
            a += 1;
        }
        (k - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use crate::calibration::LocalTestSpec;
    use crate::closure::ClosedTesting;
    use crate::scores::{build_score_set, SubsetQuery};

    #[test]
    fn trivial_bounds() {
        let sc = build_score_set(&[0.3, 0.9, 0.6]).unwrap();
        let ct = ClosedTesting::new(&sc, &LocalTestSpec::arbitrary(1.0).unwrap(), 0.05).unwrap();
        assert_eq!(ct.fdp_bound(&SubsetQuery::empty(&sc)), 0);
        for k in 1..=3 {
            assert_eq!(ct.fdp_bound(&SubsetQuery::smallest(k, &sc)), k);
        }
    }

    #[test]
    fn bonferroni_bound_counts_holm_rejections() {
        let sc = build_score_set(&[0.001, 0.011, 0.02, 0.5, 0.013]).unwrap();
        let ct = ClosedTesting::new(&sc, &LocalTestSpec::arbitrary(f64::NEG_INFINITY).unwrap(), 0.05).unwrap();
        // Holm at 0.05 rejects 0.001, 0.011, 0.013, 0.02
        let all = SubsetQuery::all(&sc);
        assert_eq!(ct.fdp_bound(&all), 1);
        assert_eq!(ct.largest_fwer_set().selected, vec![0, 1, 2, 4]);
    }

    #[test]
    fn huge_scores_keep_the_sentinel_below() {
        // r = -2 with p near the floor gives |h| far above 2^53
        let sc = build_score_set(&[1e-200, 1e-190, 0.5]).unwrap();
        let ct = ClosedTesting::new(&sc, &LocalTestSpec::arbitrary(-2.0).unwrap(), 0.05).unwrap();
        assert_eq!(ct.fdp_bound(&SubsetQuery::smallest(2, &sc)), 0);
        assert_eq!(ct.fdp_bound(&SubsetQuery::all(&sc)), 1);
    }
}
