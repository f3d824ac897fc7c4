//! Score vectors, subset queries and the separable transform `h`.
//!
//! Scores are p-values. Internally hypotheses are indexed from 0; the
//! 1-based convention only appears at the CLI boundary and in
//! [`SubsetQuery::from_one_based`].

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Smallest value a stored p-value can take.
pub const P_FLOOR: f64 = f64::MIN_POSITIVE;

/// An immutable vector of p-values together with its descending sort order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    values: Vec<f64>,
    order: Vec<usize>,
    rank: Vec<usize>,
    sorted: Vec<f64>,
}

impl ScoreSet {
    /// Validates, clamps and stable-sorts `raw` in descending order.
    pub fn new(raw: &[f64]) -> Result<Self> {
        let values = validate(raw)?;
        let mut order: Vec<usize> = (0..values.len()).collect();
        // stable: ties keep original index order
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        Ok(Self::from_parts(values, order))
    }

    /// Builds a score set from values that are already non-increasing.
    ///
    /// Runs in O(m); used where the sort must stay outside the timed path.
    pub fn presorted(raw: &[f64]) -> Result<Self> {
        let values = validate(raw)?;
        if let Some(pos) = values.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::NotSorted(pos + 1));
        }
        let order = (0..values.len()).collect();
        Ok(Self::from_parts(values, order))
    }

    fn from_parts(values: Vec<f64>, order: Vec<usize>) -> Self {
        let mut rank = vec![0; values.len()];
        for (pos, &orig) in order.iter().enumerate() {
            rank[orig] = pos;
        }
        let sorted = order.iter().map(|&i| values[i]).collect();
        Self { values, order, rank, sorted }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Clamped values in original order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values in descending order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `order()[pos]` is the original index at sorted position `pos`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sorted position of original index `i`.
    pub fn position(&self, i: usize) -> usize {
        self.rank[i]
    }
}

/// Spec-facing constructor.
pub fn build_score_set(raw: &[f64]) -> Result<ScoreSet> {
    ScoreSet::new(raw)
}

fn validate(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    raw.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value.is_nan() || !(0.0..=1.0).contains(&value) {
                Err(Error::InvalidScore { index, value })
            } else {
                Ok(value.max(P_FLOOR))
            }
        })
        .collect()
}

/// A subset `S` of the hypotheses, stored as sorted positions of a fixed
/// [`ScoreSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetQuery {
    m: usize,
    members: Vec<usize>,
    positions: Vec<usize>,
    complement: Vec<usize>,
}

impl SubsetQuery {
    /// `indices` are 0-based original indices.
    pub fn new(indices: &[usize], scores: &ScoreSet) -> Result<Self> {
        let m = scores.m();
        let mut seen = vec![false; m];
        for &i in indices {
            if i >= m {
                return Err(Error::IndexOutOfRange { index: i + 1, m });
            }
            if seen[i] {
                return Err(Error::DuplicateIndex(i + 1));
            }
            seen[i] = true;
        }
        Ok(Self::from_mask_by_index(&seen, scores))
    }

    /// `indices` are 1-based, as written on the command line.
    pub fn from_one_based(indices: &[usize], scores: &ScoreSet) -> Result<Self> {
        let m = scores.m();
        let zero: Vec<usize> = indices
            .iter()
            .map(|&i| {
                if i == 0 || i > m {
                    Err(Error::IndexOutOfRange { index: i, m })
                } else {
                    Ok(i - 1)
                }
            })
            .collect::<Result<_>>()?;
        Self::new(&zero, scores)
    }

    /// The whole universe `[m]`.
    pub fn all(scores: &ScoreSet) -> Self {
        Self::from_mask_by_index(&vec![true; scores.m()], scores)
    }

    pub fn empty(scores: &ScoreSet) -> Self {
        Self::from_mask_by_index(&vec![false; scores.m()], scores)
    }

    /// The `k` hypotheses with the smallest p-values.
    pub fn smallest(k: usize, scores: &ScoreSet) -> Self {
        let m = scores.m();
        let k = k.min(m);
        let mut in_set = vec![false; m];
        in_set[m - k..].fill(true);
        Self::from_position_mask(&in_set, scores)
    }

    /// Builds a query from a membership mask over sorted positions. O(m).
    pub fn from_position_mask(in_set: &[bool], scores: &ScoreSet) -> Self {
        let m = scores.m();
        let mut positions = Vec::new();
        let mut complement = Vec::with_capacity(m);
        for (pos, &inside) in in_set.iter().enumerate() {
            if inside {
                positions.push(pos);
            } else {
                complement.push(pos);
            }
        }
        let mut members: Vec<usize> = positions.iter().map(|&p| scores.order()[p]).collect();
        members.sort_unstable();
        Self { m, members, positions, complement }
    }

    fn from_mask_by_index(seen: &[bool], scores: &ScoreSet) -> Self {
        let mut in_set = vec![false; seen.len()];
        for (i, &s) in seen.iter().enumerate() {
            if s {
                in_set[scores.position(i)] = true;
            }
        }
        Self::from_position_mask(&in_set, scores)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Original 0-based indices, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Sorted positions of the members, ascending (largest p first).
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Sorted positions of the complement, ascending.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }
}

/// `h(p)`: `p^r` for `r > 0`, `ln p` for `r = 0`, `-p^r` for `r < 0`.
///
/// Non-decreasing in `p` for every finite `r`.
#[inline]
pub fn h_transform(r: f64, p: f64) -> f64 {
    if r > 0.0 {
        p.powf(r)
    } else if r == 0.0 {
        p.ln()
    } else {
        -p.powf(r)
    }
}

/// Inverse of [`h_transform`] on the per-element mean, i.e. recovers the
/// generalized mean from `sum / s`.
#[inline]
pub fn h_inverse(r: f64, mean_h: f64) -> f64 {
    if r > 0.0 {
        mean_h.max(0.0).powf(1.0 / r)
    } else if r == 0.0 {
        mean_h.exp()
    } else {
        (-mean_h).powf(1.0 / r)
    }
}

/// Transformed scores in descending sorted order with prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedScores {
    r: f64,
    h: Vec<f64>,
    // built on first use; the closure shortcuts only need `h`
    prefix: OnceLock<Vec<f64>>,
    separable: bool,
}

impl TransformedScores {
    pub fn r(&self) -> f64 {
        self.r
    }

    /// False for `r = ±inf`, where order statistics replace sums.
    pub fn is_separable(&self) -> bool {
        self.separable
    }

    /// `h` values aligned with [`ScoreSet::sorted`] (non-increasing).
    pub fn h_values(&self) -> &[f64] {
        &self.h
    }

    /// `prefix_sums()[k]` is the sum of the first `k` h values.
    pub fn prefix_sums(&self) -> &[f64] {
        self.prefix.get_or_init(|| {
            let mut prefix = Vec::with_capacity(self.h.len() + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &x in &self.h {
                acc += x;
                prefix.push(acc);
            }
            prefix
        })
    }

    /// Sum of `h` over sorted positions `lo..hi`.
    #[inline]
    pub fn range_sum(&self, lo: usize, hi: usize) -> f64 {
        let prefix = self.prefix_sums();
        prefix[hi] - prefix[lo]
    }
}

/// Applies `h` to every score in sorted order.
///
/// Negative-`r` transforms of tiny p-values are clamped so that a sum over
/// all `m` scores stays finite.
pub fn transform(scores: &ScoreSet, r: f64) -> TransformedScores {
    if r.is_infinite() {
        return TransformedScores { r, h: Vec::new(), prefix: OnceLock::from(Vec::new()), separable: false };
    }
    let m = scores.m();
    let floor = -f64::MAX / (2.0 * (m as f64 + 1.0));
    let h: Vec<f64> = scores.sorted().iter().map(|&p| h_transform(r, p).max(floor)).collect();
    TransformedScores { r, h, prefix: OnceLock::new(), separable: true }
}

/// Generalized mean `M_r` with the four-branch definition; `r = -inf`
/// returns `n * min p` (Bonferroni).
///
/// Finite non-zero `r` is evaluated as a log-sum-exp so that `|r|` up to
/// the hundreds neither overflows nor underflows.
pub fn generalized_mean(r: f64, values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.is_empty() {
        return f64::NAN;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if r == f64::INFINITY {
        hi
    } else if r == f64::NEG_INFINITY {
        n * lo
    } else if lo == hi {
        lo
    } else if r == 0.0 {
        (values.iter().map(|p| p.ln()).sum::<f64>() / n).exp()
    } else {
        let logs: Vec<f64> = values.iter().map(|p| r * p.ln()).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
        ((lse - n.ln()) / r).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn singleton_set() {
        let s = ScoreSet::new(&[0.5]).unwrap();
        assert_eq!(s.m(), 1);
        assert_eq!(s.sorted(), &[0.5]);
    }

    #[test]
    fn stable_sort_on_ties() {
        let s = ScoreSet::new(&[0.2, 0.9, 0.2]).unwrap();
        assert_eq!(s.sorted(), &[0.9, 0.2, 0.2]);
        assert_eq!(s.order(), &[1, 0, 2]);
        assert_eq!(s.position(2), 2);
    }

    #[test]
    fn zero_is_clamped() {
        let s = ScoreSet::new(&[0.0, 0.3]).unwrap();
        assert_eq!(s.sorted(), &[0.3, f64::MIN_POSITIVE]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ScoreSet::new(&[]), Err(Error::EmptyInput));
        assert!(matches!(ScoreSet::new(&[0.1, f64::NAN]), Err(Error::InvalidScore { index: 1, .. })));
        assert!(matches!(ScoreSet::new(&[-0.1]), Err(Error::InvalidScore { index: 0, .. })));
        assert!(matches!(ScoreSet::new(&[0.3, 1.5]), Err(Error::InvalidScore { index: 1, .. })));
        assert!(matches!(ScoreSet::presorted(&[0.1, 0.3]), Err(Error::NotSorted(1))));
    }

    #[test]
    fn transform_examples() {
        assert_eq!(h_transform(1.0, 0.3), 0.3);
        assert_eq!(h_transform(0.0, 1.0), 0.0);
        assert_eq!(h_transform(-1.0, 0.25), -4.0);
        let s = ScoreSet::new(&[0.5, 0.25]).unwrap();
        assert!(!transform(&s, f64::INFINITY).is_separable());
        let t = transform(&s, -1.0);
        assert_eq!(t.h_values(), &[-2.0, -4.0]);
        assert_eq!(t.prefix_sums(), &[0.0, -2.0, -6.0]);
    }

    #[test]
    fn transform_stays_finite_at_the_floor() {
        let s = ScoreSet::new(&[0.0, 0.0, 0.0, 0.5]).unwrap();
        let t = transform(&s, -2.0);
        assert!(t.prefix_sums().iter().all(|x| x.is_finite()));
    }

    #[test]
    fn generalized_mean_examples() {
        assert!((generalized_mean(f64::NEG_INFINITY, &[0.01, 0.5]) - 0.02).abs() < 1e-15);
        assert!((generalized_mean(1.0, &[0.2, 0.4]) - 0.3).abs() < 1e-15);
        assert!((generalized_mean(0.0, &[0.01, 1.0]) - 0.1).abs() < 1e-15);
        assert!((generalized_mean(-1.0, &[0.5, 0.25]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(generalized_mean(f64::INFINITY, &[0.01, 0.5]), 0.5);
    }

    #[test]
    fn extreme_exponents_do_not_overflow() {
        let v = [1e-200, 0.5, 0.9];
        let lo = generalized_mean(-50.0, &v);
        let hi = generalized_mean(50.0, &v);
        assert!(lo.is_finite() && lo > 0.0);
        assert!((lo / (1e-200 * 3f64.powf(1.0 / 50.0)) - 1.0).abs() < 1e-10);
        assert!(hi.is_finite() && hi < 0.9 && hi > 0.8);
    }

    #[test]
    fn prefix_sums_on_a_long_vector() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let raw: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let s = ScoreSet::new(&raw).unwrap();
        for r in [1.0, 0.0, -0.5] {
            let t = transform(&s, r);
            let direct: f64 = raw.iter().map(|&p| h_transform(r, p.max(P_FLOOR))).sum();
            let last = *t.prefix_sums().last().unwrap();
            assert!(((last - direct) / direct).abs() < 1e-9, "r={r}");
        }
    }

    fn r_grid() -> Vec<f64> {
        vec![-20.0, -5.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, f64::INFINITY]
    }

    proptest! {
        #[test]
        fn monotone_in_r(v in prop::collection::vec(1e-6f64..1.0, 1..20)) {
            let means: Vec<f64> = r_grid().iter().map(|&r| generalized_mean(r, &v)).collect();
            for w in means.windows(2) {
                prop_assert!(w[0] <= w[1] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn permutation_invariant(v in prop::collection::vec(1e-6f64..1.0, 1..20), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut w = v.clone();
            w.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            for r in r_grid().into_iter().chain([f64::NEG_INFINITY]) {
                let a = generalized_mean(r, &v);
                let b = generalized_mean(r, &w);
                prop_assert!((a - b).abs() <= 1e-12 * a.abs());
            }
        }

        #[test]
        fn componentwise_monotone(v in prop::collection::vec(1e-6f64..0.9, 1..20), idx in any::<prop::sample::Index>(), bump in 0.0f64..0.1) {
            let mut w = v.clone();
            let i = idx.index(w.len());
            w[i] += bump;
            for r in r_grid().into_iter().chain([f64::NEG_INFINITY]) {
                prop_assert!(generalized_mean(r, &w) >= generalized_mean(r, &v) * (1.0 - 1e-12));
            }
        }

        #[test]
        fn singleton_mean_is_identity(p in 1e-12f64..1.0) {
            for r in r_grid().into_iter().chain([f64::NEG_INFINITY]) {
                prop_assert!((generalized_mean(r, &[p]) - p).abs() <= 1e-12 * p);
            }
        }

        #[test]
        fn sort_order_is_a_descending_bijection(v in prop::collection::vec(0.0f64..=1.0, 1..50)) {
            let s = ScoreSet::new(&v).unwrap();
            let mut seen = s.order().to_vec();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..v.len()).collect::<Vec<_>>());
            prop_assert!(s.sorted().windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
