//! Local tests, worst-case supersets, and adjusted p-values.

use serde::Serialize;

use crate::calibration::{threshold_fn, Calibration, LocalTestSpec, ThresholdFn};
use crate::error::{Error, Result};
use crate::scores::{h_inverse, h_transform, transform, ScoreSet, SubsetQuery, TransformedScores};

/// How a prepared local test evaluates a candidate set.
#[derive(Debug, Clone)]
pub(crate) enum Statistic {
    /// Finite `r`: `sum h <= g(s)`.
    Sum(TransformedScores),
    /// `r = +inf`: `max p <= c(s)`.
    Max,
    /// `r = -inf`: `s * min p <= c(s)`.
    Bonferroni,
}

/// A value for each size `s = 1..=m`.
#[derive(Debug, Clone)]
pub(crate) enum BySize {
    Dense(Vec<f64>),
    /// `first` at `s = 1`, then `rate` (or `rate * s` when `linear`).
    Uniform { first: f64, rate: f64, linear: bool },
}

impl BySize {
    #[inline]
    pub(crate) fn at(&self, s: usize) -> f64 {
        match *self {
            BySize::Dense(ref v) => v[s],
            BySize::Uniform { first, .. } if s == 1 => first,
            BySize::Uniform { rate, linear: true, .. } => rate * s as f64,
            BySize::Uniform { rate, .. } => rate,
        }
    }
}

/// Scores, local test and critical values at one level, prepared once so
/// that each closed-testing query costs `O(m)`.
#[derive(Debug, Clone)]
pub struct ClosedTesting<'a> {
    pub(crate) scores: &'a ScoreSet,
    pub(crate) threshold: ThresholdFn,
    pub(crate) alpha: f64,
    pub(crate) statistic: Statistic,
    /// Critical values on the mean scale.
    pub(crate) critical: BySize,
    /// `g(s) = s h(critical(s))` for separable tests.
    pub(crate) g: BySize,
}

impl<'a> ClosedTesting<'a> {
    pub fn new(scores: &'a ScoreSet, spec: &LocalTestSpec, alpha: f64) -> Result<Self> {
        let threshold = threshold_fn(spec, scores.m())?;
        let r = spec.r();
        let critical = if threshold.is_size_free() && scores.m() >= 2 {
            BySize::Uniform {
                first: threshold.critical_value(1, alpha)?,
                rate: threshold.critical_value(2, alpha)?,
                linear: false,
            }
        } else {
            BySize::Dense(threshold.critical_values(alpha)?)
        };
        let (statistic, g) = if r.is_infinite() {
            let stat = if r > 0.0 { Statistic::Max } else { Statistic::Bonferroni };
            (stat, BySize::Dense(Vec::new()))
        } else {
            let h = transform(scores, r);
            let g = match &critical {
                BySize::Uniform { first, rate, .. } => {
                    BySize::Uniform { first: h_transform(r, *first), rate: h_transform(r, *rate), linear: true }
                }
                BySize::Dense(c) => BySize::Dense(
                    c.iter()
                        .enumerate()
                        .map(|(s, &c)| if s == 0 { f64::NAN } else { s as f64 * h_transform(r, c) })
                        .collect(),
                ),
            };
            (Statistic::Sum(h), g)
        };
        Ok(Self { scores, threshold, alpha, statistic, critical, g })
    }

    pub fn m(&self) -> usize {
        self.scores.m()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scores(&self) -> &ScoreSet {
        self.scores
    }

    pub fn threshold(&self) -> &ThresholdFn {
        &self.threshold
    }

    /// Local test of an arbitrary index set given by sorted positions.
    pub fn local_test_positions(&self, positions: &[usize]) -> bool {
        let s = positions.len();
        if s == 0 {
            return false;
        }
        let sorted = self.scores.sorted();
        match &self.statistic {
            Statistic::Sum(h) => {
                let sum: f64 = positions.iter().map(|&q| h.h_values()[q]).sum();
                sum <= self.g.at(s)
            }
            Statistic::Max => positions.iter().all(|&q| sorted[q] <= self.critical.at(s)),
            Statistic::Bonferroni => {
                let min = positions.iter().map(|&q| sorted[q]).fold(f64::INFINITY, f64::min);
                s as f64 * min <= self.critical.at(s)
            }
        }
    }

    /// Walks the worst-case supersets `S ∪ (the i largest scores of S^c)`,
    /// `i = 0..=|S^c|`, calling `visit(size, statistic)` with the sum of `h`
    /// (separable tests), the maximum, or the minimum.
    fn for_each_worst_superset(&self, query: &SubsetQuery, mut visit: impl FnMut(usize, f64) -> bool) {
        let sorted = self.scores.sorted();
        let s = query.len();
        let complement = query.complement();
        match &self.statistic {
            Statistic::Sum(h) => {
                let hv = h.h_values();
                let mut sum: f64 = query.positions().iter().map(|&q| hv[q]).sum();
                if s > 0 && !visit(s, sum) {
                    return;
                }
                for (i, &q) in complement.iter().enumerate() {
                    sum += hv[q];
                    if !visit(s + i + 1, sum) {
                        return;
                    }
                }
            }
            Statistic::Max | Statistic::Bonferroni => {
                let is_max = matches!(self.statistic, Statistic::Max);
                let fold = |a: f64, b: f64| if is_max { a.max(b) } else { a.min(b) };
                let init = if is_max { f64::NEG_INFINITY } else { f64::INFINITY };
                let mut acc = query.positions().iter().map(|&q| sorted[q]).fold(init, fold);
                if s > 0 && !visit(s, acc) {
                    return;
                }
                for (i, &q) in complement.iter().enumerate() {
                    acc = fold(acc, sorted[q]);
                    if !visit(s + i + 1, acc) {
                        return;
                    }
                }
            }
        }
    }

    fn passes(&self, size: usize, stat: f64) -> bool {
        match self.statistic {
            Statistic::Sum(_) => stat <= self.g.at(size),
            Statistic::Max => stat <= self.critical.at(size),
            Statistic::Bonferroni => size as f64 * stat <= self.critical.at(size),
        }
    }

    fn mean_of(&self, size: usize, stat: f64) -> f64 {
        match &self.statistic {
            Statistic::Sum(h) => h_inverse(h.r(), stat / size as f64),
            Statistic::Max => stat,
            Statistic::Bonferroni => size as f64 * stat,
        }
    }

    /// Local test of `S`.
    pub fn local_test(&self, query: &SubsetQuery) -> bool {
        self.local_test_positions(query.positions())
    }

    /// Closed-testing rejection of `H_S`: every worst-case superset must be
    /// rejected locally.
    pub fn post_hoc_reject(&self, query: &SubsetQuery) -> bool {
        if query.is_empty() {
            return false;
        }
        let mut all = true;
        self.for_each_worst_superset(query, |size, stat| {
            all = self.passes(size, stat);
            all
        });
        all
    }

    /// Generalized mean of the scores in `S`.
    pub fn mean(&self, query: &SubsetQuery) -> Result<f64> {
        if query.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut out = f64::NAN;
        self.for_each_worst_superset(query, |size, stat| {
            out = self.mean_of(size, stat);
            false
        });
        Ok(out)
    }

    /// Local p-value `p(S)`.
    pub fn adjusted_p_local(&self, query: &SubsetQuery) -> Result<f64> {
        let mean = self.mean(query)?;
        self.threshold.local_p(query.len(), mean)
    }

    /// Closed p-value `max over J ⊇ S of p(J)`, attained on the worst-case
    /// supersets.
    pub fn adjusted_p_closed(&self, query: &SubsetQuery) -> Result<f64> {
        if query.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !self.threshold.has_inverse() {
            return Err(Error::UnsupportedInverse);
        }
        let tf = &self.threshold;
        let mut worst = 0.0f64;
        let mut err = None;
        if tf.is_size_free() {
            // p is a non-decreasing function of the mean for sizes >= 2
            let mut top_mean = f64::NEG_INFINITY;
            self.for_each_worst_superset(query, |size, stat| {
                let mean = self.mean_of(size, stat);
                if size == 1 {
                    worst = worst.max(mean.min(1.0));
                } else {
                    top_mean = top_mean.max(mean);
                }
                true
            });
            if top_mean > f64::NEG_INFINITY {
                worst = worst.max(tf.local_p(2.min(self.m()), top_mean)?);
            }
        } else {
            self.for_each_worst_superset(query, |size, stat| match tf.local_p(size, self.mean_of(size, stat)) {
                Ok(p) => {
                    worst = worst.max(p);
                    worst < 1.0
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            });
        }
        match err {
            Some(e) => Err(e),
            None => Ok(worst),
        }
    }

    /// `p_closed / p_local`; `+inf` when the local p-value is zero.
    pub fn coma(&self, query: &SubsetQuery) -> Result<f64> {
        let local = self.adjusted_p_local(query)?;
        let closed = self.adjusted_p_closed(query)?;
        Ok(if local == 0.0 { f64::INFINITY } else { closed / local })
    }

    /// Everything known about `S` at this level.
    pub fn evaluate(&self, query: &SubsetQuery) -> Result<ClosureResult> {
        let fdp_bound = self.fdp_bound(query);
        let (p_local, p_closed, coma) = if self.threshold.has_inverse() && !query.is_empty() {
            let p = self.adjusted_p_local(query)?;
            let pc = self.adjusted_p_closed(query)?;
            (Some(p), Some(pc), Some(if p == 0.0 { f64::INFINITY } else { pc / p }))
        } else {
            (None, None, None)
        };
        Ok(ClosureResult {
            indices: query.members().to_vec(),
            p_local,
            p_closed,
            coma,
            rejected: self.post_hoc_reject(query),
            fdp_bound,
            true_discoveries_lb: query.len() - fdp_bound,
        })
    }
}

/// Adjusted p-values and bounds for one queried set. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureResult {
    pub indices: Vec<usize>,
    pub p_local: Option<f64>,
    pub p_closed: Option<f64>,
    pub coma: Option<f64>,
    pub rejected: bool,
    pub fdp_bound: usize,
    pub true_discoveries_lb: usize,
}

/// Local test of `S` at level `alpha`.
pub fn local_test(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery, alpha: f64) -> Result<bool> {
    Ok(ClosedTesting::new(scores, spec, alpha)?.local_test(query))
}

/// Closed-testing adjusted p-value of `H_S`.
pub fn adjusted_p_closed(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery) -> Result<f64> {
    level_free(scores, spec)?.adjusted_p_closed(query)
}

pub fn adjusted_p_local(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery) -> Result<f64> {
    level_free(scores, spec)?.adjusted_p_local(query)
}

pub fn coma(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery) -> Result<f64> {
    level_free(scores, spec)?.coma(query)
}

// Adjusted p-values do not use the critical values, so any level works.
fn level_free<'a>(scores: &'a ScoreSet, spec: &LocalTestSpec) -> Result<ClosedTesting<'a>> {
    if let Calibration::Empirical(_) = spec.calibration() {
        return Err(Error::UnsupportedInverse);
    }
    ClosedTesting::new(scores, spec, 0.5)
}

pub fn post_hoc_reject(scores: &ScoreSet, spec: &LocalTestSpec, query: &SubsetQuery, alpha: f64) -> Result<bool> {
    Ok(ClosedTesting::new(scores, spec, alpha)?.post_hoc_reject(query))
}
