//! Penalized optimal segmentation under a Gaussian change-in-variance cost.
//!
//! The objective for change points `tau_1 < ... < tau_m` is
//!
//! ```text
//! sum over segments of  n_seg * log(max(var_seg, var_floor))  +  penalty(m, segment lengths)
//! ```
//!
//! where `var_seg` is the biased variance about the segment's own mean. The
//! exact minimizer is found by optimal partitioning with PELT pruning; the
//! pruning constant accounts for the MBIC segment-length term and pruning is
//! switched off when some admissible segment could hit the variance floor,
//! so the result is always the global optimum.
//!
//! A change at `tau` (0-based) ends one segment at index `tau` and starts the
//! next at `tau + 1`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Cumulative sums for O(1) segment mean and variance.
#[derive(Debug, Clone)]
pub struct SegStats {
    prefix_sum: Vec<f64>,
    prefix_sumsq: Vec<f64>,
    var_floor: f64,
}

impl SegStats {
    /// The series is centered on its global mean first; the segment
    /// variances do not depend on the offset.
    pub fn new(series: &[f64]) -> Self {
        let n = series.len();
        let mean = if n == 0 {
            0.0
        } else {
            series.iter().sum::<f64>() / n as f64
        };
        let mut prefix_sum = Vec::with_capacity(n + 1);
        let mut prefix_sumsq = Vec::with_capacity(n + 1);
        prefix_sum.push(0.0);
        prefix_sumsq.push(0.0);
        let (mut s, mut ss) = (0.0, 0.0);
        for &x in series {
            let c = x - mean;
            s += c;
            ss += c * c;
            prefix_sum.push(s);
            prefix_sumsq.push(ss);
        }
        let global_var = if n == 0 { 0.0 } else { ss / n as f64 };
        Self {
            prefix_sum,
            prefix_sumsq,
            var_floor: 1e-12 * (global_var + 1e-300),
        }
    }

    pub fn len(&self) -> usize {
        self.prefix_sum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn var_floor(&self) -> f64 {
        self.var_floor
    }

    /// Biased variance of the inclusive range `[i, j]`.
    pub fn variance(&self, i: usize, j: usize) -> f64 {
        let n = (j - i + 1) as f64;
        let s = self.prefix_sum[j + 1] - self.prefix_sum[i];
        let ss = self.prefix_sumsq[j + 1] - self.prefix_sumsq[i];
        let mean = s / n;
        (ss / n - mean * mean).max(0.0)
    }

    /// Cost of `[i, j]` with no length check, each sample weighted by
    /// `1 / spacing`.
    fn raw_cost(&self, i: usize, j: usize, spacing: f64) -> f64 {
        let n = (j - i + 1) as f64 / spacing;
        n * self.variance(i, j).max(self.var_floor).ln()
    }
}

/// Change penalty family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PenaltyKind {
    /// `beta * m`
    Aic { beta: f64 },
    /// `m * log n`
    Bic,
    /// `3 m log n + sum of log segment lengths`
    Mbic,
}

impl PenaltyKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            PenaltyKind::Aic { beta } if !(*beta > 0.0 && beta.is_finite()) => {
                Err(Error::invalid("AIC beta must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PenaltyKind::Aic { .. } => "aic",
            PenaltyKind::Bic => "bic",
            PenaltyKind::Mbic => "mbic",
        }
    }

    /// Cost added per change point; `n` is the (effective) series length.
    fn per_change(&self, n: f64) -> f64 {
        match *self {
            PenaltyKind::Aic { beta } => beta,
            PenaltyKind::Bic => n.ln(),
            PenaltyKind::Mbic => 3.0 * n.ln(),
        }
    }

    /// Cost added per segment of (effective) length `len`.
    fn per_segment(&self, len: f64) -> f64 {
        match self {
            PenaltyKind::Mbic => len.ln(),
            _ => 0.0,
        }
    }

    /// A lower bound on `P(whole) - P(left) - P(right)` over all splits,
    /// for the segment-length part of the penalty.
    fn split_margin(&self, n: f64) -> f64 {
        match self {
            // log(l1 l2 / (l1 + l2)) <= log(n / 4)
            PenaltyKind::Mbic => (-(n / 4.0).ln()).min(0.0),
            _ => 0.0,
        }
    }
}

/// Detected change points and the objective value they achieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointSet {
    pub taus: Vec<usize>,
    pub total_cost: f64,
    pub penalty_kind: PenaltyKind,
    pub min_seg_len: usize,
    /// Samples per effectively independent observation (1 for iid data).
    #[serde(default = "unit_spacing")]
    pub spacing: f64,
}

fn unit_spacing() -> f64 {
    1.0
}

impl ChangePointSet {
    /// No change points.
    pub fn empty(kind: PenaltyKind, min_seg_len: usize, spacing: f64) -> Self {
        Self {
            taus: Vec::new(),
            total_cost: 0.0,
            penalty_kind: kind,
            min_seg_len,
            spacing,
        }
    }

    /// The inclusive `(start, end)` segments these change points induce on a
    /// series of length `n`.
    pub fn segments(&self, n: usize) -> Vec<(usize, usize)> {
        segments_from_taus(&self.taus, n)
    }
}

pub fn segments_from_taus(taus: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(taus.len() + 1);
    let mut start = 0;
    for &tau in taus {
        out.push((start, tau));
        start = tau + 1;
    }
    out.push((start, n - 1));
    out
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing >= 1.0 && spacing.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("spacing must be a finite value >= 1"))
    }
}

/// `n_seg * log(max(var, var_floor))` for the inclusive range `[i, j]`.
pub fn segment_cost(stats: &SegStats, i: usize, j: usize, min_seg_len: usize) -> Result<f64> {
    segment_cost_spaced(stats, i, j, min_seg_len, 1.0)
}

/// [`segment_cost`] with `n_seg` replaced by `n_seg / spacing`.
pub fn segment_cost_spaced(
    stats: &SegStats,
    i: usize,
    j: usize,
    min_seg_len: usize,
    spacing: f64,
) -> Result<f64> {
    check_spacing(spacing)?;
    if j >= stats.len() {
        return Err(Error::invalid(format!(
            "segment end {j} outside series of length {}",
            stats.len()
        )));
    }
    let min_len = min_seg_len.max(2);
    if j < i || j - i + 1 < min_len {
        return Err(Error::SegmentTooShort {
            start: i,
            end: j,
            min_len,
        });
    }
    Ok(stats.raw_cost(i, j, spacing))
}

/// Penalty for `m` change points splitting `n` samples into `seg_lengths`.
pub fn penalty_value(kind: PenaltyKind, m: usize, n: usize, seg_lengths: &[usize]) -> Result<f64> {
    penalty_value_spaced(kind, m, n, seg_lengths, 1.0)
}

/// [`penalty_value`] with `n` and every length divided by `spacing`.
pub fn penalty_value_spaced(
    kind: PenaltyKind,
    m: usize,
    n: usize,
    seg_lengths: &[usize],
    spacing: f64,
) -> Result<f64> {
    kind.validate()?;
    check_spacing(spacing)?;
    if seg_lengths.len() != m + 1 {
        return Err(Error::invalid(format!(
            "{m} change points need {} segment lengths, got {}",
            m + 1,
            seg_lengths.len()
        )));
    }
    if seg_lengths.iter().sum::<usize>() != n || seg_lengths.contains(&0) {
        return Err(Error::invalid("segment lengths must be positive and sum to n"));
    }
    let per_segment: f64 = seg_lengths
        .iter()
        .map(|&l| kind.per_segment(l as f64 / spacing))
        .sum();
    Ok(m as f64 * kind.per_change(n as f64 / spacing) + per_segment)
}

/// Segment costs summed left to right, plus the penalty.
pub fn objective(
    stats: &SegStats,
    taus: &[usize],
    kind: PenaltyKind,
    min_seg_len: usize,
) -> Result<f64> {
    objective_spaced(stats, taus, kind, min_seg_len, 1.0)
}

pub fn objective_spaced(
    stats: &SegStats,
    taus: &[usize],
    kind: PenaltyKind,
    min_seg_len: usize,
    spacing: f64,
) -> Result<f64> {
    let n = stats.len();
    let segments = segments_from_taus(taus, n);
    let mut cost = 0.0;
    for &(i, j) in &segments {
        cost += segment_cost_spaced(stats, i, j, min_seg_len, spacing)?;
    }
    let lengths: Vec<usize> = segments.iter().map(|(i, j)| j - i + 1).collect();
    Ok(cost + penalty_value_spaced(kind, taus.len(), n, &lengths, spacing)?)
}

/// Exact penalized segmentation of `series`.
///
/// Ties go to fewer change points, then to the lexicographically smallest
/// change-point vector.
pub fn detect_changepoints(
    series: &[f64],
    kind: PenaltyKind,
    min_seg_len: usize,
) -> Result<ChangePointSet> {
    detect_changepoints_spaced(series, kind, min_seg_len, 1.0)
}

/// Exact segmentation of a serially dependent series in which roughly every
/// `spacing`-th sample is independent: costs and penalty lengths count
/// effective samples, `n / spacing`, while change points keep full
/// resolution.
pub fn detect_changepoints_spaced(
    series: &[f64],
    kind: PenaltyKind,
    min_seg_len: usize,
    spacing: f64,
) -> Result<ChangePointSet> {
    kind.validate()?;
    check_spacing(spacing)?;
    if min_seg_len < 2 {
        return Err(Error::invalid("min_seg_len must be at least 2"));
    }
    let n = series.len();
    if n < 2 * min_seg_len {
        return Err(Error::TooShort {
            needed: 2 * min_seg_len,
            got: n,
        });
    }
    ensure_finite(series)?;

    let stats = SegStats::new(series);
    let m = min_seg_len;
    let n_eff = n as f64 / spacing;
    let beta = kind.per_change(n_eff);
    let cost = |s: usize, t: usize| {
        stats.raw_cost(s, t - 1, spacing) + kind.per_segment((t - s) as f64 / spacing)
    };

    // K in the PELT condition C(s,t) + C(t,T) + K <= C(s,T)
    let prune_margin = kind.split_margin(n_eff);
    let pruning = floor_unreachable(&stats, m);

    // best[t]: optimal objective of the first t samples, with the final
    // per-change penalty already charged
    let mut best = vec![f64::INFINITY; n + 1];
    let mut count = vec![0usize; n + 1];
    let mut last = vec![0usize; n + 1];
    best[0] = -beta;
    let mut candidates: Vec<usize> = vec![0];

    for t in m..=n {
        let mut chosen: Option<usize> = None;
        for &s in &candidates {
            if s + m > t {
                break;
            }
            let v = best[s] + cost(s, t) + beta;
            let better = match chosen {
                None => true,
                Some(c) => {
                    let cv = best[c] + cost(c, t) + beta;
                    match v.partial_cmp(&cv).unwrap_or(Ordering::Greater) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => prefers(&count, &last, s, c),
                    }
                }
            };
            if better {
                chosen = Some(s);
            }
        }
        if let Some(s) = chosen {
            best[t] = best[s] + cost(s, t) + beta;
            count[t] = if s == 0 { 0 } else { count[s] + 1 };
            last[t] = s;
        }

        if pruning && t >= 2 * m {
            let pivot = t - m;
            if best[pivot].is_finite() {
                let bound = best[pivot] + 1e-9 * (1.0 + best[pivot].abs());
                candidates.retain(|&s| {
                    s + m > pivot || best[s] + cost(s, pivot) + prune_margin <= bound
                });
            }
        }
        // t becomes a usable change location once it can close a prefix
        if t < n && t + m <= n && best[t].is_finite() {
            candidates.push(t);
        }
    }

    let taus = backtrack(&last, n)
        .into_iter()
        .map(|s| s - 1)
        .collect::<Vec<_>>();
    let total_cost = objective_spaced(&stats, &taus, kind, m, spacing)?;
    Ok(ChangePointSet {
        taus,
        total_cost,
        penalty_kind: kind,
        min_seg_len: m,
        spacing,
    })
}

/// Sample counts before each change point on the optimal path to `t`.
fn backtrack(last: &[usize], t: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = t;
    while cur > 0 {
        let s = last[cur];
        if s > 0 {
            out.push(s);
        }
        cur = s;
    }
    out.reverse();
    out
}

/// Whether ending the previous segment at `s` beats ending it at `c`
/// when both give the same objective.
fn prefers(count: &[usize], last: &[usize], s: usize, c: usize) -> bool {
    let cnt = |p: usize| if p == 0 { 0 } else { count[p] + 1 };
    match cnt(s).cmp(&cnt(c)) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            let path = |p: usize| {
                let mut v = if p == 0 { Vec::new() } else { backtrack(last, p) };
                if p > 0 {
                    v.push(p);
                }
                v
            };
            path(s) < path(c)
        }
    }
}

/// True when no admissible segment can have variance below the floor.
///
/// A segment of length at least `m` splits into pieces of length in
/// `[m, 2m)`, and its variance is at least the smallest piece variance.
fn floor_unreachable(stats: &SegStats, m: usize) -> bool {
    let n = stats.len();
    for len in m..(2 * m).min(n + 1) {
        for i in 0..=(n - len) {
            if stats.variance(i, i + len - 1) < stats.var_floor() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn normal(n: usize, sd: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Normal::new(0.0, sd).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    #[test]
    fn constant_segment_hits_floor() {
        let x = [3.0; 10];
        let stats = SegStats::new(&x);
        let c = segment_cost(&stats, 0, 9, 2).unwrap();
        assert_eq!(c, 10.0 * stats.var_floor().ln());
    }

    #[test]
    fn unit_variance_pair_costs_zero() {
        let stats = SegStats::new(&[0.0, 2.0]);
        assert!(segment_cost(&stats, 0, 1, 2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gaussian_segment_cost() {
        let x = normal(1000, 2.0, 7);
        let stats = SegStats::new(&x);
        let c = segment_cost(&stats, 0, 999, 2).unwrap();
        let expected = 1000.0 * 4.0f64.ln();
        assert!((c - expected).abs() / expected < 0.05);
    }

    #[test]
    fn short_segment_rejected() {
        let stats = SegStats::new(&[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            segment_cost(&stats, 1, 2, 3),
            Err(Error::SegmentTooShort { .. })
        ));
    }

    #[test]
    fn penalties_without_changes() {
        assert_eq!(penalty_value(PenaltyKind::Aic { beta: 2.0 }, 0, 50, &[50]).unwrap(), 0.0);
        assert_eq!(penalty_value(PenaltyKind::Bic, 0, 50, &[50]).unwrap(), 0.0);
        let mbic = penalty_value(PenaltyKind::Mbic, 0, 50, &[50]).unwrap();
        assert!((mbic - 50f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bic_and_mbic_values() {
        let bic = penalty_value(PenaltyKind::Bic, 2, 100, &[30, 30, 40]).unwrap();
        assert!((bic - 9.2103).abs() < 1e-4);
        let mbic = penalty_value(PenaltyKind::Mbic, 1, 100, &[40, 60]).unwrap();
        let expected = 3.0 * 100f64.ln() + 40f64.ln() + 60f64.ln();
        assert!((mbic - expected).abs() < 1e-12);
        assert!((mbic - 21.5987).abs() < 1e-4);
        let aic = penalty_value(PenaltyKind::Aic { beta: 1.5 }, 3, 100, &[25; 4]).unwrap();
        assert_eq!(aic, 4.5);
    }

    #[test]
    fn inconsistent_lengths_rejected() {
        assert!(penalty_value(PenaltyKind::Bic, 1, 100, &[40, 50]).is_err());
        assert!(penalty_value(PenaltyKind::Bic, 2, 100, &[40, 60]).is_err());
        assert!(penalty_value(PenaltyKind::Aic { beta: 0.0 }, 0, 10, &[10]).is_err());
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            detect_changepoints(&[1.0; 15], PenaltyKind::Bic, 10),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn finds_variance_step() {
        let mut x = normal(100, 1.0, 3);
        x.extend(normal(100, 10.0, 4));
        let cps = detect_changepoints(&x, PenaltyKind::Mbic, 10).unwrap();
        assert_eq!(cps.taus.len(), 1);
        assert!((95..=105).contains(&cps.taus[0]));
    }

    #[test]
    fn constant_series_has_no_change() {
        let cps = detect_changepoints(&[2.0; 50], PenaltyKind::Mbic, 5).unwrap();
        assert!(cps.taus.is_empty());
    }

    #[test]
    fn segments_cover_series() {
        assert_eq!(segments_from_taus(&[3, 7], 10), vec![(0, 3), (4, 7), (8, 9)]);
        assert_eq!(segments_from_taus(&[], 5), vec![(0, 4)]);
    }
}
