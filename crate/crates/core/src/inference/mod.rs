//! Variance-increase F-tests on segments and Holm-Bonferroni correction.
//!
//! A segment is tested against its neighbors with
//!
//! ```text
//! F = gamma * max(s2_before, s2_after) / s2_during
//! ```
//!
//! A large during-segment variance gives a *small* statistic, so the p-value
//! is the lower tail `P(F(df1, df2) <= F)` with `df1 = n_during` and
//! `df2 = max(n_before, n_after)` (segment lengths, not lengths minus one).
//! A segment at either end of the series has one neighbor and is compared
//! with that neighbor alone.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Biased (divide-by-n) variance of the inclusive range `[i, j]`.
pub fn sample_variance(series: &[f64], i: usize, j: usize) -> Result<f64> {
    if j < i || j >= series.len() {
        return Err(Error::invalid(format!(
            "empty or out-of-range segment [{i}, {j}] for length {}",
            series.len()
        )));
    }
    let seg = &series[i..=j];
    let n = seg.len() as f64;
    let mean = seg.iter().sum::<f64>() / n;
    Ok(seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n)
}

/// `P(F <= x)` for an F distribution with `(df1, df2)` degrees of freedom.
pub fn f_cdf(x: f64, df1: usize, df2: usize) -> Result<f64> {
    if df1 == 0 || df2 == 0 {
        return Err(Error::invalid("F degrees of freedom must be at least 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid("F statistic must be >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let scaled = d1 * x;
    // z = d1 x / (d1 x + d2) and 1 - z, each formed without cancellation
    let z = scaled / (scaled + d2);
    let p = if z <= 0.5 {
        special::beta_inc(0.5 * d1, 0.5 * d2, z)
    } else {
        1.0 - special::beta_inc(0.5 * d2, 0.5 * d1, d2 / (scaled + d2))
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Variance estimate and sample count for one side of a test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSample {
    pub s2: f64,
    pub n: usize,
}

impl VarianceSample {
    pub fn new(s2: f64, n: usize) -> Self {
        Self { s2, n }
    }
}

/// One segment's F-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentTest {
    pub imf_index: usize,
    pub seg_start: usize,
    pub seg_end: usize,
    pub s2_before: Option<f64>,
    pub s2_during: f64,
    pub s2_after: Option<f64>,
    pub n_before: Option<usize>,
    pub n_during: usize,
    pub n_after: Option<usize>,
    pub gamma: f64,
    pub f_stat: f64,
    pub p_value: f64,
}

impl SegmentTest {
    /// Tags the test with the IMF and inclusive range it was run on.
    pub fn at(mut self, imf_index: usize, seg_start: usize, seg_end: usize) -> Self {
        self.imf_index = imf_index;
        self.seg_start = seg_start;
        self.seg_end = seg_end;
        self
    }
}

/// Variance-increase test of `during` against its present neighbors.
pub fn f_test_segment(
    before: Option<VarianceSample>,
    during: VarianceSample,
    after: Option<VarianceSample>,
    gamma: f64,
) -> Result<SegmentTest> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma must be >= 1"));
    }
    if during.n < 2 {
        return Err(Error::invalid("during segment needs at least 2 samples"));
    }
    let neighbors: Vec<VarianceSample> = before.iter().chain(after.iter()).copied().collect();
    if neighbors.is_empty() {
        return Err(Error::invalid("segment test needs at least one neighbor"));
    }
    for s in neighbors.iter().chain(std::iter::once(&during)) {
        if !(s.s2 >= 0.0 && s.s2.is_finite()) {
            return Err(Error::invalid("variances must be finite and >= 0"));
        }
    }
    let reference = neighbors.iter().map(|s| s.s2).fold(0.0, f64::max);
    let df2 = neighbors.iter().map(|s| s.n).max().unwrap_or(1).max(1);

    let (f_stat, p_value) = if during.s2 <= f64::MIN_POSITIVE {
        // no during-variance: nothing to detect
        let f = if reference > 0.0 { f64::MAX } else { gamma };
        (f, 1.0)
    } else {
        let f = gamma * reference / during.s2;
        (f, f_cdf(f, during.n, df2)?)
    };

    Ok(SegmentTest {
        imf_index: 0,
        seg_start: 0,
        seg_end: 0,
        s2_before: before.map(|s| s.s2),
        s2_during: during.s2,
        s2_after: after.map(|s| s.s2),
        n_before: before.map(|s| s.n),
        n_during: during.n,
        n_after: after.map(|s| s.n),
        gamma,
        f_stat,
        p_value,
    })
}

/// Tests every segment induced by `segments` on `series` against its
/// neighbors. A single segment (no change points) yields no tests.
///
/// Degrees of freedom count effective samples, `length / spacing` rounded
/// (at least 2), so `spacing = 1` uses the raw segment lengths.
pub fn test_segments(
    series: &[f64],
    segments: &[(usize, usize)],
    imf_index: usize,
    gamma: f64,
    spacing: f64,
) -> Result<Vec<SegmentTest>> {
    if !(spacing >= 1.0 && spacing.is_finite()) {
        return Err(Error::invalid("spacing must be a finite value >= 1"));
    }
    if segments.len() < 2 {
        return Ok(Vec::new());
    }
    let samples = segments
        .iter()
        .map(|&(i, j)| {
            let n = (((j - i + 1) as f64 / spacing).round() as usize).max(2);
            Ok(VarianceSample::new(sample_variance(series, i, j)?, n))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(segments.len());
    for (k, &(i, j)) in segments.iter().enumerate() {
        let before = k.checked_sub(1).map(|b| samples[b]);
        let after = samples.get(k + 1).copied();
        out.push(f_test_segment(before, samples[k], after, gamma)?.at(imf_index, i, j));
    }
    Ok(out)
}

/// Holm step-down outcome in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct HolmOutcome {
    pub significant: Vec<bool>,
    /// `alpha / (K - rank + 1)` for each hypothesis' rank in the sorted order.
    pub thresholds: Vec<f64>,
}

/// Holm-Bonferroni at family-wise level `alpha`.
///
/// Equal p-values keep their input order.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Result<HolmOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    let k = p_values.len();
    let key = |p: f64| if p.is_nan() { 1.0 } else { p };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| key(p_values[a]).total_cmp(&key(p_values[b])));

    let mut significant = vec![false; k];
    let mut thresholds = vec![0.0; k];
    let mut rejecting = true;
    for (rank, &idx) in order.iter().enumerate() {
        let threshold = alpha / (k - rank) as f64;
        thresholds[idx] = threshold;
        if rejecting && key(p_values[idx]) < threshold {
            significant[idx] = true;
        } else {
            rejecting = false;
        }
    }
    Ok(HolmOutcome {
        significant,
        thresholds,
    })
}

/// A tested segment and its multiplicity-corrected verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentDecision {
    pub test: SegmentTest,
    pub significant: bool,
    pub holm_threshold: f64,
}

/// Runs Holm over the whole family of tests.
pub fn decide(tests: Vec<SegmentTest>, alpha: f64) -> Result<Vec<SegmentDecision>> {
    let p: Vec<f64> = tests.iter().map(|t| t.p_value).collect();
    let holm = holm_bonferroni(&p, alpha)?;
    Ok(tests
        .into_iter()
        .zip(holm.significant)
        .zip(holm.thresholds)
        .map(|((test, significant), holm_threshold)| SegmentDecision {
            test,
            significant,
            holm_threshold,
        })
        .collect())
}
