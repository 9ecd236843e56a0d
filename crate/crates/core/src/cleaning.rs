//! The local change point detection and signal cleaning pipeline.
//!
//! 1. EEMD of the input.
//! 2. Instantaneous amplitude of every IMF.
//! 3. Variance change points in each amplitude series.
//! 4. An F-test per inter-change-point segment, comparing the variance of the
//!    IMF itself inside the segment with its neighbors.
//! 5. Holm-Bonferroni across every segment of every IMF.
//! 6. Non-significant segments are zeroed; an IMF without change points is
//!    zeroed entirely. The cleaned IMFs are summed.
//!
//! Steps 1-3 do not depend on `gamma` or `alpha`, so [`Analysis`] keeps them
//! and [`Analysis::clean`] can be re-run cheaply for a sweep over `gamma`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::changepoint::{detect_changepoints_spaced, ChangePointSet, PenaltyKind};
use crate::emd::{count_zero_crossings, eemd, Decomposition, EmdConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::inference::{decide, test_segments, SegmentDecision};
use crate::spectral::instantaneous_amplitude;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LcdscConfig {
    pub emd: EmdConfig,
    pub penalty: PenaltyKind,
    pub min_seg_len: usize,
    /// Spacing between effectively independent amplitude samples, in mean
    /// periods of the IMF. 0 treats every sample as independent.
    pub spacing_periods: f64,
    /// Shortest segment, in effectively independent samples.
    pub min_seg_effective: usize,
    pub gamma: f64,
    pub alpha: f64,
    /// Add the EEMD residual back into the cleaned signal.
    pub include_residual: bool,
}

impl Default for LcdscConfig {
    fn default() -> Self {
        Self {
            emd: EmdConfig::default(),
            penalty: PenaltyKind::Mbic,
            min_seg_len: 10,
            spacing_periods: 2.0,
            min_seg_effective: 4,
            gamma: 1.0,
            alpha: 0.05,
            include_residual: false,
        }
    }
}

impl LcdscConfig {
    pub fn validate(&self) -> Result<()> {
        self.emd.validate()?;
        self.penalty.validate()?;
        validate_testing(self.gamma, self.alpha)?;
        if self.min_seg_len < 2 {
            return Err(Error::invalid("min_seg_len must be at least 2"));
        }
        if !(self.spacing_periods >= 0.0 && self.spacing_periods.is_finite()) {
            return Err(Error::invalid("spacing_periods must be finite and >= 0"));
        }
        if self.min_seg_effective < 2 {
            return Err(Error::invalid("min_seg_effective must be at least 2"));
        }
        Ok(())
    }

    /// Effective sample spacing of the amplitude of `imf`.
    pub fn spacing_for(&self, imf: &[f64]) -> f64 {
        amplitude_spacing(imf, self.spacing_periods)
    }

    /// Minimum segment length, in samples, at the given spacing.
    pub fn min_seg_for(&self, spacing: f64) -> usize {
        let eff = (self.min_seg_effective as f64 * spacing).ceil() as usize;
        self.min_seg_len.max(eff)
    }
}

/// `periods` times the mean period of `imf` (twice the mean distance
/// between zero crossings), and at least 1.
pub fn amplitude_spacing(imf: &[f64], periods: f64) -> f64 {
    if periods == 0.0 || imf.is_empty() {
        return 1.0;
    }
    let crossings = count_zero_crossings(imf).max(1);
    let mean_period = 2.0 * imf.len() as f64 / crossings as f64;
    (periods * mean_period).max(1.0)
}

fn validate_testing(gamma: f64, alpha: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma must be >= 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha must lie in (0, 1)"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub decomposition: Decomposition,
    pub amplitudes: Vec<Vec<f64>>,
    pub changepoints: Vec<ChangePointSet>,
    pub decisions: Vec<SegmentDecision>,
    pub cleaned_imfs: Vec<Vec<f64>>,
    pub cleaned_signal: Vec<f64>,
    /// 1-based indices of IMFs with at least one significant segment.
    pub significant_imfs: Vec<usize>,
    pub config: LcdscConfig,
    /// Fail-soft notes, e.g. IMFs too short for detection.
    pub notes: Vec<String>,
}

impl CleaningReport {
    /// Decisions belonging to IMF `index` (1-based), in segment order.
    pub fn decisions_for(&self, index: usize) -> Vec<&SegmentDecision> {
        self.decisions
            .iter()
            .filter(|d| d.test.imf_index == index)
            .collect()
    }

    pub fn nonzero_count(&self) -> usize {
        self.cleaned_signal.iter().filter(|v| **v != 0.0).count()
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        first_nonzero(&self.cleaned_signal)
    }
}

pub fn first_nonzero(x: &[f64]) -> Option<usize> {
    x.iter().position(|v| *v != 0.0)
}

/// Keeps significant segments of `imf` verbatim and zeroes the rest.
///
/// `decisions` must hold one decision per segment induced by `cps`, in order.
pub fn clean_imf(
    imf: &[f64],
    amplitude: &[f64],
    cps: &ChangePointSet,
    decisions: &[&SegmentDecision],
) -> Result<Vec<f64>> {
    let n = imf.len();
    if amplitude.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: amplitude.len(),
        });
    }
    let mut out = vec![0.0; n];
    if cps.taus.is_empty() {
        return Ok(out);
    }
    let segments = cps.segments(n);
    if decisions.len() != segments.len() {
        return Err(Error::invalid(format!(
            "{} segments but {} decisions",
            segments.len(),
            decisions.len()
        )));
    }
    for (&(i, j), d) in segments.iter().zip(decisions) {
        if d.test.seg_start != i || d.test.seg_end != j {
            return Err(Error::invalid(format!(
                "decision for [{}, {}] does not match segment [{i}, {j}]",
                d.test.seg_start, d.test.seg_end
            )));
        }
        if d.significant {
            out[i..=j].copy_from_slice(&imf[i..=j]);
        }
    }
    Ok(out)
}

/// The gamma-independent stages of the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub decomposition: Decomposition,
    pub amplitudes: Vec<Vec<f64>>,
    pub changepoints: Vec<ChangePointSet>,
    pub notes: Vec<String>,
}

impl Analysis {
    /// Decomposes `series` and detects change points in every IMF amplitude.
    pub fn run(series: &TimeSeries, config: &LcdscConfig) -> Result<Self> {
        config.validate()?;
        let decomposition = eemd(series, &config.emd)?;
        Self::from_decomposition(decomposition, config)
    }

    /// Amplitudes and change points for an existing decomposition; only the
    /// detection fields of `config` are used.
    pub fn from_decomposition(decomposition: Decomposition, config: &LcdscConfig) -> Result<Self> {
        config.validate()?;
        let penalty = config.penalty;
        let per_imf: Vec<(Vec<f64>, ChangePointSet, Option<String>)> = decomposition
            .imfs
            .par_iter()
            .map(|imf| {
                let amplitude = instantaneous_amplitude(&imf.samples)?;
                let spacing = config.spacing_for(&imf.samples);
                let min_seg = config.min_seg_for(spacing);
                match detect_changepoints_spaced(&amplitude, penalty, min_seg, spacing) {
                    Ok(cps) => Ok((amplitude, cps, None)),
                    Err(Error::TooShort { .. }) => {
                        let cps = ChangePointSet::empty(penalty, min_seg, spacing);
                        let note = format!("IMF {} too short for detection; zeroed", imf.index);
                        Ok((amplitude, cps, Some(note)))
                    }
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<_>>()?;

        let mut amplitudes = Vec::with_capacity(per_imf.len());
        let mut changepoints = Vec::with_capacity(per_imf.len());
        let mut notes = Vec::new();
        for (a, c, note) in per_imf {
            amplitudes.push(a);
            changepoints.push(c);
            notes.extend(note);
        }
        Ok(Self {
            decomposition,
            amplitudes,
            changepoints,
            notes,
        })
    }

    /// Tests, corrects, and cleans at the given `gamma` and `alpha`.
    pub fn clean(&self, config: &LcdscConfig) -> Result<CleaningReport> {
        validate_testing(config.gamma, config.alpha)?;
        let n = self.decomposition.source_len;

        let mut tests = Vec::new();
        for (imf, cps) in self.decomposition.imfs.iter().zip(&self.changepoints) {
            tests.extend(test_segments(
                &imf.samples,
                &cps.segments(n),
                imf.index,
                config.gamma,
                cps.spacing,
            )?);
        }
        let decisions = decide(tests, config.alpha)?;

        let mut cleaned_imfs = Vec::with_capacity(self.decomposition.num_imfs());
        let mut significant_imfs = BTreeSet::new();
        for ((imf, amplitude), cps) in self
            .decomposition
            .imfs
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.changepoints)
        {
            let mine: Vec<&SegmentDecision> = decisions
                .iter()
                .filter(|d| d.test.imf_index == imf.index)
                .collect();
            if mine.iter().any(|d| d.significant) {
                significant_imfs.insert(imf.index);
            }
            cleaned_imfs.push(clean_imf(&imf.samples, amplitude, cps, &mine)?);
        }

        let cleaned_signal = sum_rows(
            &cleaned_imfs,
            config
                .include_residual
                .then_some(self.decomposition.residual.as_slice()),
            n,
        );

        Ok(CleaningReport {
            decomposition: self.decomposition.clone(),
            amplitudes: self.amplitudes.clone(),
            changepoints: self.changepoints.clone(),
            decisions,
            cleaned_imfs,
            cleaned_signal,
            significant_imfs: significant_imfs.into_iter().collect(),
            config: config.clone(),
            notes: self.notes.clone(),
        })
    }
}

/// Rows summed in order, then the optional extra row.
pub fn sum_rows(rows: &[Vec<f64>], extra: Option<&[f64]>, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for row in rows.iter().map(Vec::as_slice).chain(extra) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    out
}

/// Full pipeline on one series.
pub fn lcdsc_clean(series: &TimeSeries, config: &LcdscConfig) -> Result<CleaningReport> {
    Analysis::run(series, config)?.clean(config)
}

/// One report per `gamma`, sharing a single decomposition and change-point pass.
pub fn gamma_sweep(
    series: &TimeSeries,
    gammas: &[f64],
    config: &LcdscConfig,
) -> Result<Vec<CleaningReport>> {
    if gammas.is_empty() {
        return Err(Error::invalid("gamma list is empty"));
    }
    for &g in gammas {
        validate_testing(g, config.alpha)?;
    }
    let analysis = Analysis::run(series, config)?;
    gammas
        .iter()
        .map(|&gamma| {
            analysis.clean(&LcdscConfig {
                gamma,
                ..config.clone()
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::SegmentTest;

    fn decision(start: usize, end: usize, significant: bool) -> SegmentDecision {
        SegmentDecision {
            test: SegmentTest {
                imf_index: 1,
                seg_start: start,
                seg_end: end,
                s2_before: None,
                s2_during: 1.0,
                s2_after: Some(1.0),
                n_before: None,
                n_during: end - start + 1,
                n_after: Some(1),
                gamma: 1.0,
                f_stat: 1.0,
                p_value: if significant { 0.0 } else { 1.0 },
            },
            significant,
            holm_threshold: 0.05,
        }
    }

    fn cps(taus: Vec<usize>) -> ChangePointSet {
        ChangePointSet {
            taus,
            ..ChangePointSet::empty(PenaltyKind::Mbic, 2, 1.0)
        }
    }

    #[test]
    fn no_change_points_zeroes_imf() {
        let imf = vec![1.0; 8];
        let out = clean_imf(&imf, &imf, &cps(vec![]), &[]).unwrap();
        assert_eq!(out, vec![0.0; 8]);
    }

    #[test]
    fn keeps_only_significant_segment() {
        let imf: Vec<f64> = (1..=9).map(f64::from).collect();
        let ds = [decision(0, 2, false), decision(3, 5, true), decision(6, 8, false)];
        let refs: Vec<&SegmentDecision> = ds.iter().collect();
        let out = clean_imf(&imf, &imf, &cps(vec![2, 5]), &refs).unwrap();
        assert_eq!(out, vec![0.0, 0.0, 0.0, 4.0, 5.0, 6.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn all_significant_is_identity() {
        let imf: Vec<f64> = (1..=6).map(f64::from).collect();
        let ds = [decision(0, 2, true), decision(3, 5, true)];
        let refs: Vec<&SegmentDecision> = ds.iter().collect();
        assert_eq!(clean_imf(&imf, &imf, &cps(vec![2]), &refs).unwrap(), imf);
    }

    #[test]
    fn mismatches_rejected() {
        let imf = vec![1.0; 6];
        assert!(clean_imf(&imf, &imf[..5], &cps(vec![2]), &[]).is_err());
        let ds = [decision(0, 2, true)];
        let refs: Vec<&SegmentDecision> = ds.iter().collect();
        assert!(clean_imf(&imf, &imf, &cps(vec![2]), &refs).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = LcdscConfig {
            gamma: 0.5,
            ..LcdscConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LcdscConfig {
            alpha: 0.0,
            ..LcdscConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(LcdscConfig::default().validate().is_ok());
    }
}
