//! Empirical Mode Decomposition and its noise-assisted ensemble variant.
//!
//! A signal is split into intrinsic mode functions (IMFs), highest frequency
//! first, plus a slowly varying residual, such that the pieces sum back to
//! the input:
//!
//! ```text
//! x(t) = imf_1(t) + ... + imf_n(t) + r(t)
//! ```
//!
//! Each IMF is produced by sifting: repeatedly subtracting the mean of the
//! cubic-spline envelopes through the local maxima and minima until the
//! extrema and zero-crossing counts agree (to within one) for `s_number`
//! consecutive passes.
//!
//! EEMD runs the decomposition on many copies of the input perturbed with
//! white noise and averages IMF `j` across the copies. Each trial draws from
//! its own RNG stream derived from `(seed, trial)`, so the result does not
//! depend on how trials are scheduled.

mod spline;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// A uniformly sampled real-valued recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<f64>,
    /// Sample interval in seconds.
    pub dt: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Self {
        Self { samples, dt: 1.0 }
    }

    pub fn with_dt(samples: Vec<f64>, dt: f64) -> Self {
        Self { samples, dt }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(samples: Vec<f64>) -> Self {
        Self::new(samples)
    }
}

/// One intrinsic mode function. `index` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imf {
    pub index: usize,
    pub samples: Vec<f64>,
}

/// Sifting bookkeeping for one IMF slot.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ImfDiagnostics {
    /// Sifting iterations, summed over the trials that produced this IMF.
    pub sift_iterations: usize,
    /// Trials whose sifting hit `max_sift_iters` before S-stoppage.
    pub truncated: usize,
    /// Trials that produced this IMF. Trials with fewer IMFs contribute zeros.
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub imfs: Vec<Imf>,
    pub residual: Vec<f64>,
    pub source_len: usize,
    pub diagnostics: Vec<ImfDiagnostics>,
}

impl Decomposition {
    /// Builds a decomposition from raw IMF rows and a residual.
    pub fn from_parts(imfs: Vec<Vec<f64>>, residual: Vec<f64>) -> Result<Self> {
        let source_len = residual.len();
        for imf in &imfs {
            if imf.len() != source_len {
                return Err(Error::LengthMismatch {
                    expected: source_len,
                    got: imf.len(),
                });
            }
        }
        let diagnostics = vec![ImfDiagnostics::default(); imfs.len()];
        let imfs = imfs
            .into_iter()
            .enumerate()
            .map(|(i, samples)| Imf {
                index: i + 1,
                samples,
            })
            .collect();
        Ok(Self {
            imfs,
            residual,
            source_len,
            diagnostics,
        })
    }

    pub fn num_imfs(&self) -> usize {
        self.imfs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdConfig {
    /// Consecutive passes the extrema/zero-crossing condition must hold.
    pub s_number: usize,
    pub max_sift_iters: usize,
    /// `None` selects `floor(log2 n) - 1`.
    pub max_imfs: Option<usize>,
    pub ensemble_size: usize,
    /// Standard deviation of the added noise as a fraction of the input's.
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            s_number: 4,
            max_sift_iters: 50,
            max_imfs: None,
            ensemble_size: 100,
            noise_amplitude: 0.2,
            seed: 0,
        }
    }
}

impl EmdConfig {
    /// Plain EMD: a single trial with no added noise.
    pub fn plain() -> Self {
        Self {
            ensemble_size: 1,
            noise_amplitude: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_number == 0 {
            return Err(Error::invalid("s_number must be at least 1"));
        }
        if self.max_sift_iters == 0 {
            return Err(Error::invalid("max_sift_iters must be at least 1"));
        }
        if self.ensemble_size == 0 {
            return Err(Error::invalid("ensemble_size must be at least 1"));
        }
        if !(self.noise_amplitude >= 0.0 && self.noise_amplitude.is_finite()) {
            return Err(Error::invalid("noise_amplitude must be finite and >= 0"));
        }
        Ok(())
    }

    fn imf_limit(&self, n: usize) -> usize {
        self.max_imfs
            .unwrap_or_else(|| (n as f64).log2().floor() as usize - 1)
    }
}

/// Indices of strict interior maxima and minima.
///
/// A flat run bounded on both sides by lower (higher) samples counts as one
/// maximum (minimum) located at the run midpoint.
pub fn find_extrema(series: &[f64]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = series.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        let v = series[i];
        let left = series[i - 1];
        let mut j = i;
        while j + 1 < n && series[j + 1] == v {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let right = series[j + 1];
        if v > left && v > right {
            maxima.push((i + j) / 2);
        } else if v < left && v < right {
            minima.push((i + j) / 2);
        }
        i = j + 1;
    }
    Ok((maxima, minima))
}

/// Number of sign changes, skipping exact zeros.
pub fn count_zero_crossings(series: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &v in series {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// `|#extrema - #zero crossings|`, the first IMF property.
pub fn extrema_crossing_gap(series: &[f64]) -> Result<usize> {
    let (maxima, minima) = find_extrema(series)?;
    let extrema = maxima.len() + minima.len();
    Ok(extrema.abs_diff(count_zero_crossings(series)))
}

/// Mean of the upper and lower cubic-spline envelopes.
///
/// The two extrema nearest each endpoint are mirrored across it before the
/// splines are fitted.
pub fn envelope_mean(series: &[f64]) -> Result<Vec<f64>> {
    let (maxima, minima) = find_extrema(series)?;
    if maxima.is_empty() || minima.is_empty() {
        return Err(Error::MonotonicComponent);
    }
    let n = series.len();
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    envelope(series, &maxima, &mut upper);
    envelope(series, &minima, &mut lower);
    for (u, l) in upper.iter_mut().zip(&lower) {
        *u = 0.5 * (*u + l);
    }
    Ok(upper)
}

fn envelope(series: &[f64], idx: &[usize], out: &mut [f64]) {
    let last = (series.len() - 1) as f64;
    let k = idx.len();
    let mirrored = k.min(2);
    let mut xs = Vec::with_capacity(k + 2 * mirrored);
    let mut ys = Vec::with_capacity(k + 2 * mirrored);
    for &p in idx[..mirrored].iter().rev() {
        xs.push(-(p as f64));
        ys.push(series[p]);
    }
    for &p in idx {
        xs.push(p as f64);
        ys.push(series[p]);
    }
    for &p in idx[k - mirrored..].iter().rev() {
        xs.push(2.0 * last - p as f64);
        ys.push(series[p]);
    }
    spline::natural_cubic_on_grid(&xs, &ys, out);
}

/// Outcome of sifting one IMF out of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Sifted {
    pub samples: Vec<f64>,
    pub iterations: usize,
    /// `false` when `max_sift_iters` was reached before S-stoppage.
    pub converged: bool,
}

/// Extracts one IMF by iterated envelope-mean subtraction with S-stoppage.
///
/// Fails only if the input itself has no envelope (a monotonic component).
pub fn sift(series: &[f64], config: &EmdConfig) -> Result<Sifted> {
    let mut h = series.to_vec();
    let mut streak = 0;
    let mut iterations = 0;
    while iterations < config.max_sift_iters {
        let mean = match envelope_mean(&h) {
            Ok(m) => m,
            Err(e) if iterations == 0 => return Err(e),
            // sifting flattened h; keep what we have
            Err(_) => break,
        };
        for (v, m) in h.iter_mut().zip(&mean) {
            *v -= m;
        }
        iterations += 1;
        if extrema_crossing_gap(&h)? <= 1 {
            streak += 1;
            if streak >= config.s_number {
                return Ok(Sifted {
                    samples: h,
                    iterations,
                    converged: true,
                });
            }
        } else {
            streak = 0;
        }
    }
    Ok(Sifted {
        samples: h,
        iterations,
        converged: false,
    })
}

fn validate_series(series: &TimeSeries) -> Result<()> {
    if series.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: series.len(),
        });
    }
    ensure_finite(&series.samples)
}

/// Rounding-level wiggles below this fraction of the input range do not
/// count as oscillation.
const MONOTONE_TOL: f64 = 1e-10;

fn value_range(x: &[f64]) -> f64 {
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Distance from the nearest monotone sequence, measured as the largest
/// drop below the running maximum (or rise above the running minimum),
/// whichever direction fits better.
pub fn monotone_defect(x: &[f64]) -> f64 {
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut drop, mut rise) = (0.0f64, 0.0f64);
    for &v in x {
        hi = hi.max(v);
        lo = lo.min(v);
        drop = drop.max(hi - v);
        rise = rise.max(v - lo);
    }
    drop.min(rise)
}

/// Plain EMD: sift and subtract until the remainder is monotonic (up to
/// rounding) or `max_imfs` IMFs have been extracted.
pub fn emd(series: &TimeSeries, config: &EmdConfig) -> Result<Decomposition> {
    validate_series(series)?;
    config.validate()?;
    Ok(emd_unchecked(&series.samples, config))
}

fn emd_unchecked(samples: &[f64], config: &EmdConfig) -> Decomposition {
    let n = samples.len();
    let limit = config.imf_limit(n);
    let mut residual = samples.to_vec();
    let mut imfs = Vec::new();
    let mut diagnostics = Vec::new();
    let tol = MONOTONE_TOL * value_range(samples);
    while imfs.len() < limit && monotone_defect(&residual) > tol {
        let sifted = match sift(&residual, config) {
            Ok(s) => s,
            Err(_) => break,
        };
        for (r, v) in residual.iter_mut().zip(&sifted.samples) {
            *r -= v;
        }
        diagnostics.push(ImfDiagnostics {
            sift_iterations: sifted.iterations,
            truncated: usize::from(!sifted.converged),
            trials: 1,
        });
        imfs.push(Imf {
            index: imfs.len() + 1,
            samples: sifted.samples,
        });
    }
    Decomposition {
        imfs,
        residual,
        source_len: n,
        diagnostics,
    }
}

/// RNG for ensemble trial `trial` under master `seed`.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Noise-assisted ensemble EMD.
///
/// The residual is the closure term `series - sum of averaged IMFs`, so
/// [`reconstruct`] returns the input.
pub fn eemd(series: &TimeSeries, config: &EmdConfig) -> Result<Decomposition> {
    validate_series(series)?;
    config.validate()?;
    let samples = &series.samples;
    let n = samples.len();
    let noise_sd = config.noise_amplitude * population_sd(samples);

    let trials: Vec<Decomposition> = (0..config.ensemble_size)
        .into_par_iter()
        .map(|k| {
            if noise_sd == 0.0 {
                return emd_unchecked(samples, config);
            }
            let mut rng = trial_rng(config.seed, k as u64);
            let perturbed: Vec<f64> = samples
                .iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + noise_sd * z
                })
                .collect();
            emd_unchecked(&perturbed, config)
        })
        .collect();

    let num_imfs = trials.iter().map(|d| d.imfs.len()).max().unwrap_or(0);
    let mut sums = vec![vec![0.0; n]; num_imfs];
    let mut diagnostics = vec![ImfDiagnostics::default(); num_imfs];
    // fixed trial order keeps the floating-point sums schedule-independent
    for trial in &trials {
        for (j, imf) in trial.imfs.iter().enumerate() {
            for (s, v) in sums[j].iter_mut().zip(&imf.samples) {
                *s += v;
            }
            let d = &mut diagnostics[j];
            let td = &trial.diagnostics[j];
            d.sift_iterations += td.sift_iterations;
            d.truncated += td.truncated;
            d.trials += td.trials;
        }
    }
    let scale = config.ensemble_size as f64;
    let imfs: Vec<Imf> = sums
        .into_iter()
        .enumerate()
        .map(|(j, mut s)| {
            if config.ensemble_size > 1 {
                s.iter_mut().for_each(|v| *v /= scale);
            }
            Imf {
                index: j + 1,
                samples: s,
            }
        })
        .collect();

    let mut residual = samples.clone();
    for imf in &imfs {
        for (r, v) in residual.iter_mut().zip(&imf.samples) {
            *r -= v;
        }
    }
    Ok(Decomposition {
        imfs,
        residual,
        source_len: n,
        diagnostics,
    })
}

/// Sum of all IMFs and the residual.
pub fn reconstruct(d: &Decomposition) -> Vec<f64> {
    let mut out = d.residual.clone();
    for imf in &d.imfs {
        for (o, v) in out.iter_mut().zip(&imf.samples) {
            *o += v;
        }
    }
    out
}

/// Cross-energy between distinct IMFs relative to the energy of the
/// reconstructed signal. Zero for exactly orthogonal IMFs.
pub fn orthogonality_index(d: &Decomposition) -> Result<f64> {
    if d.imfs.len() < 2 {
        return Err(Error::invalid("orthogonality index needs at least 2 IMFs"));
    }
    let x = reconstruct(d);
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::DegenerateSignal("zero-energy signal"));
    }
    let mut cross = 0.0;
    for t in 0..d.source_len {
        let total: f64 = d.imfs.iter().map(|imf| imf.samples[t]).sum();
        let squares: f64 = d.imfs.iter().map(|imf| imf.samples[t].powi(2)).sum();
        // sum over j != k of a_j a_k
        cross += total * total - squares;
    }
    Ok(cross / energy)
}

pub(crate) fn population_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}
