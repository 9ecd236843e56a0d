//! Synthetic local signals, error metrics, and the seeded benchmark runner.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::baselines::{
    oracle_select, threshold_all, wavelet_hard_threshold, wavelet_interval_threshold, RuleFamily,
};
use crate::cleaning::{Analysis, LcdscConfig};
use crate::emd::{eemd, TimeSeries};
use crate::error::{Error, Result};

/// Inclusive index interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, t: usize) -> bool {
        self.start <= t && t <= self.end
    }
}

/// A recording of length `total_len` with the signal present on `active`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalSignalSpec {
    pub total_len: usize,
    pub active: Interval,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl LocalSignalSpec {
    /// Signal on the middle fifth, `[2T/5, 3T/5]`.
    pub fn centered(total_len: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            total_len,
            active: Interval::new(2 * total_len / 5, 3 * total_len / 5),
            noise_sigma,
            seed,
        }
    }

    /// Centered active window whose length gives the requested locality ratio.
    pub fn with_locality(total_len: usize, ratio: f64, noise_sigma: f64, seed: u64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::invalid("locality ratio must be positive"));
        }
        let len = (ratio * total_len as f64 / (1.0 + ratio)).round() as usize;
        if len < 2 || len >= total_len {
            return Err(Error::invalid("locality ratio leaves no room for noise"));
        }
        let start = (total_len - len) / 2;
        Ok(Self {
            total_len,
            active: Interval::new(start, start + len - 1),
            noise_sigma,
            seed,
        })
    }
}

/// A noisy recording with its clean truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSignal {
    pub noisy: TimeSeries,
    pub truth: Vec<f64>,
    pub active: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSignal {
    pub noisy: TimeSeries,
    pub truth: Vec<f64>,
    pub first: Interval,
    pub second: Interval,
}

/// `7 sqrt(u (1 - u)) sin(2 pi 1.05 / (u + 0.05))` on `[0, 1]`.
pub fn doppler(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("doppler argument {u} outside [0, 1]")));
    }
    Ok(7.0 * (u * (1.0 - u)).sqrt() * (2.0 * PI * 1.05 / (u + 0.05)).sin())
}

/// Doppler stretched over `window` (`u` runs from 0 at the first sample to 1
/// at the last), added into `out`.
fn add_doppler(out: &mut [f64], window: Interval) -> Result<()> {
    let span = (window.end - window.start) as f64;
    for (k, o) in out[window.start..=window.end].iter_mut().enumerate() {
        *o += doppler(k as f64 / span)?;
    }
    Ok(())
}

fn add_noise(x: &mut [f64], sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in x.iter_mut() {
        let z: f64 = StandardNormal.sample(&mut rng);
        *v += sigma * z;
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("noise sigma must be finite and >= 0"));
    }
    Ok(())
}

/// Doppler on the active window plus white Gaussian noise everywhere.
pub fn local_doppler(spec: &LocalSignalSpec) -> Result<LocalSignal> {
    check_sigma(spec.noise_sigma)?;
    let a = spec.active;
    if a.end <= a.start {
        return Err(Error::invalid("active interval must span at least two samples"));
    }
    if a.end >= spec.total_len {
        return Err(Error::invalid("active interval exceeds the recording"));
    }
    let mut truth = vec![0.0; spec.total_len];
    add_doppler(&mut truth, a)?;
    let mut noisy = truth.clone();
    add_noise(&mut noisy, spec.noise_sigma, spec.seed);
    Ok(LocalSignal {
        noisy: TimeSeries::new(noisy),
        truth,
        active: a,
    })
}

/// Unit-amplitude linear chirp from `f0` to `f1` cycles per sample, plus noise.
pub fn chirp(total_len: usize, f0: f64, f1: f64, sigma: f64, seed: u64) -> Result<TimeSeries> {
    if total_len < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: total_len,
        });
    }
    check_sigma(sigma)?;
    for f in [f0, f1] {
        if !(0.0..=0.5).contains(&f) {
            return Err(Error::invalid(format!(
                "frequency {f} outside [0, 0.5] cycles per sample (Nyquist)"
            )));
        }
    }
    let rate = (f1 - f0) / (total_len - 1) as f64;
    let mut x: Vec<f64> = (0..total_len)
        .map(|t| {
            let t = t as f64;
            (2.0 * PI * (f0 * t + 0.5 * rate * t * t)).sin()
        })
        .collect();
    add_noise(&mut x, sigma, seed);
    Ok(TimeSeries::new(x))
}

/// Two 500-sample Dopplers separated by a noise gap of `delta` samples, with
/// 500 samples of noise before the first and after the second.
pub fn double_doppler(delta: usize, sigma: f64, seed: u64) -> Result<DoubleSignal> {
    check_sigma(sigma)?;
    let total = 2000 + delta;
    let first = Interval::new(500, 999);
    let second = Interval::new(1000 + delta, 1499 + delta);
    let mut truth = vec![0.0; total];
    add_doppler(&mut truth, first)?;
    add_doppler(&mut truth, second)?;
    let mut noisy = truth.clone();
    add_noise(&mut noisy, sigma, seed);
    Ok(DoubleSignal {
        noisy: TimeSeries::new(noisy),
        truth,
        first,
        second,
    })
}

/// Residual sum of squares between an estimate and the truth.
pub fn rss(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| (t - e).powi(2))
        .sum())
}

/// `len(A) / (T - len(A))`.
pub fn locality_ratio(active: Interval, total_len: usize) -> Result<f64> {
    let len = active.len();
    if active.is_empty() || len == 0 || len >= total_len {
        return Err(Error::invalid("active length must lie strictly between 0 and T"));
    }
    Ok(len as f64 / (total_len - len) as f64)
}

/// Whether a cleaned IMF shows both bursts with at least half of the gap
/// between them zeroed.
pub fn separability_check(cleaned_imf: &[f64], first: Interval, second: Interval) -> Result<bool> {
    if first.end + 1 >= second.start {
        return Err(Error::invalid("no gap between the two intervals"));
    }
    if second.end >= cleaned_imf.len() {
        return Err(Error::LengthMismatch {
            expected: second.end + 1,
            got: cleaned_imf.len(),
        });
    }
    let nonzero_in = |a: Interval| cleaned_imf[a.start..=a.end].iter().any(|v| *v != 0.0);
    if !nonzero_in(first) || !nonzero_in(second) {
        return Ok(false);
    }
    let gap = &cleaned_imf[first.end + 1..second.start];
    let zeros = gap.iter().filter(|v| **v == 0.0).count();
    Ok(2 * zeros >= gap.len())
}

/// Cleaning methods compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    Lcdsc,
    KHigh,
    LLow,
    Band,
    PowerSet,
    Wht,
    Wit,
    None,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Lcdsc,
        Method::KHigh,
        Method::LLow,
        Method::Band,
        Method::PowerSet,
        Method::Wht,
        Method::Wit,
        Method::None,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Lcdsc => "lcdsc",
            Method::KHigh => "khigh",
            Method::LLow => "llow",
            Method::Band => "band",
            Method::PowerSet => "powerset",
            Method::Wht => "wht",
            Method::Wit => "wit",
            Method::None => "none",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}

/// Parses a comma-separated method list, rejecting unknown names.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Method::from_str)
        .collect()
}

/// One benchmark setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// Doppler on the middle fifth of a length-`total_len` recording.
    Centered { total_len: usize, sigma: f64 },
    /// Centered Doppler whose length sets the locality ratio.
    Locality {
        total_len: usize,
        sigma: f64,
        ratio: f64,
    },
    /// Two Dopplers separated by a gap of `delta` samples.
    Gap { delta: usize, sigma: f64 },
}

impl Scenario {
    pub fn total_len(&self) -> usize {
        match *self {
            Scenario::Centered { total_len, .. } | Scenario::Locality { total_len, .. } => total_len,
            Scenario::Gap { delta, .. } => 2000 + delta,
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            Scenario::Centered { sigma, .. }
            | Scenario::Locality { sigma, .. }
            | Scenario::Gap { sigma, .. } => sigma,
        }
    }

    /// The `param` CSV column: the locality ratio, or the gap length.
    pub fn param(&self) -> f64 {
        match *self {
            Scenario::Centered { total_len, .. } => {
                let spec = LocalSignalSpec::centered(total_len, 0.0, 0);
                locality_ratio(spec.active, total_len).unwrap_or(f64::NAN)
            }
            Scenario::Locality { ratio, .. } => ratio,
            Scenario::Gap { delta, .. } => delta as f64,
        }
    }

    /// The noisy recording and its truth for the given instance seed.
    pub fn generate(&self, seed: u64) -> Result<(TimeSeries, Vec<f64>)> {
        match *self {
            Scenario::Centered { total_len, sigma } => {
                let s = local_doppler(&LocalSignalSpec::centered(total_len, sigma, seed))?;
                Ok((s.noisy, s.truth))
            }
            Scenario::Locality {
                total_len,
                sigma,
                ratio,
            } => {
                let s = local_doppler(&LocalSignalSpec::with_locality(total_len, ratio, sigma, seed)?)?;
                Ok((s.noisy, s.truth))
            }
            Scenario::Gap { delta, sigma } => {
                let s = double_doppler(delta, sigma, seed)?;
                Ok((s.noisy, s.truth))
            }
        }
    }
}

/// The standard comparison grid: `T` in {1000, 2000, 2500} and
/// sigma in {0.2, 0.3, 0.4, 0.5}.
pub fn default_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for total_len in [1000, 2000, 2500] {
        for sigma in [0.2, 0.3, 0.4, 0.5] {
            out.push(Scenario::Centered { total_len, sigma });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub total_len: usize,
    pub sigma: f64,
    pub param: f64,
    pub method: Method,
    pub replicate: usize,
    pub rss: f64,
    pub wall_time: Duration,
}

/// splitmix64 finalizer.
pub fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Instance seed for grid cell `cell`, replicate `rep`.
pub fn instance_seed(base_seed: u64, cell: usize, rep: usize) -> u64 {
    mix_seed(mix_seed(mix_seed(base_seed) ^ cell as u64) ^ rep as u64)
}

/// Runs `method` on one instance. `analysis` carries the shared decomposition.
pub fn run_method(
    method: Method,
    noisy: &TimeSeries,
    truth: &[f64],
    analysis: &Analysis,
    config: &LcdscConfig,
) -> Result<Vec<f64>> {
    let d = &analysis.decomposition;
    let estimate = match method {
        Method::Lcdsc => analysis.clean(config)?.cleaned_signal,
        Method::KHigh | Method::LLow | Method::Band | Method::PowerSet => {
            let family = match method {
                Method::KHigh => RuleFamily::KHighest,
                Method::LLow => RuleFamily::LLowest,
                Method::Band => RuleFamily::Band,
                _ => RuleFamily::PowerSet,
            };
            let (rule, _) = oracle_select(d, truth, family)?;
            crate::baselines::keep_subset(d, &rule)?
        }
        Method::Wht => threshold_all(d, wavelet_hard_threshold)?,
        Method::Wit => threshold_all(d, wavelet_interval_threshold)?,
        Method::None => noisy.samples.clone(),
    };
    Ok(estimate)
}

/// Every method on every `(cell, replicate)` instance, all methods sharing
/// one decomposition per instance. Rows are ordered by cell, method, then
/// replicate.
pub fn run_benchmark(
    methods: &[Method],
    grid: &[Scenario],
    replicates: usize,
    base_seed: u64,
    config: &LcdscConfig,
) -> Result<Vec<BenchResult>> {
    if replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    if methods.is_empty() {
        return Err(Error::invalid("no methods selected"));
    }
    config.validate()?;
    let needs_decomposition = methods.iter().any(|m| *m != Method::None);

    let mut rows = Vec::new();
    for (cell, scenario) in grid.iter().enumerate() {
        let mut cell_rows = Vec::new();
        for rep in 0..replicates {
            let seed = instance_seed(base_seed, cell, rep);
            let (noisy, truth) = scenario.generate(seed)?;
            let analysis = if needs_decomposition {
                let emd_cfg = crate::emd::EmdConfig {
                    seed: mix_seed(seed),
                    ..config.emd.clone()
                };
                let d = eemd(&noisy, &emd_cfg)?;
                Analysis::from_decomposition(d, config)?
            } else {
                Analysis {
                    decomposition: crate::emd::Decomposition::from_parts(
                        Vec::new(),
                        noisy.samples.clone(),
                    )?,
                    amplitudes: Vec::new(),
                    changepoints: Vec::new(),
                    notes: Vec::new(),
                }
            };
            for &method in methods {
                let started = Instant::now();
                let estimate = run_method(method, &noisy, &truth, &analysis, config)?;
                let wall_time = started.elapsed();
                cell_rows.push(BenchResult {
                    total_len: scenario.total_len(),
                    sigma: scenario.sigma(),
                    param: scenario.param(),
                    method,
                    replicate: rep,
                    rss: rss(&estimate, &truth)?,
                    wall_time,
                });
            }
        }
        cell_rows.sort_by_key(|r| (r.method, r.replicate));
        rows.extend(cell_rows);
    }
    Ok(rows)
}

/// Formats a float with 12 significant digits.
pub fn fmt12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{:.11e}", v);
    // normalise to a plain decimal when it is short enough
    let parsed: f64 = s.parse().unwrap_or(v);
    let plain = format!("{parsed}");
    if plain.len() <= 20 {
        plain
    } else {
        s
    }
}

/// CSV with header `T,sigma,param,method,replicate,rss,seconds`.
///
/// Wall time is nondeterministic, so unless `with_timing` is set the
/// `seconds` column is written as 0.
pub fn bench_csv(rows: &[BenchResult], with_timing: bool) -> String {
    let mut out = String::from("T,sigma,param,method,replicate,rss,seconds\n");
    for r in rows {
        let secs = if with_timing {
            r.wall_time.as_secs_f64()
        } else {
            0.0
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.total_len,
            fmt12(r.sigma),
            fmt12(r.param),
            r.method.name(),
            r.replicate,
            fmt12(r.rss),
            fmt12(secs)
        );
    }
    out
}

/// Mean RSS of `method` over rows matching `filter`.
pub fn mean_rss(rows: &[BenchResult], method: Method) -> f64 {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method)
        .map(|r| r.rss)
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}
