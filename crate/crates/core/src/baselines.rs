//! Whole-IMF cleaning methods used as comparison baselines.
//!
//! Subset rules keep or drop entire IMFs; the oracle variants pick the best
//! rule of a family using the true signal, which gives an upper bound on what
//! a practitioner could achieve with that family. The thresholding rules zero
//! samples (WHT) or whole inter-zero-crossing lobes (WIT) whose magnitude
//! falls below the universal threshold `sigma * sqrt(2 log n)`, with `sigma`
//! the MAD noise estimate of the IMF.

use serde::{Deserialize, Serialize};

use crate::emd::Decomposition;
use crate::error::{Error, Result};
use crate::simulation::rss;

/// Which IMFs to keep. Indices are 1-based, IMF 1 being the highest frequency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsetRule {
    /// The `k` highest-numbered (lowest-frequency) IMFs.
    KHighest(usize),
    /// The `l` lowest-numbered (highest-frequency) IMFs.
    LLowest(usize),
    /// IMFs `lo..=hi`; `lo > hi` keeps nothing.
    Band { lo: usize, hi: usize },
    ExplicitSet(Vec<usize>),
}

/// Rule families searched by [`oracle_select`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleFamily {
    KHighest,
    LLowest,
    Band,
    PowerSet,
}

impl SubsetRule {
    /// The retained 1-based indices for a decomposition with `n` IMFs.
    pub fn indices(&self, n: usize) -> Result<Vec<usize>> {
        let out: Vec<usize> = match self {
            SubsetRule::KHighest(k) => {
                check_count(*k, n)?;
                (n - k + 1..=n).collect()
            }
            SubsetRule::LLowest(l) => {
                check_count(*l, n)?;
                (1..=*l).collect()
            }
            SubsetRule::Band { lo, hi } => {
                if lo <= hi && (*lo == 0 || *hi > n) {
                    return Err(Error::invalid(format!(
                        "band [{lo}, {hi}] outside 1..={n}"
                    )));
                }
                (*lo..=*hi).collect()
            }
            SubsetRule::ExplicitSet(set) => {
                let mut set = set.clone();
                set.sort_unstable();
                set.dedup();
                if set.iter().any(|&j| j == 0 || j > n) {
                    return Err(Error::invalid(format!("IMF index outside 1..={n}")));
                }
                set
            }
        };
        Ok(out)
    }
}

fn check_count(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::invalid(format!("cannot keep {k} of {n} IMFs")));
    }
    Ok(())
}

fn sum_imfs(d: &Decomposition, indices: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; d.source_len];
    for &j in indices {
        for (o, v) in out.iter_mut().zip(&d.imfs[j - 1].samples) {
            *o += v;
        }
    }
    out
}

/// Sum of the retained IMFs; the residual is never included.
pub fn keep_subset(d: &Decomposition, rule: &SubsetRule) -> Result<Vec<f64>> {
    let indices = rule.indices(d.num_imfs())?;
    Ok(sum_imfs(d, &indices))
}

/// Best rule of `family` against `truth`, by RSS. Ties go to the smaller
/// retained set, then to the earlier candidate.
pub fn oracle_select(
    d: &Decomposition,
    truth: &[f64],
    family: RuleFamily,
) -> Result<(SubsetRule, f64)> {
    if truth.len() != d.source_len {
        return Err(Error::LengthMismatch {
            expected: d.source_len,
            got: truth.len(),
        });
    }
    let n = d.num_imfs();
    let candidates: Vec<SubsetRule> = match family {
        RuleFamily::KHighest => (0..=n).map(SubsetRule::KHighest).collect(),
        RuleFamily::LLowest => (0..=n).map(SubsetRule::LLowest).collect(),
        RuleFamily::Band => std::iter::once(SubsetRule::Band { lo: 1, hi: 0 })
            .chain((1..=n).flat_map(|lo| (lo..=n).map(move |hi| SubsetRule::Band { lo, hi })))
            .collect(),
        RuleFamily::PowerSet => {
            if n > 20 {
                return Err(Error::SubsetExplosion(n));
            }
            (0u32..(1 << n))
                .map(|mask| {
                    SubsetRule::ExplicitSet((1..=n).filter(|j| mask & (1 << (j - 1)) != 0).collect())
                })
                .collect()
        }
    };

    let mut best: Option<(SubsetRule, f64, usize)> = None;
    for rule in candidates {
        let indices = rule.indices(n)?;
        let value = rss(&sum_imfs(d, &indices), truth)?;
        let size = indices.len();
        let better = match &best {
            None => true,
            Some((_, v, s)) => value < *v || (value == *v && size < *s),
        };
        if better {
            best = Some((rule, value, size));
        }
    }
    let (rule, value, _) = best.expect("every family has at least one candidate");
    Ok((rule, value))
}

/// Median absolute deviation about the median, over 0.6745.
pub fn noise_sigma(imf: &[f64]) -> Result<f64> {
    if imf.is_empty() {
        return Err(Error::invalid("noise_sigma of an empty series"));
    }
    let med = median(imf.to_vec());
    let dev: Vec<f64> = imf.iter().map(|v| (v - med).abs()).collect();
    Ok(median(dev) / 0.6745)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn universal_threshold(imf: &[f64]) -> Result<f64> {
    let n = imf.len() as f64;
    Ok(noise_sigma(imf)? * (2.0 * n.ln()).sqrt())
}

/// Hard thresholding: samples with `|x| <= T` are zeroed.
pub fn wavelet_hard_threshold(imf: &[f64]) -> Result<Vec<f64>> {
    let t = universal_threshold(imf)?;
    Ok(imf
        .iter()
        .map(|&v| if v.abs() <= t { 0.0 } else { v })
        .collect())
}

/// Interval thresholding: each run between zero crossings is kept whole if
/// its peak magnitude exceeds `T`, and zeroed otherwise.
pub fn wavelet_interval_threshold(imf: &[f64]) -> Result<Vec<f64>> {
    let t = universal_threshold(imf)?;
    let mut out = vec![0.0; imf.len()];
    for (start, end) in zero_crossing_intervals(imf) {
        let peak = imf[start..end].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak > t {
            out[start..end].copy_from_slice(&imf[start..end]);
        }
    }
    Ok(out)
}

/// Half-open runs of constant sign. Exact zeros join the run they follow.
pub fn zero_crossing_intervals(x: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if x.is_empty() {
        return out;
    }
    let mut start = 0;
    let mut sign = 0i8;
    for (i, &v) in x.iter().enumerate() {
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 && sign != 0 && s != sign {
            out.push((start, i));
            start = i;
        }
        if s != 0 {
            sign = s;
        }
    }
    out.push((start, x.len()));
    out
}

/// Applies a per-IMF cleaner and sums the results (residual excluded).
pub fn threshold_all(d: &Decomposition, cleaner: fn(&[f64]) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut out = vec![0.0; d.source_len];
    for imf in &d.imfs {
        for (o, v) in out.iter_mut().zip(cleaner(&imf.samples)?) {
            *o += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn toy(n_imfs: usize, len: usize) -> Decomposition {
        let imfs = (0..n_imfs)
            .map(|j| {
                (0..len)
                    .map(|t| ((t + 1) as f64 * (j + 1) as f64 * 0.37).sin())
                    .collect()
            })
            .collect();
        Decomposition::from_parts(imfs, vec![0.5; len]).unwrap()
    }

    #[test]
    fn explicit_sets() {
        let d = toy(4, 30);
        let all = keep_subset(&d, &SubsetRule::ExplicitSet(vec![1, 2, 3, 4])).unwrap();
        let recon = crate::emd::reconstruct(&d);
        for (a, r) in all.iter().zip(&recon) {
            assert!((a - (r - 0.5)).abs() < 1e-12);
        }
        let none = keep_subset(&d, &SubsetRule::ExplicitSet(vec![])).unwrap();
        assert!(none.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn k_highest_keeps_lowest_frequency_imfs() {
        let d = toy(7, 20);
        let out = keep_subset(&d, &SubsetRule::KHighest(2)).unwrap();
        for (t, v) in out.iter().enumerate() {
            assert_eq!(*v, 0.0 + d.imfs[5].samples[t] + d.imfs[6].samples[t]);
        }
        let low = keep_subset(&d, &SubsetRule::LLowest(1)).unwrap();
        assert_eq!(low, d.imfs[0].samples);
        assert!(keep_subset(&d, &SubsetRule::KHighest(8)).is_err());
        assert!(keep_subset(&d, &SubsetRule::Band { lo: 0, hi: 2 }).is_err());
    }

    #[test]
    fn oracle_finds_exact_singleton() {
        let d = toy(5, 40);
        let truth = d.imfs[2].samples.clone();
        for family in [RuleFamily::Band, RuleFamily::PowerSet] {
            let (rule, value) = oracle_select(&d, &truth, family).unwrap();
            assert_eq!(value, 0.0);
            assert_eq!(rule.indices(5).unwrap(), vec![3]);
        }
    }

    #[test]
    fn power_set_dominates_windows() {
        let d = toy(6, 50);
        let truth: Vec<f64> = (0..50).map(|t| (t as f64 * 0.2).cos()).collect();
        let (_, ps) = oracle_select(&d, &truth, RuleFamily::PowerSet).unwrap();
        for family in [RuleFamily::KHighest, RuleFamily::LLowest, RuleFamily::Band] {
            assert!(ps <= oracle_select(&d, &truth, family).unwrap().1);
        }
    }

    #[test]
    fn power_set_guard() {
        let d = toy(21, 8);
        assert_eq!(
            oracle_select(&d, &[0.0; 8], RuleFamily::PowerSet),
            Err(Error::SubsetExplosion(21))
        );
    }

    #[test]
    fn mad_sigma() {
        let x = noise(10_000, 1);
        assert!((noise_sigma(&x).unwrap() - 1.0).abs() < 0.05);
        assert_eq!(noise_sigma(&[2.0; 10]).unwrap(), 0.0);
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        assert!((noise_sigma(&scaled).unwrap() - 3.0 * noise_sigma(&x).unwrap()).abs() < 1e-12);
        assert!(noise_sigma(&[]).is_err());
    }

    #[test]
    fn hard_threshold_keeps_spike() {
        let mut x = noise(2000, 5);
        x[1000] = 50.0;
        let out = wavelet_hard_threshold(&x).unwrap();
        assert_eq!(out[1000], 50.0);
        let survivors = out.iter().filter(|v| **v != 0.0).count();
        assert!(survivors <= 1 + 20, "{survivors} survivors");
        assert_eq!(wavelet_hard_threshold(&out).unwrap(), out);
    }

    #[test]
    fn hard_threshold_of_subthreshold_is_zero() {
        // MAD of alternating +-1 is 1, so T > 1 and everything is zeroed
        let x: Vec<f64> = (0..100).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(wavelet_hard_threshold(&x).unwrap().iter().all(|v| *v == 0.0));
        assert!(wavelet_interval_threshold(&x).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn interval_threshold_keeps_strong_sinusoid() {
        // a sine's MAD is ~0.707, so T ~ 0.707/0.6745*sqrt(2 ln 1000) ~ 3.9
        let x: Vec<f64> = (0..1000)
            .map(|t| {
                let s = (t as f64 * 0.05).sin();
                if s.abs() > 0.99 {
                    s * 10.0
                } else {
                    s
                }
            })
            .collect();
        let out = wavelet_interval_threshold(&x).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn intervals_split_at_sign_changes() {
        let x = [1.0, 2.0, -1.0, 0.0, -2.0, 3.0];
        assert_eq!(zero_crossing_intervals(&x), vec![(0, 2), (2, 5), (5, 6)]);
    }
}
