//! Whole-pipeline invariants, baselines and signal generators.

use lcdsc::baselines::{
    keep_subset, oracle_select, wavelet_hard_threshold, wavelet_interval_threshold,
    zero_crossing_intervals, RuleFamily, SubsetRule,
};
use lcdsc::cleaning::Analysis;
use lcdsc::simulation::{
    chirp, double_doppler, local_doppler, rss, LocalSignalSpec,
};
use lcdsc::{gamma_sweep, lcdsc_clean, Decomposition, EmdConfig, LcdscConfig, TimeSeries};
use proptest::prelude::*;

fn quick_config(seed: u64) -> LcdscConfig {
    LcdscConfig {
        emd: EmdConfig {
            ensemble_size: 10,
            seed,
            ..EmdConfig::default()
        },
        ..LcdscConfig::default()
    }
}

fn doppler(total_len: usize, sigma: f64, seed: u64) -> (TimeSeries, Vec<f64>) {
    let s = local_doppler(&LocalSignalSpec::centered(total_len, sigma, seed)).unwrap();
    (s.noisy, s.truth)
}

#[test]
fn cleaned_signal_is_sum_of_cleaned_imfs() {
    let (x, _) = doppler(1500, 0.2, 1);
    let r = lcdsc_clean(&x, &quick_config(2)).unwrap();
    let mut sum = vec![0.0; x.len()];
    for row in &r.cleaned_imfs {
        for (s, v) in sum.iter_mut().zip(row) {
            *s += v;
        }
    }
    assert_eq!(sum, r.cleaned_signal);
    assert!(!r.significant_imfs.is_empty());
}

#[test]
fn support_lies_in_significant_segments() {
    let (x, _) = doppler(1500, 0.3, 3);
    let r = lcdsc_clean(&x, &quick_config(4)).unwrap();
    let mut allowed = vec![false; x.len()];
    for d in r.decisions.iter().filter(|d| d.significant) {
        allowed[d.test.seg_start..=d.test.seg_end]
            .iter_mut()
            .for_each(|a| *a = true);
    }
    for (t, v) in r.cleaned_signal.iter().enumerate() {
        assert!(*v == 0.0 || allowed[t], "nonzero at {t} outside significant segments");
    }
    // each cleaned IMF equals its IMF or is zero, sample by sample
    for (c, imf) in r.cleaned_imfs.iter().zip(&r.decomposition.imfs) {
        for (a, b) in c.iter().zip(&imf.samples) {
            assert!(*a == 0.0 || a == b);
        }
    }
}

#[test]
fn larger_gamma_keeps_a_subset() {
    let (x, _) = doppler(1500, 0.2, 5);
    let gammas = [1.0, 1.5, 2.0, 3.0, 4.0];
    let reports = gamma_sweep(&x, &gammas, &quick_config(6)).unwrap();
    for pair in reports.windows(2) {
        let kept = |r: &lcdsc::CleaningReport| {
            r.decisions
                .iter()
                .filter(|d| d.significant)
                .map(|d| (d.test.imf_index, d.test.seg_start))
                .collect::<Vec<_>>()
        };
        let (lo, hi) = (kept(&pair[0]), kept(&pair[1]));
        assert!(hi.iter().all(|s| lo.contains(s)));
        assert!(pair[1].nonzero_count() <= pair[0].nonzero_count());
        for (a, b) in pair[0].decisions.iter().zip(&pair[1].decisions) {
            assert!(b.test.p_value >= a.test.p_value);
        }
    }
}

#[test]
fn sweep_matches_independent_runs() {
    let (x, _) = doppler(1200, 0.2, 7);
    let config = quick_config(8);
    let swept = gamma_sweep(&x, &[1.0, 2.0], &config).unwrap();
    let alone = lcdsc_clean(&x, &LcdscConfig { gamma: 2.0, ..config }).unwrap();
    assert_eq!(swept[1], alone);
}

#[test]
fn pipeline_is_deterministic() {
    let (x, _) = doppler(1200, 0.25, 9);
    let a = lcdsc_clean(&x, &quick_config(10)).unwrap();
    let b = lcdsc_clean(&x, &quick_config(10)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn analysis_reuses_decomposition() {
    let (x, _) = doppler(1200, 0.2, 11);
    let config = quick_config(12);
    let analysis = Analysis::run(&x, &config).unwrap();
    assert_eq!(analysis.amplitudes.len(), analysis.decomposition.num_imfs());
    assert_eq!(analysis.clean(&config).unwrap(), lcdsc_clean(&x, &config).unwrap());
}

fn toy_decomposition(seed: u64, n: usize, k: usize) -> Decomposition {
    let s = chirp(n, 0.01, 0.3, 1.0, seed).unwrap().samples;
    let imfs: Vec<Vec<f64>> = (0..k)
        .map(|j| s.iter().enumerate().map(|(t, v)| v * ((t + j) as f64 * 0.01 * (j + 1) as f64).cos()).collect())
        .collect();
    Decomposition::from_parts(imfs, vec![0.0; n]).unwrap()
}

#[test]
fn keep_subset_is_linear() {
    let a = toy_decomposition(1, 200, 5);
    let b = toy_decomposition(2, 200, 5);
    let sum = Decomposition::from_parts(
        a.imfs
            .iter()
            .zip(&b.imfs)
            .map(|(x, y)| x.samples.iter().zip(&y.samples).map(|(p, q)| p + q).collect())
            .collect(),
        vec![0.0; 200],
    )
    .unwrap();
    for rule in [
        SubsetRule::KHighest(2),
        SubsetRule::LLowest(3),
        SubsetRule::Band { lo: 2, hi: 4 },
        SubsetRule::ExplicitSet(vec![1, 5]),
    ] {
        let whole = keep_subset(&sum, &rule).unwrap();
        let parts: Vec<f64> = keep_subset(&a, &rule)
            .unwrap()
            .iter()
            .zip(keep_subset(&b, &rule).unwrap())
            .map(|(p, q)| p + q)
            .collect();
        for (w, p) in whole.iter().zip(&parts) {
            assert!((w - p).abs() < 1e-12);
        }
    }
}

#[test]
fn power_set_oracle_is_best() {
    for seed in 0..5 {
        let d = toy_decomposition(seed, 300, 6);
        let truth = chirp(300, 0.01, 0.3, 0.0, 0).unwrap().samples;
        let (_, best) = oracle_select(&d, &truth, RuleFamily::PowerSet).unwrap();
        for family in [RuleFamily::KHighest, RuleFamily::LLowest, RuleFamily::Band] {
            let (_, v) = oracle_select(&d, &truth, family).unwrap();
            assert!(best <= v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hard_threshold_support(x in prop::collection::vec(-5.0f64..5.0, 4..400)) {
        let y = wavelet_hard_threshold(&x).unwrap();
        for (a, b) in y.iter().zip(&x) {
            prop_assert!(*a == 0.0 || a == b);
        }
    }

    #[test]
    fn interval_threshold_keeps_whole_lobes(x in prop::collection::vec(-5.0f64..5.0, 4..400)) {
        let y = wavelet_interval_threshold(&x).unwrap();
        for (s, e) in zero_crossing_intervals(&x) {
            let kept = y[s..e] == x[s..e];
            let zeroed = y[s..e].iter().all(|v| *v == 0.0);
            prop_assert!(kept || zeroed);
        }
    }

    #[test]
    fn rss_symmetric(a in prop::collection::vec(-5.0f64..5.0, 1..100)) {
        let b: Vec<f64> = a.iter().rev().cloned().collect();
        prop_assert_eq!(rss(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(rss(&a, &b).unwrap(), rss(&b, &a).unwrap());
    }
}

#[test]
fn generators_are_pure() {
    let spec = LocalSignalSpec::centered(2500, 0.2, 42);
    assert_eq!(local_doppler(&spec).unwrap(), local_doppler(&spec).unwrap());
    assert_eq!(double_doppler(500, 0.25, 1).unwrap().noisy, double_doppler(500, 0.25, 1).unwrap().noisy);
    assert_ne!(
        local_doppler(&LocalSignalSpec::centered(2500, 0.2, 43)).unwrap().noisy,
        local_doppler(&spec).unwrap().noisy
    );
}

#[test]
fn truth_support_and_white_noise() {
    let s = local_doppler(&LocalSignalSpec::centered(2500, 1.0, 3)).unwrap();
    for (t, v) in s.truth.iter().enumerate() {
        assert!(*v == 0.0 || s.active.contains(t));
    }
    let noise: Vec<f64> = s.noisy.samples.iter().zip(&s.truth).map(|(a, b)| a - b).collect();
    let mean = noise.iter().sum::<f64>() / noise.len() as f64;
    let var: f64 = noise.iter().map(|v| (v - mean).powi(2)).sum();
    let lag1: f64 = noise.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    assert!((lag1 / var).abs() < 0.1);

    let d = double_doppler(500, 0.25, 4).unwrap();
    for (t, v) in d.truth.iter().enumerate() {
        assert!(*v == 0.0 || d.first.contains(t) || d.second.contains(t));
    }
}
