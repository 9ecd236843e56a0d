//! EMD/EEMD identities and the analytic-signal properties.

use std::f64::consts::PI;

use lcdsc::emd::{extrema_crossing_gap, find_extrema, monotone_defect};
use lcdsc::simulation::{local_doppler, LocalSignalSpec};
use lcdsc::spectral::analytic_signal;
use lcdsc::{eemd, emd, instantaneous_amplitude, reconstruct, EmdConfig, TimeSeries};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// A few random tones, a random trend and white noise.
fn random_signal(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(64..=4096);
    let tones: Vec<(f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| {
            (
                rng.random_range(0.1..5.0),
                rng.random_range(0.002..0.3),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let slope = rng.random_range(-0.01..0.01);
    let noise = rng.random_range(0.0..1.0);
    (0..n)
        .map(|t| {
            let t = t as f64;
            let z: f64 = StandardNormal.sample(&mut rng);
            tones
                .iter()
                .map(|(a, f, p)| a * (2.0 * PI * f * t + p).sin())
                .sum::<f64>()
                + slope * t
                + noise * z
        })
        .collect()
}

fn range(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn emd_reconstructs_input() {
    for seed in 0..100 {
        let x = random_signal(seed);
        let d = emd(&TimeSeries::new(x.clone()), &EmdConfig::plain()).unwrap();
        let err = max_abs_diff(&reconstruct(&d), &x);
        assert!(err < 1e-9 * range(&x), "seed {seed}: {err}");
    }
}

#[test]
fn converged_imfs_satisfy_extrema_property() {
    for seed in 0..20 {
        let x = random_signal(seed);
        let d = emd(&TimeSeries::new(x), &EmdConfig::plain()).unwrap();
        for (imf, diag) in d.imfs.iter().zip(&d.diagnostics) {
            if diag.truncated == 0 {
                assert!(extrema_crossing_gap(&imf.samples).unwrap() <= 1, "seed {seed} imf {}", imf.index);
            }
        }
    }
}

#[test]
fn exhausted_residual_is_nearly_monotone() {
    let config = EmdConfig {
        max_imfs: Some(64),
        ..EmdConfig::plain()
    };
    for seed in 0..20 {
        let x = random_signal(seed);
        let d = emd(&TimeSeries::new(x.clone()), &config).unwrap();
        assert!(d.num_imfs() < 64);
        let (maxima, minima) = find_extrema(&d.residual).unwrap();
        let flat = monotone_defect(&d.residual) <= 1e-10 * range(&x);
        assert!(flat || maxima.len() + minima.len() < 2, "seed {seed}");
    }
}

fn doppler(seed: u64) -> TimeSeries {
    local_doppler(&LocalSignalSpec::centered(2500, 0.2, seed)).unwrap().noisy
}

#[test]
fn eemd_reconstructs_input() {
    let x = doppler(4);
    let config = EmdConfig {
        ensemble_size: 20,
        seed: 9,
        ..EmdConfig::default()
    };
    let d = eemd(&x, &config).unwrap();
    assert!(d.num_imfs() >= 6);
    assert!(max_abs_diff(&reconstruct(&d), &x.samples) < 1e-9 * range(&x.samples));
}

#[test]
fn eemd_independent_of_thread_count() {
    let x = doppler(5);
    let config = EmdConfig {
        ensemble_size: 12,
        seed: 3,
        ..EmdConfig::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| eemd(&x, &config).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn degenerate_ensemble_is_plain_emd() {
    let x = TimeSeries::new(random_signal(11));
    assert_eq!(
        eemd(&x, &EmdConfig::plain()).unwrap(),
        emd(&x, &EmdConfig::plain()).unwrap()
    );
}

fn short_signal() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 8..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn emd_identity_holds(x in short_signal()) {
        let d = emd(&TimeSeries::new(x.clone()), &EmdConfig::plain()).unwrap();
        let r = range(&x).max(f64::MIN_POSITIVE);
        prop_assert!(max_abs_diff(&reconstruct(&d), &x) < 1e-9 * r);
    }

    #[test]
    fn modulus_dominates_real_part(x in short_signal()) {
        let a = analytic_signal(&x).unwrap();
        let amp = a.modulus();
        let tol = 1e-9 * range(&x);
        for (m, re) in amp.iter().zip(&a.real_part) {
            prop_assert!(*m >= 0.0);
            prop_assert!(*m >= re.abs() - tol);
        }
    }

    #[test]
    fn real_part_round_trips(x in short_signal()) {
        let a = analytic_signal(&x).unwrap();
        prop_assert!(max_abs_diff(&a.real_part, &x) <= 1e-9 * range(&x));
    }

    #[test]
    fn amplitude_scales(x in short_signal(), c in 0.001f64..1000.0) {
        let base = instantaneous_amplitude(&x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let top = base.iter().cloned().fold(0.0, f64::max);
        for (s, b) in instantaneous_amplitude(&scaled).unwrap().iter().zip(&base) {
            prop_assert!((s - c * b).abs() <= 1e-9 * c * top.max(f64::MIN_POSITIVE));
        }
    }
}
