//! Oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use lcdsc::changepoint::{objective, SegStats};
use lcdsc::PenaltyKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

/// Piecewise Gaussian with up to three variance changes. Every third
/// instance is rounded to two decimals so that repeated values occur.
pub fn instance(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(12..=40);
    let changes = rng.random_range(0..=3);
    let mut cuts: Vec<usize> = (0..changes).map(|_| rng.random_range(1..n)).collect();
    cuts.sort_unstable();
    let mut sd = 1.0;
    let mut next = 0;
    (0..n)
        .map(|t| {
            if next < cuts.len() && t == cuts[next] {
                sd = rng.random_range(0.2..5.0);
                next += 1;
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = sd * z;
            if seed.is_multiple_of(3) {
                (v * 100.0).round() / 100.0
            } else {
                v
            }
        })
        .collect()
}

/// Cost of `[i, j]` recomputed directly with a two-pass variance.
pub fn direct_cost(x: &[f64], i: usize, j: usize, floor: f64) -> f64 {
    let seg = &x[i..=j];
    let n = seg.len() as f64;
    let mean = seg.iter().sum::<f64>() / n;
    let var = seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    n * var.max(floor).ln()
}

pub fn direct_penalty(kind: PenaltyKind, n: usize, lengths: &[usize]) -> f64 {
    let m = (lengths.len() - 1) as f64;
    let n = n as f64;
    match kind {
        PenaltyKind::Bic => m * n.ln(),
        PenaltyKind::Mbic => 3.0 * m * n.ln() + lengths.iter().map(|&l| (l as f64).ln()).sum::<f64>(),
        PenaltyKind::Aic { beta } => beta * m,
    }
}

/// Every admissible change-point vector with at most `max_m` entries, in
/// order of size and then lexicographically.
pub fn all_partitions(n: usize, min_seg: usize, max_m: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, min_seg: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if n - start >= min_seg {
                out.push(cur.clone());
            }
            return;
        }
        // tau closes [start, tau]
        let mut tau = start + min_seg - 1;
        while tau + 1 + min_seg * left <= n {
            cur.push(tau);
            extend(tau + 1, n, min_seg, left - 1, cur, out);
            cur.pop();
            tau += 1;
        }
    }
    let mut out = Vec::new();
    for m in 0..=max_m {
        extend(0, n, min_seg, m, &mut Vec::new(), &mut out);
    }
    out
}

/// Minimum objective with ties resolved to fewer change points, then the
/// lexicographically smallest vector (the enumeration order).
pub fn brute_force(x: &[f64], kind: PenaltyKind, min_seg: usize) -> (Vec<usize>, f64) {
    let stats = SegStats::new(x);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for taus in all_partitions(x.len(), min_seg, 3) {
        let v = objective(&stats, &taus, kind, min_seg).unwrap();
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((taus, v));
        }
    }
    best.unwrap()
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
}

/// `I_z(a, b)` for `z <= 1/2` by quadrature in `s = sqrt(t)`, which removes
/// the `t^(a - 1)` singularity for `a = 1/2`.
fn beta_quadrature(a: f64, b: f64, z: f64) -> f64 {
    let ln_b = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let f = move |s: f64| {
        if s == 0.0 {
            return if a == 0.5 { 2.0 * (-ln_b).exp() } else { 0.0 };
        }
        let t = s * s;
        2.0 * ((2.0 * a - 1.0) * s.ln() + (b - 1.0) * (1.0 - t).ln() - ln_b).exp()
    };
    let upper = z.sqrt();
    // split so the adaptive rule cannot miss a narrow peak
    let pieces = 64;
    (0..pieces)
        .map(|k| {
            let lo = upper * k as f64 / pieces as f64;
            let hi = upper * (k + 1) as f64 / pieces as f64;
            adaptive(&f, lo, hi, simpson(&f, lo, hi), 1e-14, 40)
        })
        .sum()
}

pub fn f_cdf_oracle(x: f64, d1: usize, d2: usize) -> f64 {
    let (a, b) = (0.5 * d1 as f64, 0.5 * d2 as f64);
    let z = d1 as f64 * x / (d1 as f64 * x + d2 as f64);
    if z <= 0.5 {
        beta_quadrature(a, b, z)
    } else {
        1.0 - beta_quadrature(b, a, 1.0 - z)
    }
}

