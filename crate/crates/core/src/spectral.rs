//! Analytic signal, instantaneous amplitude, and instantaneous frequency.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Real and imaginary (Hilbert) parts of an analytic signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSeries {
    pub real_part: Vec<f64>,
    pub imag_part: Vec<f64>,
}

impl AnalyticSeries {
    pub fn len(&self) -> usize {
        self.real_part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real_part.is_empty()
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.real_part
            .iter()
            .zip(&self.imag_part)
            .map(|(re, im)| re.hypot(*im))
            .collect()
    }

    /// Phase with jumps larger than pi unwrapped.
    pub fn unwrapped_phase(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut offset = 0.0;
        let mut prev: Option<f64> = None;
        for (re, im) in self.real_part.iter().zip(&self.imag_part) {
            let raw = im.atan2(*re);
            if let Some(p) = prev {
                let mut d = raw + offset - p;
                while d > PI {
                    offset -= 2.0 * PI;
                    d -= 2.0 * PI;
                }
                while d < -PI {
                    offset += 2.0 * PI;
                    d += 2.0 * PI;
                }
            }
            let v = raw + offset;
            out.push(v);
            prev = Some(v);
        }
        out
    }
}

/// Frequency-domain analytic signal: negative frequencies zeroed, strictly
/// positive ones doubled, DC (and Nyquist for even lengths) kept.
pub fn analytic_signal(imf: &[f64]) -> Result<AnalyticSeries> {
    let n = imf.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    ensure_finite(imf)?;

    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = imf.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let positive_end = if n.is_multiple_of(2) { half } else { half + 1 };
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            continue;
        }
        if k < positive_end {
            *c *= 2.0;
        } else {
            *c = Complex64::new(0.0, 0.0);
        }
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(AnalyticSeries {
        real_part: buf.iter().map(|c| c.re * scale).collect(),
        imag_part: buf.iter().map(|c| c.im * scale).collect(),
    })
}

pub fn instantaneous_amplitude(imf: &[f64]) -> Result<Vec<f64>> {
    Ok(analytic_signal(imf)?.modulus())
}

/// Phase derivative over `2 pi dt`: central differences inside, one-sided
/// at the two ends.
pub fn instantaneous_frequency(imf: &[f64], dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt must be positive"));
    }
    let phase = analytic_signal(imf)?.unwrapped_phase();
    let n = phase.len();
    let scale = 1.0 / (2.0 * PI * dt);
    let mut out = vec![0.0; n];
    out[0] = (phase[1] - phase[0]) * scale;
    out[n - 1] = (phase[n - 1] - phase[n - 2]) * scale;
    for t in 1..n - 1 {
        out[t] = 0.5 * (phase[t + 1] - phase[t - 1]) * scale;
    }
    Ok(out)
}
