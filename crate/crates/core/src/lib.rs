//! Local change point detection and signal cleaning (LCDSC) for
//! EEMD-decomposed signals.
//!
//! A noisy recording is decomposed into IMFs; each IMF's instantaneous
//! amplitude is segmented at changes in variance; segments whose variance is
//! significantly larger than their neighbors' (after Holm-Bonferroni
//! correction over every segment of every IMF) are kept and everything else
//! is zeroed. Summing the cleaned IMFs gives the cleaned signal.
//!
//! ```no_run
//! use lcdsc::{lcdsc_clean, LcdscConfig, TimeSeries};
//!
//! let samples: Vec<f64> = (0..2000).map(|t| (t as f64 * 0.1).sin()).collect();
//! let report = lcdsc_clean(&TimeSeries::new(samples), &LcdscConfig::default()).unwrap();
//! println!("significant IMFs: {:?}", report.significant_imfs);
//! ```

pub mod baselines;
pub mod changepoint;
pub mod cleaning;
pub mod cli;
pub mod emd;
pub mod error;
pub mod inference;
pub mod simulation;
pub mod spectral;

pub use changepoint::{detect_changepoints, ChangePointSet, PenaltyKind};
pub use cleaning::{gamma_sweep, lcdsc_clean, Analysis, CleaningReport, LcdscConfig};
pub use emd::{eemd, emd, reconstruct, Decomposition, EmdConfig, Imf, TimeSeries};
pub use error::{Error, Result};
pub use inference::{f_cdf, holm_bonferroni, SegmentDecision, SegmentTest};
pub use spectral::{instantaneous_amplitude, instantaneous_frequency};
