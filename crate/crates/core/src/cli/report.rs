//! `report.json`: config, change points, per-segment tests and the
//! significant IMFs, with every float written to 17 significant digits.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use super::io::fmt17;
use crate::changepoint::PenaltyKind;
use crate::cleaning::{CleaningReport, LcdscConfig};

/// Output file names, relative to the report.
pub const CLEANED: &str = "cleaned.csv";
pub const CLEANED_IMFS: &str = "cleaned_imfs.csv";
pub const CHANGEPOINTS: &str = "changepoints.csv";
pub const IMFS: &str = "imfs.csv";
pub const AMPLITUDES: &str = "amplitudes.csv";

/// A JSON number holding `v` verbatim at 17 significant digits; non-finite
/// values become `null`.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    Number::from_str(&fmt17(v))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn config_json(config: &LcdscConfig, input: Option<&str>) -> Value {
    let emd = &config.emd;
    let mut penalty = Map::new();
    penalty.insert("kind".into(), json!(config.penalty.name()));
    if let PenaltyKind::Aic { beta } = config.penalty {
        penalty.insert("beta".into(), num(beta));
    }
    json!({
        "input": input,
        "seed": emd.seed,
        "ensemble": emd.ensemble_size,
        "noise": num(emd.noise_amplitude),
        "s_number": emd.s_number,
        "max_sift": emd.max_sift_iters,
        "max_imfs": emd.max_imfs,
        "penalty": Value::Object(penalty),
        "min_seg": config.min_seg_len,
        "spacing_periods": num(config.spacing_periods),
        "min_seg_effective": config.min_seg_effective,
        "gamma": num(config.gamma),
        "alpha": num(config.alpha),
        "include_residual": config.include_residual,
    })
}

/// The report as a JSON value.
pub fn report_json(report: &CleaningReport, input: Option<&str>) -> Value {
    let changepoints: Vec<Value> = report
        .decomposition
        .imfs
        .iter()
        .zip(&report.changepoints)
        .map(|(imf, cps)| {
            json!({
                "imf": imf.index,
                "taus": cps.taus,
                "spacing": num(cps.spacing),
                "min_seg": cps.min_seg_len,
                "cost": num(cps.total_cost),
            })
        })
        .collect();
    let segments: Vec<Value> = report
        .decisions
        .iter()
        .map(|d| {
            let t = &d.test;
            json!({
                "imf": t.imf_index,
                "start": t.seg_start,
                "end": t.seg_end,
                "s2": [opt_num(t.s2_before), num(t.s2_during), opt_num(t.s2_after)],
                "f_stat": num(t.f_stat),
                "p": num(t.p_value),
                "holm_threshold": num(d.holm_threshold),
                "significant": d.significant,
            })
        })
        .collect();
    json!({
        "config": config_json(&report.config, input),
        "changepoints": changepoints,
        "segments": segments,
        "eta": report.significant_imfs,
        "notes": report.notes,
        "files": {
            "cleaned": CLEANED,
            "cleaned_imfs": CLEANED_IMFS,
            "changepoints": CHANGEPOINTS,
            "imfs": IMFS,
            "amplitudes": AMPLITUDES,
        },
    })
}

pub fn to_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("a Value always serializes");
    s.push('\n');
    s
}
