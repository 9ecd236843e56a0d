//! Input parsing and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::CliError;
use crate::emd::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// `t,value` rows, header optional.
    Csv,
    /// One value per line, `dt = 1`.
    Plain,
}

impl InputFormat {
    /// `.csv` files are CSV, anything else is plain.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Plain,
        }
    }
}

impl std::str::FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(InputFormat::Csv),
            "plain" => Ok(InputFormat::Plain),
            other => Err(format!("unknown input format '{other}' (expected csv or plain)")),
        }
    }
}

/// Reads a series from `path`.
pub fn ingest(path: &Path, format: InputFormat) -> Result<TimeSeries, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    match format {
        InputFormat::Plain => parse_plain(&text),
        InputFormat::Csv => parse_csv(&text),
    }
    .map_err(|e| CliError::data(format!("{}: {}", path.display(), e.message)))
}

pub fn parse_plain(text: &str) -> Result<TimeSeries, CliError> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::data(format!("line {}: '{line}' is not a number", lineno + 1)))?;
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(CliError::data("empty input"));
    }
    Ok(TimeSeries::new(samples))
}

/// Relative tolerance on the spacing of the `t` column.
const SPACING_TOL: f64 = 1e-6;

pub fn parse_csv(text: &str) -> Result<TimeSeries, CliError> {
    let mut times = Vec::new();
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::data(format!(
                "line {}: expected 2 columns (t,value), found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parsed = (fields[0].parse::<f64>(), fields[1].parse::<f64>());
        match parsed {
            (Ok(t), Ok(v)) => {
                times.push(t);
                samples.push(v);
                rows.push(lineno + 1);
            }
            // a non-numeric first line is a header
            _ if times.is_empty() && rows.is_empty() && lineno == first_content_line(text) => {}
            _ => {
                return Err(CliError::data(format!(
                    "line {}: '{line}' is not a numeric t,value pair",
                    lineno + 1
                )))
            }
        }
    }
    if samples.is_empty() {
        return Err(CliError::data("empty input"));
    }
    let dt = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::data(format!(
            "line {}: t must increase",
            rows.get(1).copied().unwrap_or(rows[0])
        )));
    }
    for k in 2..times.len() {
        let step = times[k] - times[k - 1];
        if (step - dt).abs() > SPACING_TOL * dt {
            return Err(CliError::data(format!(
                "line {}: t is not uniformly spaced (step {step} vs {dt})",
                rows[k]
            )));
        }
    }
    Ok(TimeSeries::with_dt(samples, dt))
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| !l.trim().is_empty())
        .unwrap_or(0)
}

/// Shortest-round-trip formatting is not used: every float is written with
/// exactly 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A `t` column followed by one column per row of `columns`.
pub fn matrix_csv(dt: f64, names: &[String], columns: &[&[f64]]) -> String {
    let n = columns.first().map_or(0, |c| c.len());
    let mut out = String::from("t");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&fmt17(i as f64 * dt));
        for col in columns {
            out.push(',');
            out.push_str(&fmt17(col[i]));
        }
        out.push('\n');
    }
    out
}

pub fn series_csv(dt: f64, values: &[f64]) -> String {
    matrix_csv(dt, &["value".to_string()], &[values])
}

pub fn changepoints_csv(per_imf: &[(usize, Vec<usize>)]) -> String {
    let mut out = String::from("imf,tau\n");
    for (imf, taus) in per_imf {
        for tau in taus {
            let _ = writeln!(out, "{imf},{tau}");
        }
    }
    out
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::data(format!("cannot write {}: {e}", path.display()))
    })
}
