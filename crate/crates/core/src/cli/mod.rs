//! Command-line frontend.
//!
//! ```text
//! lcdsc decompose <in> --out-dir D [--amplitudes]
//! lcdsc clean <in> --out-dir D [--gamma g] [--alpha a] [--penalty p] [--seed s]
//! lcdsc sweep-gamma <in> --gammas 1,2,4 --out-dir D
//! lcdsc simulate doppler|chirp|double --out D
//! lcdsc bench --grid default|<file> --methods lcdsc,wht --replicates R --seed s --out F
//! ```
//!
//! Every command accepts `--config <file>` with `key = value` lines named
//! after its long flags. Exit codes: 0 success, 1 usage error, 2 data error,
//! 3 numerical failure.

pub mod config;
pub mod io;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::changepoint::PenaltyKind;
use crate::cleaning::{gamma_sweep, lcdsc_clean, CleaningReport, LcdscConfig};
use crate::emd::{eemd, Decomposition, EmdConfig, TimeSeries};
use crate::error::Error;
use crate::simulation::{
    bench_csv, chirp, default_grid, double_doppler, local_doppler, parse_methods, run_benchmark,
    Interval, LocalSignalSpec, Method, Scenario,
};
use crate::spectral::instantaneous_amplitude;
use io::{ingest, matrix_csv, series_csv, write_atomic, InputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// A failure with its exit code and one-line message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::TooShort { .. } | Error::InvalidSamples(_) | Error::LengthMismatch { .. } => {
                EXIT_DATA
            }
            Error::MonotonicComponent
            | Error::DegenerateSignal(_)
            | Error::SegmentTooShort { .. }
            | Error::SubsetExplosion(_) => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lcdsc", version, about = "Local change point detection and signal cleaning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// EEMD of a series into imfs.csv (and amplitudes.csv).
    #[command(args_override_self = true)]
    Decompose(DecomposeArgs),
    /// Full cleaning pipeline.
    #[command(args_override_self = true)]
    Clean(CleanArgs),
    /// One cleaning run per gamma, sharing the decomposition.
    #[command(name = "sweep-gamma", args_override_self = true)]
    SweepGamma(SweepArgs),
    /// Synthetic test signals.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Method comparison over a grid of simulated settings.
    #[command(args_override_self = true)]
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Input series (`t,value` CSV or one value per line).
    pub input: Option<PathBuf>,
    /// csv or plain; inferred from the extension when omitted.
    #[arg(long)]
    pub format: Option<InputFormat>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EmdArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// EEMD trials; 1 with `--noise 0` is plain EMD.
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    /// Added noise sd as a fraction of the input sd.
    #[arg(long, default_value_t = 0.2)]
    pub noise: f64,
    #[arg(long, default_value_t = 4)]
    pub s_number: usize,
    #[arg(long, default_value_t = 50)]
    pub max_sift: usize,
    #[arg(long)]
    pub max_imfs: Option<usize>,
}

impl EmdArgs {
    fn to_config(&self) -> EmdConfig {
        EmdConfig {
            s_number: self.s_number,
            max_sift_iters: self.max_sift,
            max_imfs: self.max_imfs,
            ensemble_size: self.ensemble,
            noise_amplitude: self.noise,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyName {
    Aic,
    Bic,
    Mbic,
}

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    #[arg(long, value_enum, default_value_t = PenaltyName::Mbic)]
    pub penalty: PenaltyName,
    /// Per-change cost for the AIC penalty.
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10)]
    pub min_seg: usize,
    #[arg(long, default_value_t = 2.0)]
    pub spacing_periods: f64,
    #[arg(long, default_value_t = 4)]
    pub min_seg_effective: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Add the EEMD residual to the cleaned signal.
    #[arg(long)]
    pub include_residual: bool,
}

impl DetectArgs {
    fn to_config(&self, emd: EmdConfig, gamma: f64) -> LcdscConfig {
        let penalty = match self.penalty {
            PenaltyName::Aic => PenaltyKind::Aic { beta: self.beta },
            PenaltyName::Bic => PenaltyKind::Bic,
            PenaltyName::Mbic => PenaltyKind::Mbic,
        };
        LcdscConfig {
            emd,
            penalty,
            min_seg_len: self.min_seg,
            spacing_periods: self.spacing_periods,
            min_seg_effective: self.min_seg_effective,
            gamma,
            alpha: self.alpha,
            include_residual: self.include_residual,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub emd: EmdArgs,
    /// Also write amplitudes.csv.
    #[arg(long)]
    pub amplitudes: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CleanArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub emd: EmdArgs,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub emd: EmdArgs,
    #[command(flatten)]
    pub detect: DetectArgs,
    /// Comma-separated gamma values.
    #[arg(long, default_value = "1,1.5,2,3,4")]
    pub gammas: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignalKind {
    /// Doppler on a window of a noise recording.
    Doppler,
    /// Linear chirp.
    Chirp,
    /// Two Dopplers separated by a noise gap.
    Double,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub kind: Option<SignalKind>,
    /// Output directory for noisy.csv and truth.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 2500)]
    pub length: usize,
    /// First active sample (doppler); defaults to the middle fifth.
    #[arg(long)]
    pub start: Option<usize>,
    /// Last active sample (doppler, inclusive).
    #[arg(long)]
    pub end: Option<usize>,
    /// Locality ratio of a centered window (doppler).
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, default_value_t = 0.005)]
    pub f0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub f1: f64,
    /// Gap between the two Dopplers (double).
    #[arg(long, default_value_t = 500)]
    pub delta: usize,
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// `default` for the built-in grid, or a file of scenario lines.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value = "lcdsc,khigh,llow,band,powerset,wht,wit,none")]
    pub methods: String,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall time in the seconds column (otherwise 0).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub emd: EmdArgs,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Runs the CLI and returns the process exit code. Errors are reported as
/// one line on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match parse(&args).and_then(|cli| {
        configure_threads()?;
        run(cli)
    }) {
        Ok(()) => EXIT_OK,
        Err(e) if e.code == EXIT_OK => {
            print!("{}", e.message);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("lcdsc: {}", e.message.lines().next().unwrap_or("error"));
            e.code
        }
    }
}

fn clap_error(e: clap::Error) -> CliError {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp
        | ErrorKind::DisplayVersion
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError {
            code: EXIT_OK,
            message: e.render().to_string(),
        },
        _ => {
            let text = e.render().to_string();
            let line = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("usage error")
                .trim_start_matches("error: ")
                .to_string();
            CliError::usage(line)
        }
    }
}

/// Parses argv, folding in `--config` entries ahead of the explicit flags.
pub fn parse(args: &[OsString]) -> Result<Cli, CliError> {
    let cmd = Cli::command();
    let matches = cmd.clone().try_get_matches_from(args).map_err(clap_error)?;
    let Some((name, sub)) = matches.subcommand() else {
        return Err(CliError::usage("missing subcommand"));
    };
    let Some(config_path) = sub.get_one::<PathBuf>("config").cloned() else {
        return Cli::from_arg_matches(&matches).map_err(clap_error);
    };
    let entries = config::load(&config_path)?;

    let sub_cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
    let mut flags = Vec::new();
    let mut switches = Vec::new();
    let mut positional = None;
    for arg in sub_cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "config" || id == "help" {
            continue;
        }
        match arg.get_long() {
            Some(long) if matches!(arg.get_action(), ArgAction::SetTrue) => {
                switches.push(long.to_string())
            }
            Some(long) => flags.push(long.to_string()),
            None if arg.is_positional() => {
                let given = sub.contains_id(id)
                    && sub.value_source(id) == Some(clap::parser::ValueSource::CommandLine);
                positional = Some((id.to_string(), given));
            }
            None => {}
        }
    }
    let extra = config::to_args(
        &entries,
        &flags,
        &switches,
        positional.as_ref().map(|(id, given)| (id.as_str(), *given)),
    )?;

    // argv[1] is the subcommand: there are no global options
    let mut merged: Vec<OsString> = args[..2].to_vec();
    merged.extend(extra.into_iter().map(OsString::from));
    merged.extend(args[2..].iter().cloned());
    let matches = cmd.try_get_matches_from(merged).map_err(clap_error)?;
    Cli::from_arg_matches(&matches).map_err(clap_error)
}

/// `LCDSC_THREADS` caps the worker pool; 0 or unset leaves it automatic.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LCDSC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("LCDSC_THREADS must be a count, got '{raw}'")))?;
    if n > 0 {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decompose(a) => decompose(&a),
        Command::Clean(a) => clean(&a),
        Command::SweepGamma(a) => sweep(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn read_input(io: &InputArgs) -> Result<(TimeSeries, PathBuf, PathBuf), CliError> {
    let input = io
        .input
        .clone()
        .ok_or_else(|| CliError::usage("missing input file"))?;
    let out_dir = io
        .out_dir
        .clone()
        .ok_or_else(|| CliError::usage("missing --out-dir"))?;
    let format = io.format.unwrap_or_else(|| InputFormat::infer(&input));
    let series = ingest(&input, format)?;
    Ok((series, input, out_dir))
}

fn imf_names(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("imf{k}")).collect()
}

fn write_imfs(dir: &Path, dt: f64, d: &Decomposition) -> Result<(), CliError> {
    let mut names = imf_names(d.num_imfs());
    names.push("residual".to_string());
    let mut cols: Vec<&[f64]> = d.imfs.iter().map(|i| i.samples.as_slice()).collect();
    cols.push(&d.residual);
    write_atomic(&dir.join(report::IMFS), &matrix_csv(dt, &names, &cols))
}

fn write_amplitudes(dir: &Path, dt: f64, amplitudes: &[Vec<f64>]) -> Result<(), CliError> {
    let cols: Vec<&[f64]> = amplitudes.iter().map(Vec::as_slice).collect();
    write_atomic(
        &dir.join(report::AMPLITUDES),
        &matrix_csv(dt, &imf_names(amplitudes.len()), &cols),
    )
}

fn decompose(a: &DecomposeArgs) -> Result<(), CliError> {
    let (series, _, out_dir) = read_input(&a.io)?;
    let d = eemd(&series, &a.emd.to_config())?;
    write_imfs(&out_dir, series.dt, &d)?;
    if a.amplitudes {
        let amps = d
            .imfs
            .iter()
            .map(|imf| instantaneous_amplitude(&imf.samples))
            .collect::<crate::Result<Vec<_>>>()?;
        write_amplitudes(&out_dir, series.dt, &amps)?;
    }
    Ok(())
}

fn write_report(
    dir: &Path,
    dt: f64,
    r: &CleaningReport,
    input: &Path,
) -> Result<(), CliError> {
    write_imfs(dir, dt, &r.decomposition)?;
    write_amplitudes(dir, dt, &r.amplitudes)?;
    let cols: Vec<&[f64]> = r.cleaned_imfs.iter().map(Vec::as_slice).collect();
    write_atomic(
        &dir.join(report::CLEANED_IMFS),
        &matrix_csv(dt, &imf_names(cols.len()), &cols),
    )?;
    write_atomic(&dir.join(report::CLEANED), &series_csv(dt, &r.cleaned_signal))?;
    let per_imf: Vec<(usize, Vec<usize>)> = r
        .decomposition
        .imfs
        .iter()
        .zip(&r.changepoints)
        .map(|(imf, c)| (imf.index, c.taus.clone()))
        .collect();
    write_atomic(&dir.join(report::CHANGEPOINTS), &io::changepoints_csv(&per_imf))?;
    let input = input.to_string_lossy();
    let json = report::report_json(r, Some(&input));
    write_atomic(&dir.join("report.json"), &report::to_text(&json))
}

fn clean(a: &CleanArgs) -> Result<(), CliError> {
    let config = a.detect.to_config(a.emd.to_config(), a.gamma);
    config.validate()?;
    let (series, input, out_dir) = read_input(&a.io)?;
    let r = lcdsc_clean(&series, &config)?;
    write_report(&out_dir, series.dt, &r, &input)
}

/// Parses a comma-separated list of gamma values.
pub fn parse_gammas(list: &str) -> Result<Vec<f64>, CliError> {
    let gammas = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::usage(format!("'{s}' is not a gamma value")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if gammas.is_empty() {
        return Err(CliError::usage("--gammas is empty"));
    }
    Ok(gammas)
}

/// Subdirectory name for one gamma, e.g. `gamma_1.5`.
pub fn gamma_dir(gamma: f64) -> String {
    format!("gamma_{gamma}")
}

fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    let gammas = parse_gammas(&a.gammas)?;
    let config = a.detect.to_config(a.emd.to_config(), gammas[0]);
    config.validate()?;
    let (series, input, out_dir) = read_input(&a.io)?;
    let reports = gamma_sweep(&series, &gammas, &config)?;
    for (g, r) in gammas.iter().zip(&reports) {
        write_report(&out_dir.join(gamma_dir(*g)), series.dt, r, &input)?;
    }
    Ok(())
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let kind = a
        .kind
        .ok_or_else(|| CliError::usage("missing signal kind (doppler, chirp or double)"))?;
    let out = a.out.clone().ok_or_else(|| CliError::usage("missing --out"))?;
    let (noisy, truth) = match kind {
        SignalKind::Doppler => {
            let spec = match (a.start, a.end, a.ratio) {
                (Some(start), Some(end), None) => {
                    if !(start < end && end < a.length) {
                        return Err(CliError::usage("need start < end < length"));
                    }
                    LocalSignalSpec {
                        total_len: a.length,
                        active: Interval::new(start, end),
                        noise_sigma: a.sigma,
                        seed: a.seed,
                    }
                }
                (None, None, Some(ratio)) => {
                    LocalSignalSpec::with_locality(a.length, ratio, a.sigma, a.seed)?
                }
                (None, None, None) => LocalSignalSpec::centered(a.length, a.sigma, a.seed),
                _ => {
                    return Err(CliError::usage(
                        "give either --start and --end, or --ratio, not both",
                    ))
                }
            };
            let s = local_doppler(&spec)?;
            (s.noisy.samples, s.truth)
        }
        SignalKind::Chirp => {
            let noisy = chirp(a.length, a.f0, a.f1, a.sigma, a.seed)?;
            let truth = chirp(a.length, a.f0, a.f1, 0.0, a.seed)?;
            (noisy.samples, truth.samples)
        }
        SignalKind::Double => {
            let s = double_doppler(a.delta, a.sigma, a.seed)?;
            (s.noisy.samples, s.truth)
        }
    };
    write_atomic(&out.join("noisy.csv"), &series_csv(1.0, &noisy))?;
    write_atomic(&out.join("truth.csv"), &series_csv(1.0, &truth))
}

/// Scenario lines: `centered T sigma`, `locality T sigma ratio` or
/// `gap delta sigma`; `#` starts a comment.
pub fn parse_grid(text: &str) -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || CliError::usage(format!("grid line {}: cannot parse '{line}'", lineno + 1));
        let f: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let real = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let scenario = match f.as_slice() {
            ["centered", t, s] => Scenario::Centered {
                total_len: int(t)?,
                sigma: real(s)?,
            },
            ["locality", t, s, r] => Scenario::Locality {
                total_len: int(t)?,
                sigma: real(s)?,
                ratio: real(r)?,
            },
            ["gap", d, s] => Scenario::Gap {
                delta: int(d)?,
                sigma: real(s)?,
            },
            _ => return Err(bad()),
        };
        out.push(scenario);
    }
    if out.is_empty() {
        return Err(CliError::usage("grid has no scenarios"));
    }
    Ok(out)
}

fn bench(a: &BenchArgs) -> Result<(), CliError> {
    let out = a.out.clone().ok_or_else(|| CliError::usage("missing --out"))?;
    let methods: Vec<Method> = parse_methods(&a.methods)?;
    let grid = if a.grid == "default" {
        default_grid()
    } else {
        let text = std::fs::read_to_string(&a.grid)
            .map_err(|e| CliError::usage(format!("cannot read grid {}: {e}", a.grid)))?;
        parse_grid(&text)?
    };
    let config = a.detect.to_config(a.emd.to_config(), a.gamma);
    let rows = run_benchmark(&methods, &grid, a.replicates, a.emd.seed, &config)?;
    write_atomic(&out, &bench_csv(&rows, a.timing))
}
