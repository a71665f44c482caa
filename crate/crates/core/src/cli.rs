//! Command-line driver: fit one or many profile files, one file per worker.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use crate::fitcore::{apply_exponent, find_solution, FitError, FitOptions};
use crate::profile_io::{
    read_profile, write_plot_data, write_profile, write_report, CsvLayout, FitReport, IoError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CLAMPED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "profilefit",
    version,
    about = "Fit availability profiles to a target capacity factor"
)]
pub struct Args {
    /// Input CSV file or glob pattern; repeatable
    #[arg(short = 'i', long = "input", value_name = "PATH", required = true)]
    pub inputs: Vec<String>,

    /// Target capacity factor in (0, 1) for every input
    #[arg(short = 't', long)]
    pub target: Option<f64>,

    /// CSV with columns path,target; entries override --target
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,

    /// Name of the value column
    #[arg(long, default_value = "electricity")]
    pub column: String,

    /// Metadata lines before the header row
    #[arg(long, default_value_t = 3)]
    pub preamble_lines: usize,

    /// Field delimiter
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Output directory
    #[arg(short = 'o', long, default_value = ".")]
    pub out_dir: PathBuf,

    /// Also write chronological and sorted plot data
    #[arg(long)]
    pub plot_data: bool,

    /// Exit 0 even when a fit had to be clamped
    #[arg(long)]
    pub allow_clamp: bool,

    /// Worker threads [default: available processors]
    #[arg(short = 'j', long, env = "PROFILEFIT_JOBS")]
    pub jobs: Option<usize>,

    #[arg(long, default_value_t = crate::fitcore::DEFAULT_RESIDUAL_TOL)]
    pub residual_tol: f64,

    /// Exponent used when the target is at or below the share of 1.0 values
    #[arg(long, default_value_t = crate::fitcore::DEFAULT_LARGE_EXPONENT)]
    pub large_exponent: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("pattern {0:?} matched no files")]
    NoMatch(String),
    #[error("no target for {0}: not in manifest and no --target given")]
    ManifestMissingEntry(String),
    #[error("target {value} for {path} is not in (0, 1)")]
    TargetOutOfRange { path: String, value: f64 },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("inputs {0} and {1} would write to the same output files")]
    OutputCollision(String, String),
}

/// Fully resolved configuration for a batch run.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub inputs: Vec<PathBuf>,
    pub target: Option<f64>,
    pub manifest: Option<PathBuf>,
    pub layout: CsvLayout,
    pub out_dir: PathBuf,
    pub emit_plot_data: bool,
    pub allow_clamp: bool,
    pub jobs: usize,
    pub options: FitOptions,
}

fn is_pattern(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

fn expand_inputs(raw: &[String]) -> Result<Vec<PathBuf>, CliError> {
    let mut inputs = Vec::new();
    for entry in raw {
        if !is_pattern(entry) {
            inputs.push(PathBuf::from(entry));
            continue;
        }
        let paths = glob::glob(entry)
            .map_err(|e| CliError::Usage(format!("bad pattern {entry:?}: {e}")))?;
        let mut matched: Vec<PathBuf> = paths.filter_map(Result::ok).collect();
        if matched.is_empty() {
            return Err(CliError::NoMatch(entry.clone()));
        }
        matched.sort();
        inputs.extend(matched);
    }
    Ok(inputs)
}

impl CliConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        if args.target.is_none() && args.manifest.is_none() {
            return Err(CliError::Usage(
                "one of --target or --manifest is required".into(),
            ));
        }
        if !args.delimiter.is_ascii() {
            return Err(CliError::Usage(
                "--delimiter must be a single ASCII character".into(),
            ));
        }
        if args.column.is_empty() {
            return Err(CliError::Usage("--column must not be empty".into()));
        }
        let jobs = match args.jobs {
            Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
            Some(j) => j,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let options = FitOptions {
            residual_tol: args.residual_tol,
            large_exponent: args.large_exponent,
            ..FitOptions::default()
        };
        options
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;

        Ok(Self {
            inputs: expand_inputs(&args.inputs)?,
            target: args.target,
            manifest: args.manifest,
            layout: CsvLayout {
                preamble_lines: args.preamble_lines,
                value_column: args.column,
                time_column: Some("time".to_string()),
                delimiter: args.delimiter as u8,
            },
            out_dir: args.out_dir,
            emit_plot_data: args.plot_data,
            allow_clamp: args.allow_clamp,
            jobs,
            options,
        })
    }
}

fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, f64)>, CliError> {
    let err = |message: String| CliError::Manifest {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| err(format!("missing column {name:?}")))
    };
    let (path_idx, target_idx) = (column("path")?, column("target")?);
    let base = path.parent().unwrap_or(Path::new(""));

    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.to_string()))?;
        let entry = record.get(path_idx).unwrap_or("");
        let raw = record.get(target_idx).unwrap_or("");
        let target: f64 = raw
            .parse()
            .map_err(|_| err(format!("cannot parse target {raw:?} for {entry}")))?;
        let entry = PathBuf::from(entry);
        let resolved = if entry.is_relative() {
            base.join(&entry)
        } else {
            entry
        };
        entries.push((resolved, target));
    }
    Ok(entries)
}

/// Canonical form used to match inputs against manifest rows.
fn path_key(path: &Path) -> PathBuf {
    std::fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

/// Maps every input to its target mean, in input order.
///
/// Manifest paths are resolved relative to the manifest's directory and
/// compared after canonicalization.
pub fn resolve_targets(config: &CliConfig) -> Result<Vec<(PathBuf, f64)>, CliError> {
    let manifest: HashMap<PathBuf, f64> = match &config.manifest {
        Some(path) => read_manifest(path)?
            .into_iter()
            .map(|(p, t)| (path_key(&p), t))
            .collect(),
        None => HashMap::new(),
    };
    config
        .inputs
        .iter()
        .map(|input| {
            let display = input.display().to_string();
            let target = manifest
                .get(&path_key(input))
                .copied()
                .or(config.target)
                .ok_or_else(|| CliError::ManifestMissingEntry(display.clone()))?;
            if !(target > 0.0 && target < 1.0) {
                return Err(CliError::TargetOutOfRange {
                    path: display,
                    value: target,
                });
            }
            Ok((input.clone(), target))
        })
        .collect()
}

fn output_stem(input: &Path) -> String {
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "profile".to_string())
}

fn check_collisions(inputs: &[PathBuf]) -> Result<(), CliError> {
    // The same file listed twice is also a collision.
    let mut seen: HashMap<String, &Path> = HashMap::new();
    for input in inputs {
        let stem = output_stem(input);
        if let Some(prev) = seen.get(&stem) {
            return Err(CliError::OutputCollision(
                prev.display().to_string(),
                input.display().to_string(),
            ));
        }
        seen.insert(stem, input);
    }
    Ok(())
}

#[derive(Debug, Error)]
enum TaskError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Result of one file's pipeline.
#[derive(Debug)]
pub struct TaskSummary {
    pub input: PathBuf,
    pub outcome: Result<FitReport, String>,
}

impl TaskSummary {
    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(r) => format!(
                "{} current_cf={:.6} target={} exponent={:.10} achieved={:.10} status={}",
                self.input.display(),
                r.current_cf,
                r.target_cf,
                r.exponent,
                r.achieved_cf,
                r.status.as_str()
            ),
            Err(message) => format!("{} error: {}", self.input.display(), message),
        }
    }
}

fn process_one(input: &Path, target: f64, config: &CliConfig) -> Result<FitReport, TaskError> {
    let data = read_profile(input, &config.layout)?;
    let start = Instant::now();
    let outcome = find_solution(&data.profile, target, &config.options)?;
    let fitted = apply_exponent(&data.profile, outcome.exponent);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let stem = output_stem(input);
    let fitted_path = config.out_dir.join(format!("{stem}_fitted.csv"));
    write_profile(
        &fitted_path,
        data.timestamps.as_deref(),
        &data.profile,
        &fitted,
        &config.layout,
    )?;
    let report = FitReport::new(input.display().to_string(), target, &outcome, elapsed_ms);
    write_report(&config.out_dir.join(format!("{stem}_report.json")), &report)?;
    if config.emit_plot_data {
        write_plot_data(&config.out_dir.join(&stem), &data.profile, &fitted)?;
    }
    Ok(report)
}

/// Runs every file through read → fit → write and returns the summaries in
/// input order.
pub fn run_batch(config: &CliConfig, tasks: &[(PathBuf, f64)]) -> Vec<TaskSummary> {
    use rayon::prelude::*;

    let run = || {
        tasks
            .par_iter()
            .map(|(input, target)| TaskSummary {
                input: input.clone(),
                outcome: process_one(input, *target, config).map_err(|e| e.to_string()),
            })
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

/// Exit code for a finished batch: any error wins over any unpermitted clamp.
pub fn exit_code(summaries: &[TaskSummary], allow_clamp: bool) -> i32 {
    let mut code = EXIT_OK;
    for summary in summaries {
        match &summary.outcome {
            Err(_) => return EXIT_FAILURE,
            Ok(report) if report.status.is_clamped() && !allow_clamp => code = EXIT_CLAMPED,
            Ok(_) => {}
        }
    }
    code
}

/// Fits every configured input and prints one summary line per input.
pub fn run_fit(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let tasks =
        match resolve_targets(config).and_then(|t| check_collisions(&config.inputs).map(|_| t)) {
            Ok(tasks) => tasks,
            Err(e) => {
                let _ = writeln!(err, "profilefit: {e}");
                return EXIT_USAGE;
            }
        };
    if let Err(e) = std::fs::create_dir_all(&config.out_dir) {
        let _ = writeln!(
            err,
            "profilefit: cannot create {}: {e}",
            config.out_dir.display()
        );
        return EXIT_FAILURE;
    }

    let summaries = run_batch(config, &tasks);
    for summary in &summaries {
        let _ = writeln!(out, "{}", summary.line());
    }
    exit_code(&summaries, config.allow_clamp)
}

/// Parses `argv` and runs the fit, returning the process exit code.
pub fn main_with_args<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match CliConfig::from_args(args) {
        Ok(config) => run_fit(&config, out, err),
        Err(e) => {
            let _ = writeln!(
                err,
                "profilefit: {e}\n\nFor more information, try '--help'."
            );
            EXIT_USAGE
        }
    }
}
