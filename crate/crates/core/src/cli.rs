//! Command-line front end: `validate`, `run`, `sweep` and `plot`.
//!
//! Exit status is 0 on success, 1 when the scenario is invalid or a run
//! fails, and 2 for usage and file-system errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{expand_sweep, parse_scenario, validate, MapSource, ScenarioConfig};
use crate::engine::{run, EngineError, EventLog};
use crate::reports::{
    format_float, read_csv, render_bar_chart, write_csv, MetricsSummary, ReportError, ResultRow, CHART_METRICS,
};

pub const THREADS_ENV: &str = "DTNSIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "dtnsim", version, about = "Delay-tolerant network simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file and list every problem found.
    Validate {
        config: PathBuf,
    },
    /// Simulate one scenario with one seed.
    Run(RunArgs),
    /// Simulate every protocol x buffer x seed combination.
    Sweep(SweepArgs),
    /// Redraw the charts from an existing results table.
    Plot {
        csv: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub config: PathBuf,
    /// Defaults to the scenario's own seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Also write the full event log to `events.tsv`.
    #[arg(long)]
    pub events: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Comma-separated buffer sizes, e.g. `5M,10M,15M,20M`.
    #[arg(long)]
    pub buffers: String,
    /// Comma-separated protocols, e.g. `epidemic,spray-and-wait`.
    #[arg(long, default_value = "epidemic,spray-and-wait")]
    pub protocols: String,
    /// Comma-separated seeds.
    #[arg(long, default_value = "1")]
    pub seeds: String,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Also write one event log per run under `events/`.
    #[arg(long)]
    pub events: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Report(ReportError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Report(ReportError::Io(_)) => 2,
            CliError::Invalid(_) | CliError::Engine(_) | CliError::Report(_) => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn report_err(path: &Path) -> impl FnOnce(ReportError) -> CliError + '_ {
    move |e| match e {
        ReportError::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Report(other),
    }
}

/// Read, parse and validate a scenario. Relative map paths are taken
/// relative to the scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut cfg = parse_scenario(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    if let MapSource::File(map) = &mut cfg.map_source {
        if map.is_relative() {
            if let Some(dir) = path.parent() {
                *map = dir.join(&*map);
            }
        }
    }
    let findings = validate(&cfg);
    if !findings.is_empty() {
        let lines: Vec<String> = findings.iter().map(|f| f.to_string()).collect();
        return Err(CliError::Invalid(lines.join("\n")));
    }
    Ok(cfg)
}

fn split_list(raw: &str, flag: &str) -> Result<Vec<String>, CliError> {
    let items: Vec<String> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    if items.is_empty() {
        return Err(CliError::Usage(format!("--{flag} needs at least one value")));
    }
    Ok(items)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_log(log: &EventLog, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    log.write_tsv(BufWriter::new(file)).map_err(io_err(path))
}

pub fn metrics_text(m: &MetricsSummary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "delivery_probability\t{}", format_float(m.delivery_probability));
    let _ = writeln!(s, "latency_avg_s\t{}", format_float(m.latency_avg));
    let _ = writeln!(s, "overhead_ratio\t{}", format_float(m.overhead_ratio));
    let _ = writeln!(s, "hopcount_avg\t{}", format_float(m.hopcount_avg));
    let _ = writeln!(s, "dropped\t{}", m.dropped);
    s
}

pub fn cmd_validate(config: &Path) -> Result<(), CliError> {
    load_config(config).map(|_| ())
}

pub fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let (log, metrics) = run(&cfg, seed)?;
    create_dir(&args.out)?;
    let row = ResultRow {
        protocol: cfg.router.protocol,
        buffer_bytes: cfg.buffer_bytes,
        seed,
        metrics,
    };
    let csv_path = args.out.join("metrics.csv");
    write_csv(std::slice::from_ref(&row), &csv_path).map_err(report_err(&csv_path))?;
    if args.events {
        write_log(&log, &args.out.join("events.tsv"))?;
    }
    stdout
        .write_all(metrics_text(&row.metrics).as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

/// Write the five charts for `csv` into `out`; returns the files written.
fn render_charts(csv: &Path, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rows = read_csv(csv).map_err(report_err(csv))?;
    let mut written = Vec::new();
    for metric in CHART_METRICS {
        let svg = render_bar_chart(metric.name(), &rows).map_err(report_err(csv))?;
        let path = out.join(format!("{}.svg", metric.name()));
        fs::write(&path, svg).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn as_refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn run_label(row: &ResultRow) -> String {
    format!("{}_{}_{}", row.protocol.as_str(), row.buffer_bytes, row.seed)
}

pub fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let buffers = split_list(&args.buffers, "buffers")?;
    let protocols = split_list(&args.protocols, "protocols")?;
    let seeds: Vec<u64> = split_list(&args.seeds, "seeds")?
        .iter()
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad seed `{s}`"))))
        .collect::<Result<_, _>>()?;

    let by_protocol =
        expand_sweep(&cfg, "router.protocol", &as_refs(&protocols)).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut jobs = Vec::new();
    for pc in &by_protocol {
        for bc in expand_sweep(pc, "bufferSize", &as_refs(&buffers)).map_err(|e| CliError::Usage(e.to_string()))? {
            let findings = validate(&bc);
            if !findings.is_empty() {
                let lines: Vec<String> = findings.iter().map(|f| f.to_string()).collect();
                return Err(CliError::Invalid(lines.join("\n")));
            }
            for &seed in &seeds {
                jobs.push((bc.clone(), seed));
            }
        }
    }

    create_dir(&args.out)?;
    let events_dir = args.out.join("events");
    if args.events {
        create_dir(&events_dir)?;
    }
    let pool = thread_pool()?;
    let results: Vec<Result<(ResultRow, Option<EventLog>), EngineError>> = pool.install(|| {
        jobs.par_iter()
            .map(|(c, seed)| {
                let (log, metrics) = run(c, *seed)?;
                let row = ResultRow {
                    protocol: c.router.protocol,
                    buffer_bytes: c.buffer_bytes,
                    seed: *seed,
                    metrics,
                };
                Ok((row, args.events.then_some(log)))
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut artifacts = Vec::new();
    for r in results {
        let (row, log) = r?;
        if let Some(log) = log {
            let path = events_dir.join(format!("{}.tsv", run_label(&row)));
            write_log(&log, &path)?;
            artifacts.push(path);
        }
        rows.push(row);
    }

    let csv_path = args.out.join("results.csv");
    write_csv(&rows, &csv_path).map_err(report_err(&csv_path))?;
    let charts = render_charts(&csv_path, &args.out)?;

    let mut manifest = String::new();
    let _ = writeln!(manifest, "config\t{}", args.config.display());
    let _ = writeln!(manifest, "seeds\t{}", args.seeds);
    let _ = writeln!(manifest, "runs\t{}", rows.len());
    let _ = writeln!(manifest, "table\t{}", csv_path.display());
    for c in &charts {
        let _ = writeln!(manifest, "chart\t{}", c.display());
    }
    artifacts.sort();
    for a in &artifacts {
        let _ = writeln!(manifest, "events\t{}", a.display());
    }
    let manifest_path = args.out.join("manifest.txt");
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    writeln!(stdout, "{} runs, results in {}", rows.len(), args.out.display())
        .map_err(io_err(Path::new("<stdout>")))
}

pub fn cmd_plot(csv: &Path, out: &Path) -> Result<(), CliError> {
    create_dir(out)?;
    render_charts(csv, out).map(|_| ())
}

/// Run a parsed command line; returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    let mut stdout = io::stdout().lock();
    let result = match &cli.command {
        Command::Validate { config } => cmd_validate(config),
        Command::Run(args) => cmd_run(args, &mut stdout),
        Command::Sweep(args) => cmd_sweep(args, &mut stdout),
        Command::Plot { csv, out } => cmd_plot(csv, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
