//! `lrdtool` — packet captures in, Hurst-exponent reports out.
//!
//! Exit codes: 0 success, 1 data error (unreadable/degenerate input),
//! 2 usage error (bad flags; also used by the argument parser itself).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lrd_core::calibrate::{
    calibrate_grid, mean_abs_err, write_calibration_csv, CalibrationSpec,
};
use lrd_core::classify::RuleSet;
use lrd_core::hurst::Method;
use lrd_core::ingest::log::write_packet_log;
use lrd_core::ingest::Timestamp;
use lrd_core::pipeline::{
    load_inputs, run_analysis, AnalysisRun, AnalyzeConfig, InputFormat, MeasureSelection,
    PipelineError,
};
use lrd_core::series::{write_series_csv, BinnedSeries, Measure};
use lrd_core::synth::{gen_fgn, SynthSpec};

#[derive(Parser)]
#[command(
    name = "lrdtool",
    version,
    about = "Long-range-dependence analysis of packet traces",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse captures and emit the canonical packet log
    Ingest(IngestArgs),
    /// Classify, bin, estimate H and write the reports
    Analyze(AnalyzeArgs),
    /// Generate an exact fractional Gaussian noise series
    Synth(SynthArgs),
    /// Score every estimator against generated fGn
    Calibrate(CalibrateArgs),
    /// Re-render the text reports from a saved run record
    Report(ReportArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Capture files (pcap or canonical log)
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Input format; each file is sniffed by default
    #[arg(long, default_value = "auto")]
    format: InputFormat,
    /// Write the canonical log here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Capture files (pcap or canonical log)
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Classification rule file; built-in defaults when omitted
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Bin widths, e.g. 100ms,500ms,1s,10s
    #[arg(long, value_delimiter = ',', default_value = "100ms,500ms,1s,10s", value_parser = parse_interval)]
    intervals: Vec<u64>,
    /// Estimators: vt, rs, pgram, whittle
    #[arg(long, value_delimiter = ',', default_value = "vt,rs,pgram,whittle")]
    methods: Vec<Method>,
    /// Series to estimate on: bytes, packets or both
    #[arg(long, default_value = "both")]
    measure: MeasureSelection,
    /// Local-time offset from UTC in minutes, for hour windows and
    /// activity periods
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    tz_offset: i32,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Report files to write next to the run record
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Input format; each file is sniffed by default
    #[arg(long, default_value = "auto")]
    input_format: InputFormat,
}

#[derive(Args)]
struct SynthArgs {
    /// Hurst exponent, 0 < H < 1
    #[arg(long)]
    h: f64,
    /// Series length
    #[arg(long)]
    n: usize,
    /// RNG seed
    #[arg(long)]
    seed: u64,
    /// Marginal variance
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Write the series CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// True H values to generate at
    #[arg(long, value_delimiter = ',', default_value = "0.55,0.6,0.7,0.8,0.9")]
    h_grid: Vec<f64>,
    /// Replicates per H value
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Series length per replicate
    #[arg(long, default_value_t = 65536)]
    n: usize,
    /// Base RNG seed; every cell's seed derives from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Estimators to score
    #[arg(long, value_delimiter = ',', default_value = "vt,rs,pgram,whittle")]
    methods: Vec<Method>,
    /// Write the calibration CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run record written by `analyze`
    run: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv|json)")),
        }
    }
}

fn parse_interval(s: &str) -> Result<u64, String> {
    let (digits, scale) = if let Some(p) = s.strip_suffix("ms") {
        (p, 1)
    } else if let Some(p) = s.strip_suffix('s') {
        (p, 1000)
    } else {
        return Err(format!("interval {s:?} needs an ms or s suffix"));
    };
    let v: u64 = digits
        .parse()
        .map_err(|_| format!("bad interval {s:?}"))?;
    v.checked_mul(scale)
        .filter(|&ms| ms > 0)
        .ok_or_else(|| format!("interval {s:?} out of range"))
}

enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn data(err: impl std::fmt::Display) -> Failure {
        Failure::Data(err.to_string())
    }
}

fn write_target(path: Option<&PathBuf>, content: &[u8]) -> Result<(), Failure> {
    use std::io::Write;
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(content)
            .map_err(Failure::data),
    }
}

fn run_ingest(args: IngestArgs) -> Result<(), Failure> {
    let (records, stats) = load_inputs(&args.files, args.format).map_err(Failure::data)?;
    let mut buf = Vec::new();
    write_packet_log(&records, &mut buf).map_err(Failure::data)?;
    write_target(args.out.as_ref(), &buf)?;
    eprintln!(
        "parsed {} packets ({} bytes), skipped {} non-IP frames",
        stats.packets_parsed, stats.bytes_total, stats.packets_skipped_non_ip
    );
    if let (Some(first), Some(last)) = (stats.first_ts, stats.last_ts) {
        eprintln!("capture span {first} .. {last}");
    }
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let rules = match &args.rules {
        Some(path) => RuleSet::load(path)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => RuleSet::default_rules(),
    };
    let mut config = AnalyzeConfig::new(rules);
    config.intervals_ms = args.intervals;
    config.methods = args.methods;
    config.measure = args.measure;
    config.utc_offset_minutes = args.tz_offset;
    config.format = args.input_format;

    let run = match run_analysis(&args.files, &config) {
        Ok(run) => run,
        Err(e @ (PipelineError::InvalidConfig(_) | PipelineError::NoInputs)) => {
            return Err(Failure::Usage(e.to_string()))
        }
        Err(e) => return Err(Failure::data(e)),
    };

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.out.display())))?;
    let write = |name: &str, content: &str| -> Result<(), Failure> {
        let path = args.out.join(name);
        fs::write(&path, content).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
    };
    write("run.json", &run.to_json())?;
    if args.format == ReportFormat::Csv {
        write("volume.csv", &run.volume.to_csv())?;
        if let Some(dist) = &run.distribution {
            write("distribution.csv", &dist.to_csv())?;
        }
        if let Some(act) = &run.activity {
            write("activity.csv", &act.to_csv())?;
        }
    }

    print!("{}", render_run(&run));
    println!("run record: {}", args.out.join("run.json").display());
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<(), Failure> {
    if !(args.h > 0.0 && args.h < 1.0) {
        return Err(Failure::Usage(format!("--h {} outside (0, 1)", args.h)));
    }
    if args.sigma2 <= 0.0 || args.sigma2.is_nan() {
        return Err(Failure::Usage(format!("--sigma2 {} not positive", args.sigma2)));
    }
    if args.n < 2 {
        return Err(Failure::Usage(format!("--n {} too short", args.n)));
    }
    let spec = SynthSpec {
        h: args.h,
        sigma2: args.sigma2,
        n: args.n,
        seed: args.seed,
    };
    let values = gen_fgn(&spec).map_err(Failure::data)?;
    let series = BinnedSeries {
        interval_ms: 1000,
        t0: Timestamp::from_micros(0),
        measure: Measure::Bytes,
        class_id: None,
        activity: None,
        values,
    };
    let extra = format!(
        "synthetic h={} sigma2={} n={} seed={}",
        args.h, args.sigma2, args.n, args.seed
    );
    let mut buf = Vec::new();
    write_series_csv(&series, Some(&extra), &mut buf).map_err(Failure::data)?;
    write_target(args.out.as_ref(), &buf)
}

fn run_calibrate(args: CalibrateArgs) -> Result<(), Failure> {
    for &h in &args.h_grid {
        if !(h > 0.0 && h < 1.0) {
            return Err(Failure::Usage(format!("--h-grid value {h} outside (0, 1)")));
        }
    }
    if args.seeds == 0 {
        return Err(Failure::Usage("--seeds must be positive".into()));
    }
    let mut spec = CalibrationSpec::standard(args.seed);
    spec.h_grid = args.h_grid;
    spec.seeds = args.seeds;
    spec.n = args.n;
    spec.methods = args.methods;
    let cells = calibrate_grid(&spec).map_err(Failure::data)?;

    let mut buf = Vec::new();
    write_calibration_csv(&cells, &mut buf).map_err(Failure::data)?;
    write_target(args.out.as_ref(), &buf)?;

    for &method in &spec.methods {
        for &h in &spec.h_grid {
            if let Some(err) = mean_abs_err(&cells, method, Some(h)) {
                eprintln!("{method} h={h}: mean |err| = {err:.4}");
            }
        }
        if let Some(err) = mean_abs_err(&cells, method, None) {
            eprintln!("{method} overall: mean |err| = {err:.4}");
        }
    }
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.run)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.run.display())))?;
    let run = AnalysisRun::from_json(&text)
        .map_err(|e| Failure::Data(format!("{}: {e}", args.run.display())))?;
    print!("{}", render_run(&run));
    Ok(())
}

/// The three tables plus run context, as printed by both `analyze`
/// and `report`.
fn render_run(run: &AnalysisRun) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let stats = &run.stats;
    writeln!(
        out,
        "{} packets, {} bytes, {} non-IP frames skipped (rules {})",
        stats.packets_parsed, stats.bytes_total, stats.packets_skipped_non_ip,
        run.config.rules_version
    )
    .unwrap();
    out.push('\n');
    out.push_str(&run.volume.to_text());
    match &run.distribution {
        Some(dist) => {
            out.push('\n');
            out.push_str(&dist.to_text());
        }
        None => out.push_str("\nno H distribution: no hour sample produced a usable estimate\n"),
    }
    if let Some(act) = &run.activity {
        out.push('\n');
        out.push_str(&act.to_text());
    }
    out.push('\n');
    writeln!(
        out,
        "{} estimated series, {} skipped",
        run.samples.len(),
        run.skipped.len()
    )
    .unwrap();
    for w in &run.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    for n in &run.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Ingest(args) => run_ingest(args),
        Cmd::Analyze(args) => run_analyze(args),
        Cmd::Synth(args) => run_synth(args),
        Cmd::Calibrate(args) => run_calibrate(args),
        Cmd::Report(args) => run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
