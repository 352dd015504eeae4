//! `csi-vitals` subcommands.
//!
//! Exit codes: 0 success, 2 usage or validation (including unreadable input),
//! 3 output I/O, 4 internal invariant breach.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::channel_model::{estimate_ricean_k, model_sweep, synthesize_trace};
use crate::dsp::{
    hampel_filter, subcarrier_variances, AmplitudeSeries, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA,
};
use crate::error::Error;
use crate::pipeline::{run_pipeline, select_link, PipelineConfig};
use crate::segmentation::{is_partition, segment_trace, SegmentLabel};
use crate::trace::CsiTrace;
use crate::trace_io::{
    parse_scenario_with, read_csv, read_trace, report_to_json, truth_to_json, write_atomic,
    write_trace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "csi-vitals",
    version,
    about = "Wi-Fi CSI vital-sign sensing toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a WITL trace and its ground-truth sidecar from a scenario file.
    Simulate {
        /// Scenario file of `key=value` lines.
        #[arg(long)]
        config: PathBuf,
        /// Output WITL trace.
        #[arg(long)]
        out: PathBuf,
        /// Sidecar path; defaults to `<out>.truth.json`.
        #[arg(long)]
        truth_out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Extra `key=value` assignments applied after the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the full pipeline and emit a JSON vital report.
    Analyze {
        /// WITL trace, or CSV when the name ends in `.csv`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Analysis window, seconds [default: 30].
        #[arg(long)]
        window_s: Option<f64>,
        /// Window step, seconds [default: 5].
        #[arg(long)]
        step_s: Option<f64>,
        /// Minimum peak-to-median magnitude ratio for a rate to be reported [default: 5].
        #[arg(long)]
        gate: Option<f64>,
        /// Offset stride of the MED search; 1 is exact [default: 1].
        #[arg(long)]
        med_stride: Option<usize>,
    },
    /// Segment the selected link into vital and motion periods.
    Segment {
        /// WITL trace, or CSV when the name ends in `.csv`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Activation factor [default: 2.5].
        #[arg(long)]
        v: Option<f64>,
        /// CSV path; stdout when omitted.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Offset stride of the MED search; 1 is exact [default: 1].
        #[arg(long)]
        med_stride: Option<usize>,
    },
    /// Sweep the sensing model over K and write a CSV curve.
    Model {
        /// Static share of the NLOS power, in [0, 1].
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Static/dynamic phase difference, radians.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        /// Evenly spaced K values, at least 2.
        #[arg(long)]
        points: usize,
        /// Output CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print moment-based Ricean K estimates per link.
    EstimateK {
        /// WITL trace, or CSV when the name ends in `.csv`.
        #[arg(long = "in")]
        input: PathBuf,
        /// Only this stream; all streams when omitted.
        #[arg(long)]
        stream: Option<usize>,
        /// Only this subcarrier; all subcarriers when omitted.
        #[arg(long)]
        subcarrier: Option<usize>,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

/// Errors while reading inputs or validating them are usage errors.
fn input_err(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::usage(format!("{}: {e}", path.display()))
}

fn check_output_dir(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => {
            Err(CliError::output(path, "output directory does not exist"))
        }
        _ => Ok(()),
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|e| CliError::output(path, e))
}

/// Load a WITL trace, or CSV when the extension is `.csv`.
pub fn load_trace(path: &Path) -> Result<CsiTrace, Error> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        read_csv(path, None)
    } else {
        read_trace(path)
    }
}

fn cmd_simulate(
    config: &Path,
    out: &Path,
    truth_out: Option<&Path>,
    seed: Option<u64>,
    overrides: &[String],
) -> Result<String, CliError> {
    let truth_path = truth_out.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".truth.json");
        PathBuf::from(p)
    });
    check_output_dir(out)?;
    check_output_dir(&truth_path)?;
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::usage(format!("{}: {e}", config.display())))?;
    let mut overrides = overrides.to_vec();
    if let Some(s) = seed {
        overrides.push(format!("seed={s}"));
    }
    let scenario = parse_scenario_with(&text, &overrides).map_err(input_err(config))?;
    let (trace, truth) = synthesize_trace(&scenario).map_err(CliError::usage)?;
    write_trace(out, &trace).map_err(|e| CliError::output(out, e))?;
    write_out(&truth_path, truth_to_json(&truth).as_bytes())?;
    Ok(format!(
        "simulated {:.3} s at {} Hz, K={}, rho={}, {} motion event(s) -> {}",
        scenario.duration,
        scenario.sample_rate,
        scenario.channel.k_factor,
        scenario.channel.rho,
        scenario.motion_events.len(),
        out.display()
    ))
}

fn cmd_analyze(
    input: &Path,
    report: Option<&Path>,
    window_s: Option<f64>,
    step_s: Option<f64>,
    gate: Option<f64>,
    med_stride: Option<usize>,
) -> Result<String, CliError> {
    if let Some(p) = report {
        check_output_dir(p)?;
    }
    let trace = load_trace(input).map_err(input_err(input))?;
    let mut cfg = PipelineConfig::default();
    cfg.window_s = window_s.unwrap_or(cfg.window_s);
    cfg.step_s = step_s.unwrap_or(cfg.step_s);
    cfg.gate_ratio = gate.unwrap_or(cfg.gate_ratio);
    cfg.segmentation.med_stride = med_stride.unwrap_or(cfg.segmentation.med_stride);
    let rep = run_pipeline(&trace, &cfg).map_err(input_err(input))?;
    if !is_partition(&rep.segments, trace.n_frames()) {
        return Err(CliError {
            code: EXIT_INTERNAL,
            message: "segments do not partition the trace".into(),
        });
    }
    let json = report_to_json(&rep).map_err(|e| CliError {
        code: EXIT_INTERNAL,
        message: e.to_string(),
    })?;
    match report {
        Some(p) => {
            write_out(p, json.as_bytes())?;
            Ok(format!(
                "{} window(s), {} with breathing, {} with heart -> {}",
                rep.windows.len(),
                rep.breathing_bpm().len(),
                rep.heart_bpm().len(),
                p.display()
            ))
        }
        None => Ok(json.trim_end().to_string()),
    }
}

fn cmd_segment(
    input: &Path,
    v: Option<f64>,
    out_csv: Option<&Path>,
    med_stride: Option<usize>,
) -> Result<String, CliError> {
    if let Some(p) = out_csv {
        check_output_dir(p)?;
    }
    let trace = load_trace(input).map_err(input_err(input))?;
    let mut cfg = PipelineConfig::default().segmentation;
    cfg.activation_factor = v.unwrap_or(cfg.activation_factor);
    cfg.med_stride = med_stride.unwrap_or(cfg.med_stride);
    // same link the pipeline segments
    let variances = (0..trace.n_streams())
        .map(|s| subcarrier_variances(&trace, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input_err(input))?;
    let (stream, sub) = select_link(&variances);
    let fs = trace.sample_rate() as f64;
    let raw = AmplitudeSeries::new(trace.amplitude(stream, sub).map_err(input_err(input))?, fs)
        .map_err(input_err(input))?;
    let clean = hampel_filter(&raw, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA);
    let segs = segment_trace(&clean, &cfg).map_err(CliError::usage)?;
    if !is_partition(&segs, clean.len()) {
        return Err(CliError {
            code: EXIT_INTERNAL,
            message: "segments do not partition the trace".into(),
        });
    }
    let mut csv = String::from("start_s,end_s,label\n");
    for s in &segs {
        let label = match s.label {
            SegmentLabel::Vital => "Vital",
            SegmentLabel::OtherMotion => "OtherMotion",
        };
        let _ = writeln!(csv, "{},{},{label}", s.start as f64 / fs, s.end as f64 / fs);
    }
    match out_csv {
        Some(p) => {
            write_out(p, csv.as_bytes())?;
            Ok(format!("{} segment(s) -> {}", segs.len(), p.display()))
        }
        None => Ok(csv.trim_end().to_string()),
    }
}

fn cmd_model(
    rho: f64,
    theta: f64,
    k_min: f64,
    k_max: f64,
    points: usize,
    out: &Path,
) -> Result<String, CliError> {
    check_output_dir(out)?;
    if points < 2 || !(k_min < k_max) {
        return Err(CliError::usage("need --points >= 2 and --k-min < --k-max"));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| k_min + (k_max - k_min) * i as f64 / (points - 1) as f64)
        .collect();
    let curve = model_sweep(rho, theta, &grid).map_err(CliError::usage)?;
    let mut csv = String::from("k,rho,theta,f,df_dk,df_drho,as_max\n");
    for p in &curve {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            p.k_factor, p.rho, p.theta, p.f_value, p.df_dk, p.df_drho, p.as_max
        );
    }
    write_out(out, csv.as_bytes())?;
    Ok(format!("{} point(s) -> {}", curve.len(), out.display()))
}

fn cmd_estimate_k(
    input: &Path,
    stream: Option<usize>,
    subcarrier: Option<usize>,
) -> Result<String, CliError> {
    let trace = load_trace(input).map_err(input_err(input))?;
    let streams: Vec<usize> = stream.map_or_else(|| (0..trace.n_streams()).collect(), |s| vec![s]);
    let subs: Vec<usize> =
        subcarrier.map_or_else(|| (0..trace.n_subcarriers()).collect(), |k| vec![k]);
    let mut out = String::from("stream,subcarrier,k");
    for &s in &streams {
        for &k in &subs {
            let est = estimate_ricean_k(&trace, s, k).map_err(input_err(input))?;
            let _ = write!(out, "\n{s},{k},{est}");
        }
    }
    Ok(out)
}

/// Run one parsed invocation; `Ok` carries text for stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            truth_out,
            seed,
            overrides,
        } => cmd_simulate(&config, &out, truth_out.as_deref(), seed, &overrides),
        Command::Analyze {
            input,
            report,
            window_s,
            step_s,
            gate,
            med_stride,
        } => cmd_analyze(
            &input,
            report.as_deref(),
            window_s,
            step_s,
            gate,
            med_stride,
        ),
        Command::Segment {
            input,
            v,
            out_csv,
            med_stride,
        } => cmd_segment(&input, v, out_csv.as_deref(), med_stride),
        Command::Model {
            rho,
            theta,
            k_min,
            k_max,
            points,
            out,
        } => cmd_model(rho, theta, k_min, k_max, points, &out),
        Command::EstimateK {
            input,
            stream,
            subcarrier,
        } => cmd_estimate_k(&input, stream, subcarrier),
    }
}

/// Parse, run, print, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
