//! Writes run artifacts: cwnd trace, goodput series, queue samples and the
//! JSON summary.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::metrics::{summarize, throughput_series, RunSummary};
use crate::scenario::{simulate, ExperimentSpec, OutputOptions, RunError, RunOutcome};
use crate::sim::SimTime;

pub const TRACE_FILE: &str = "trace.csv";
pub const THROUGHPUT_FILE: &str = "throughput.csv";
pub const QUEUE_FILE: &str = "queue.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub const TRACE_HEADER: &str = "time,flow,subflow,cwnd,ssthresh,srtt_ms,phase";
pub const THROUGHPUT_HEADER: &str = "time,flow,goodput_bps";
pub const QUEUE_HEADER: &str = "time,link,queue_packets,queue_delay_ms";

/// JSON Schema of `summary.json`.
pub const SUMMARY_SCHEMA: &str = include_str!("../schemas/summary.schema.json");

/// An ssthresh at or above this is written as `inf`.
const SSTHRESH_INF: f64 = 1e9;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("summary serialization: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Formats with nine significant digits, `%.9g` style.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp) as usize;
    trim_fraction(&format!("{x:.decimals$}")).to_owned()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn secs(t: SimTime) -> String {
    fmt_num(t.as_secs_f64())
}

pub fn write_trace_csv<W: Write>(outcome: &RunOutcome, mut w: W) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for c in &outcome.trace.cwnd {
        let ssthresh = if c.ssthresh >= SSTHRESH_INF {
            "inf".into()
        } else {
            fmt_num(c.ssthresh)
        };
        let srtt = c.srtt.map(|s| fmt_num(s * 1e3)).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            secs(c.time),
            c.flow,
            c.subflow,
            fmt_num(c.cwnd),
            ssthresh,
            srtt,
            c.phase.as_str()
        )?;
    }
    Ok(())
}

/// One row per flow and interval; `time` is the end of the interval.
pub fn write_throughput_csv<W: Write>(outcome: &RunOutcome, mut w: W) -> io::Result<()> {
    writeln!(w, "{THROUGHPUT_HEADER}")?;
    let interval = outcome.trace.interval;
    let series = throughput_series(&outcome.trace, interval);
    for k in 0..series.len() {
        let end = SimTime(interval.as_nanos() * (k as u64 + 1));
        for (flow, values) in &series.flows {
            writeln!(w, "{},{},{}", secs(end), flow, fmt_num(values[k]))?;
        }
    }
    Ok(())
}

pub fn write_queue_csv<W: Write>(outcome: &RunOutcome, mut w: W) -> io::Result<()> {
    writeln!(w, "{QUEUE_HEADER}")?;
    for q in &outcome.trace.queue {
        writeln!(
            w,
            "{},{},{},{}",
            secs(q.time),
            outcome.network.links[q.link].name,
            q.packets,
            fmt_num(q.delay.as_secs_f64() * 1e3)
        )?;
    }
    Ok(())
}

pub fn summary_json(summary: &RunSummary) -> Result<String, serde_json::Error> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    Ok(text)
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<(), OutputError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(&path))
}

/// Writes the enabled artifacts of an already simulated run into `dir`.
pub fn write_artifacts(
    outcome: &RunOutcome,
    summary: &RunSummary,
    dir: &Path,
    options: &OutputOptions,
) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    if options.trace {
        write_file(dir, TRACE_FILE, |w| write_trace_csv(outcome, w))?;
    }
    if options.throughput {
        write_file(dir, THROUGHPUT_FILE, |w| write_throughput_csv(outcome, w))?;
    }
    if options.queue {
        write_file(dir, QUEUE_FILE, |w| write_queue_csv(outcome, w))?;
    }
    if options.summary {
        let text = summary_json(summary)?;
        write_file(dir, SUMMARY_FILE, |w| w.write_all(text.as_bytes()))?;
    }
    Ok(())
}

/// Simulates `spec` and writes its artifacts into `dir`.
pub fn run_experiment(spec: &ExperimentSpec, dir: &Path, options: &OutputOptions) -> Result<RunSummary, OutputError> {
    let outcome = simulate(spec)?;
    let summary = summarize(&outcome);
    write_artifacts(&outcome, &summary, dir, options)?;
    Ok(summary)
}
