//! `mpsim`: run one experiment described by a JSON config and write its
//! traces and summary.
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 for runtime
//! failures (simulation invariants, I/O).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mpsim::metrics::RunSummary;
use mpsim::output::run_experiment;
use mpsim::scenario::parse_document;

const DEFAULT_OUT: &str = "mpsim-out";

#[derive(Debug, Parser)]
#[command(
    name = "mpsim",
    version,
    about = "Packet-level simulator for coupled multipath congestion control"
)]
struct Args {
    /// Experiment configuration (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Seed; overrides the one in the config.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Output directory; overrides `output.dir` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Run N consecutive seeds, each into `<out>/seed-<seed>`.
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeat: u64,

    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

fn print_summary(s: &RunSummary) {
    println!(
        "seed {} ({}), {} s simulated, warm-up {} s",
        s.seed, s.rng, s.total_simulated_time, s.warmup
    );
    for f in &s.flows {
        println!(
            "  flow {} {} {}: {:.3} Mb/s",
            f.flow,
            f.kind,
            f.algorithm,
            f.goodput_bps / 1e6
        );
        for sf in &f.subflows {
            println!(
                "    subflow {} path {}: {:.3} Mb/s, mean cwnd {:.2}, {} losses, {} timeouts",
                sf.subflow,
                sf.path,
                sf.goodput_bps / 1e6,
                sf.mean_cwnd,
                sf.loss_events,
                sf.timeouts
            );
        }
    }
    for l in s.links.iter().filter(|l| l.role == "bottleneck") {
        println!(
            "  {}: mean queue delay {:.3} ms, {} drops",
            l.name,
            l.mean_queue_delay * 1e3,
            l.drops
        );
    }
    match s.jain_index {
        Some(j) => println!("  Jain index over flows {:?}: {j:.4}", s.jain_flows),
        None => println!("  Jain index over flows {:?}: undefined", s.jain_flows),
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    let text =
        fs::read_to_string(&args.config).map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    let doc = parse_document(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let base = doc.experiment.seed;
    let first = args.seed.unwrap_or(base);
    let out = args
        .out
        .clone()
        .or_else(|| doc.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    for i in 0..args.repeat {
        let seed = first
            .checked_add(i)
            .ok_or_else(|| Failure::Config("seed range overflows u64".into()))?;
        let spec = doc.experiment.clone().with_seed(seed);
        let dir = if args.repeat > 1 {
            out.join(format!("seed-{seed}"))
        } else {
            out.clone()
        };
        let summary = run_experiment(&spec, &dir, &doc.output).map_err(|e| Failure::Runtime(e.to_string()))?;
        if !args.quiet {
            print_summary(&summary);
            println!("  artifacts in {}", dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("mpsim: configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("mpsim: {msg}");
            ExitCode::from(2)
        }
    }
}
