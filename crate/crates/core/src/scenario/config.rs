//! Experiment description and its JSON document form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cc::{Algorithm, DEFAULT_ALPHA_TOTAL};
use crate::sim::DATA_BYTES;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_DURATION: f64 = 60.0;
pub const DEFAULT_TRACE_INTERVAL: f64 = 0.1;
pub const DEFAULT_START_JITTER: f64 = 0.1;
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.2;
pub const MIN_QUEUE_CAPACITY: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    /// Location of the offending field, e.g. `flows[0].algorithm`.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Every subflow and competitor crosses one common bottleneck.
    SharedBottleneck,
    /// Subflows of a multipath flow each get their own bottleneck.
    DisjointPaths,
    /// Arbitrary mapping of subflows onto paths.
    PartiallyShared,
}

impl Topology {
    pub fn as_str(self) -> &'static str {
        match self {
            Topology::SharedBottleneck => "shared_bottleneck",
            Topology::DisjointPaths => "disjoint_paths",
            Topology::PartiallyShared => "partially_shared",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Mptcp,
    Sptcp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// Bottleneck rate, bits per second.
    pub rate_bps: f64,
    /// One-way propagation delay, seconds. The reverse direction uses the
    /// same delay, so the base RTT is twice this.
    pub prop_delay: f64,
    /// Droptail capacity in packets.
    pub queue_capacity: usize,
}

impl PathSpec {
    /// Capacity equal to the bandwidth-delay product, rounded up, at least
    /// [`MIN_QUEUE_CAPACITY`].
    pub fn bdp_packets(rate_bps: f64, prop_delay: f64) -> usize {
        let bdp = rate_bps * 2.0 * prop_delay / (8.0 * f64::from(DATA_BYTES));
        (bdp.ceil() as usize).max(MIN_QUEUE_CAPACITY)
    }

    pub fn with_bdp_queue(rate_bps: f64, prop_delay: f64) -> Self {
        Self {
            rate_bps,
            prop_delay,
            queue_capacity: Self::bdp_packets(rate_bps, prop_delay),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub algorithm: Algorithm,
    /// Path index of each subflow.
    pub subflows: Vec<usize>,
    /// Nominal start, seconds; the run adds seeded jitter on top.
    pub start_time: f64,
}

impl FlowSpec {
    pub fn mptcp(algorithm: Algorithm, subflows: Vec<usize>) -> Self {
        Self {
            kind: FlowKind::Mptcp,
            algorithm,
            subflows,
            start_time: 0.0,
        }
    }

    pub fn sptcp(path: usize) -> Self {
        Self {
            kind: FlowKind::Sptcp,
            algorithm: Algorithm::Reno,
            subflows: vec![path],
            start_time: 0.0,
        }
    }

    pub fn starting_at(mut self, start_time: f64) -> Self {
        self.start_time = start_time;
        self
    }
}

/// Fully validated experiment, defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub topology: Topology,
    pub paths: Vec<PathSpec>,
    pub flows: Vec<FlowSpec>,
    pub duration: f64,
    pub seed: u64,
    pub trace_interval: f64,
    pub alpha_total: f64,
    /// Upper bound of the uniform start-time jitter, seconds.
    pub start_jitter: f64,
    /// Leading fraction of the run excluded from mean metrics.
    pub warmup_fraction: f64,
    /// Flows whose goodputs enter the Jain index; all flows when `None`.
    pub jain_flows: Option<Vec<usize>>,
    /// Droptail capacity of the ACK direction; unbounded when `None`.
    pub reverse_queue_capacity: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(topology: Topology, paths: Vec<PathSpec>, flows: Vec<FlowSpec>) -> Self {
        Self {
            topology,
            paths,
            flows,
            duration: DEFAULT_DURATION,
            seed: DEFAULT_SEED,
            trace_interval: DEFAULT_TRACE_INTERVAL,
            alpha_total: DEFAULT_ALPHA_TOTAL,
            start_jitter: DEFAULT_START_JITTER,
            warmup_fraction: DEFAULT_WARMUP_FRACTION,
            jain_flows: None,
            reverse_queue_capacity: None,
        }
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_jain_flows(mut self, flows: Vec<usize>) -> Self {
        self.jain_flows = Some(flows);
        self
    }

    pub fn warmup(&self) -> f64 {
        self.duration * self.warmup_fraction
    }

    pub fn jain_set(&self) -> Vec<usize> {
        self.jain_flows
            .clone()
            .unwrap_or_else(|| (0..self.flows.len()).collect())
    }

    /// Checks every semantic constraint, including the topology's mapping
    /// rules.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |path: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(path, format!("must be positive and finite, got {v}")))
            }
        };
        positive("duration", self.duration)?;
        positive("trace_interval", self.trace_interval)?;
        positive("alpha_total", self.alpha_total)?;
        if !(self.start_jitter >= 0.0 && self.start_jitter.is_finite()) {
            return Err(ConfigError::new("start_jitter", "must be non-negative"));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(ConfigError::new("warmup_fraction", "must be in [0, 1)"));
        }
        if self.paths.is_empty() {
            return Err(ConfigError::new("paths", "at least one path is required"));
        }
        for (i, p) in self.paths.iter().enumerate() {
            positive(&format!("paths[{i}].rate_bps"), p.rate_bps)?;
            if !(p.prop_delay >= 0.0 && p.prop_delay.is_finite()) {
                return Err(ConfigError::new(
                    format!("paths[{i}].prop_delay"),
                    "must be non-negative",
                ));
            }
            if p.queue_capacity == 0 {
                return Err(ConfigError::new(
                    format!("paths[{i}].queue_capacity"),
                    "must be at least 1",
                ));
            }
        }
        if self.flows.is_empty() {
            return Err(ConfigError::new("flows", "at least one flow is required"));
        }
        for (i, f) in self.flows.iter().enumerate() {
            if f.subflows.is_empty() {
                return Err(ConfigError::new(
                    format!("flows[{i}].subflows"),
                    "at least one subflow is required",
                ));
            }
            if f.kind == FlowKind::Sptcp && f.subflows.len() != 1 {
                return Err(ConfigError::new(
                    format!("flows[{i}].subflows"),
                    "a single-path flow has exactly one subflow",
                ));
            }
            for (j, &p) in f.subflows.iter().enumerate() {
                if p >= self.paths.len() {
                    return Err(ConfigError::new(
                        format!("flows[{i}].subflows[{j}]"),
                        format!("path {p} does not exist ({} paths)", self.paths.len()),
                    ));
                }
            }
            if !(f.start_time >= 0.0 && f.start_time < self.duration) {
                return Err(ConfigError::new(
                    format!("flows[{i}].start_time"),
                    "must be in [0, duration)",
                ));
            }
        }
        if let Some(set) = &self.jain_flows {
            if set.is_empty() {
                return Err(ConfigError::new("jain_flows", "must not be empty"));
            }
            if let Some(j) = set.iter().position(|&f| f >= self.flows.len()) {
                return Err(ConfigError::new(format!("jain_flows[{j}]"), "no such flow"));
            }
        }
        if self.reverse_queue_capacity == Some(0) {
            return Err(ConfigError::new("reverse_queue_capacity", "must be at least 1"));
        }
        self.validate_topology()
    }

    fn validate_topology(&self) -> Result<(), ConfigError> {
        match self.topology {
            Topology::SharedBottleneck => {
                if !self.flows.iter().any(|f| f.kind == FlowKind::Mptcp) {
                    return Err(ConfigError::new("flows", "shared_bottleneck needs a multipath flow"));
                }
                let first = self.flows[0].subflows[0];
                for (i, f) in self.flows.iter().enumerate() {
                    if let Some(j) = f.subflows.iter().position(|&p| p != first) {
                        return Err(ConfigError::new(
                            format!("flows[{i}].subflows[{j}]"),
                            format!("shared_bottleneck requires every subflow on path {first}"),
                        ));
                    }
                }
            }
            Topology::DisjointPaths => {
                for (i, f) in self.flows.iter().enumerate() {
                    for (j, p) in f.subflows.iter().enumerate() {
                        if f.subflows[..j].contains(p) {
                            return Err(ConfigError::new(
                                format!("flows[{i}].subflows[{j}]"),
                                format!("disjoint_paths gives each subflow its own path; path {p} is reused"),
                            ));
                        }
                    }
                }
            }
            Topology::PartiallyShared => {}
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathDoc {
    rate_bps: f64,
    prop_delay: f64,
    #[serde(default)]
    queue_capacity: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowDoc {
    kind: FlowKind,
    #[serde(default)]
    algorithm: Option<Algorithm>,
    subflows: Vec<usize>,
    #[serde(default)]
    start_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Output directory; the command line may override it.
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub trace: bool,
    #[serde(default = "yes")]
    pub throughput: bool,
    #[serde(default = "yes")]
    pub queue: bool,
    #[serde(default = "yes")]
    pub summary: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            dir: None,
            trace: true,
            throughput: true,
            queue: true,
            summary: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    topology: Topology,
    paths: Vec<PathDoc>,
    flows: Vec<FlowDoc>,
    #[serde(default)]
    duration: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    trace_interval: Option<f64>,
    #[serde(default)]
    alpha_total: Option<f64>,
    #[serde(default)]
    start_jitter: Option<f64>,
    #[serde(default)]
    warmup_fraction: Option<f64>,
    #[serde(default)]
    jain_flows: Option<Vec<usize>>,
    #[serde(default)]
    reverse_queue_capacity: Option<usize>,
    #[serde(default)]
    output: OutputOptions,
}

/// A parsed configuration: the experiment plus output toggles.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub experiment: ExperimentSpec,
    pub output: OutputOptions,
}

/// Parses and validates a JSON configuration document.
pub fn parse_document(text: &str) -> Result<ConfigDocument, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "(document)".to_owned() } else { path };
        ConfigError::new(path, e.into_inner().to_string())
    })?;

    let paths = doc
        .paths
        .into_iter()
        .map(|p| PathSpec {
            rate_bps: p.rate_bps,
            prop_delay: p.prop_delay,
            queue_capacity: p
                .queue_capacity
                .unwrap_or_else(|| PathSpec::bdp_packets(p.rate_bps, p.prop_delay)),
        })
        .collect();
    let flows = doc
        .flows
        .into_iter()
        .map(|f| FlowSpec {
            kind: f.kind,
            algorithm: f.algorithm.unwrap_or(Algorithm::Reno),
            subflows: f.subflows,
            start_time: f.start_time,
        })
        .collect();
    let experiment = ExperimentSpec {
        topology: doc.topology,
        paths,
        flows,
        duration: doc.duration.unwrap_or(DEFAULT_DURATION),
        seed: doc.seed.unwrap_or(DEFAULT_SEED),
        trace_interval: doc.trace_interval.unwrap_or(DEFAULT_TRACE_INTERVAL),
        alpha_total: doc.alpha_total.unwrap_or(DEFAULT_ALPHA_TOTAL),
        start_jitter: doc.start_jitter.unwrap_or(DEFAULT_START_JITTER),
        warmup_fraction: doc.warmup_fraction.unwrap_or(DEFAULT_WARMUP_FRACTION),
        jain_flows: doc.jain_flows,
        reverse_queue_capacity: doc.reverse_queue_capacity,
    };
    experiment.validate()?;
    Ok(ConfigDocument {
        experiment,
        output: doc.output,
    })
}

/// Parses and validates a JSON configuration, returning only the experiment.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    parse_document(text).map(|d| d.experiment)
}
