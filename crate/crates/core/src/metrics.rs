//! Post-processing of simulation traces into goodput series and run
//! summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{Delivery, LinkRole, RunOutcome, Trace};
use crate::sim::{SimTime, RNG_ALGORITHM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("Jain index needs at least one rate")]
    NoRates,
    #[error("Jain index is undefined when every rate is zero")]
    AllZero,
    #[error("rates must be non-negative and finite")]
    InvalidRate,
}

/// Jain's fairness index (Σx)² / (n·Σx²).
pub fn jain_index(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::NoRates);
    }
    if rates.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(MetricsError::InvalidRate);
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|x| x * x).sum();
    if sum_sq == 0.0 {
        return Err(MetricsError::AllZero);
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Per-flow goodput in bits/s, one value per interval. Interval `k` covers
/// `(k·interval, (k+1)·interval]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThroughputSeries {
    pub interval: SimTime,
    pub flows: BTreeMap<usize, Vec<f64>>,
}

impl ThroughputSeries {
    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.flows.values().next().map_or(0, Vec::len)
    }
}

fn bucket(time: SimTime, interval: SimTime) -> usize {
    (time.as_nanos().saturating_sub(1) / interval.as_nanos()) as usize
}

/// Buckets the deliveries of `trace` into per-flow goodput samples. Every
/// flow gets the same number of samples, covering the whole run.
pub fn throughput_series(trace: &Trace, interval: SimTime) -> ThroughputSeries {
    assert!(interval > SimTime::ZERO, "interval must be positive");
    if trace.deliveries.is_empty() {
        return ThroughputSeries {
            interval,
            flows: BTreeMap::new(),
        };
    }
    let last = trace.deliveries.iter().map(|d| d.time).max().unwrap_or_default();
    let horizon = trace.duration.max(last);
    let buckets = bucket(horizon, interval) + 1;
    let secs = interval.as_secs_f64();

    let mut bits: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for d in &trace.deliveries {
        bits.entry(d.flow).or_insert_with(|| vec![0; buckets])[bucket(d.time, interval)] += d.bits;
    }
    ThroughputSeries {
        interval,
        flows: bits
            .into_iter()
            .map(|(flow, b)| (flow, b.into_iter().map(|x| x as f64 / secs).collect()))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubflowSummary {
    pub subflow: usize,
    pub path: usize,
    pub goodput_bps: f64,
    pub mean_cwnd: f64,
    pub loss_events: u64,
    pub timeouts: u64,
    pub retransmits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSummary {
    pub flow: usize,
    pub kind: String,
    pub algorithm: String,
    pub start_time: f64,
    pub goodput_bps: f64,
    pub subflows: Vec<SubflowSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSummary {
    pub link: usize,
    pub name: String,
    pub role: String,
    pub path: usize,
    pub rate_bps: f64,
    pub mean_queue_delay: f64,
    pub drops: u64,
    pub drops_after_warmup: u64,
    pub transmitted_bits: u64,
}

/// Mean metrics of one run. Means cover `[warmup, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub rng: String,
    pub topology: String,
    pub duration: f64,
    pub warmup: f64,
    pub total_simulated_time: f64,
    pub flows: Vec<FlowSummary>,
    pub links: Vec<LinkSummary>,
    pub jain_flows: Vec<usize>,
    /// `None` when every designated flow delivered nothing.
    pub jain_index: Option<f64>,
}

impl RunSummary {
    pub fn flow_goodput(&self, flow: usize) -> f64 {
        self.flows[flow].goodput_bps
    }

    pub fn bottleneck(&self, path: usize) -> &LinkSummary {
        self.links
            .iter()
            .find(|l| l.path == path && l.role == "bottleneck")
            .expect("every path has a bottleneck")
    }
}

pub fn summarize(outcome: &RunOutcome) -> RunSummary {
    let spec = &outcome.spec;
    let trace = &outcome.trace;
    let warmup = SimTime::from_secs_f64(spec.warmup());
    let window = (trace.duration - warmup).as_secs_f64();

    let mut sub_bits: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for d in trace.deliveries.iter().filter(|d| d.time > warmup) {
        *sub_bits.entry((d.flow, d.subflow)).or_default() += d.bits;
    }
    let mut cwnd_sums: BTreeMap<(usize, usize), (f64, u64)> = BTreeMap::new();
    for c in trace.cwnd.iter().filter(|c| c.time >= warmup) {
        let e = cwnd_sums.entry((c.flow, c.subflow)).or_default();
        e.0 += c.cwnd;
        e.1 += 1;
    }

    let flows: Vec<FlowSummary> = spec
        .flows
        .iter()
        .enumerate()
        .map(|(f, fs)| {
            let conn = &outcome.connections[f];
            let subflows: Vec<SubflowSummary> = fs
                .subflows
                .iter()
                .enumerate()
                .map(|(s, &path)| {
                    let bits = sub_bits.get(&(f, s)).copied().unwrap_or(0);
                    let (sum, n) = cwnd_sums.get(&(f, s)).copied().unwrap_or((0.0, 0));
                    let tx = &conn.txs[s];
                    SubflowSummary {
                        subflow: s,
                        path,
                        goodput_bps: bits as f64 / window,
                        mean_cwnd: if n > 0 { sum / n as f64 } else { 0.0 },
                        loss_events: tx.loss_events,
                        timeouts: tx.timeouts,
                        retransmits: tx.retransmits,
                    }
                })
                .collect();
            FlowSummary {
                flow: f,
                kind: format!("{:?}", fs.kind).to_lowercase(),
                algorithm: fs.algorithm.name().to_owned(),
                start_time: outcome.start_times[f].as_secs_f64(),
                goodput_bps: subflows.iter().map(|s| s.goodput_bps).sum(),
                subflows,
            }
        })
        .collect();

    let links = outcome
        .network
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let waits: Vec<SimTime> = l
                .stats
                .queue_waits
                .iter()
                .filter(|(t, _)| *t >= warmup)
                .map(|(_, w)| *w)
                .collect();
            let mean_queue_delay = if waits.is_empty() {
                0.0
            } else {
                waits.iter().map(|w| w.as_secs_f64()).sum::<f64>() / waits.len() as f64
            };
            LinkSummary {
                link: i,
                name: l.name.clone(),
                role: match outcome.network.roles[i] {
                    LinkRole::Bottleneck => "bottleneck",
                    LinkRole::Reverse => "reverse",
                    LinkRole::Access => "access",
                }
                .to_owned(),
                path: outcome.network.link_paths[i],
                rate_bps: l.rate_bps,
                mean_queue_delay,
                drops: l.stats.drops,
                drops_after_warmup: l.stats.drop_times.iter().filter(|&&t| t >= warmup).count() as u64,
                transmitted_bits: l.stats.transmitted_bits,
            }
        })
        .collect();

    let jain_flows = spec.jain_set();
    let rates: Vec<f64> = jain_flows.iter().map(|&f| flows[f].goodput_bps).collect();
    RunSummary {
        seed: spec.seed,
        rng: RNG_ALGORITHM.to_owned(),
        topology: spec.topology.as_str().to_owned(),
        duration: spec.duration,
        warmup: spec.warmup(),
        total_simulated_time: trace.duration.as_secs_f64(),
        flows,
        links,
        jain_flows,
        jain_index: jain_index(&rates).ok(),
    }
}

/// Keeps only deliveries of `flow`; handy for per-flow series.
pub fn deliveries_of(trace: &Trace, flow: usize) -> impl Iterator<Item = &Delivery> {
    trace.deliveries.iter().filter(move |d| d.flow == flow)
}
