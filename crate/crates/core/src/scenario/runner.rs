//! Drives one experiment through the event loop and records its trace.

use thiserror::Error;

use super::config::{ConfigError, ExperimentSpec};
use super::topology::{build_network, LinkId, Network};
use crate::cc::{Phase, SubflowId};
use crate::sim::{seeded_rng, Enqueue, EventQueue, Packet, SimError, SimTime, MSS_BYTES};
use crate::transport::{Effects, MpConnection, SubflowReceiver, TransportError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("event loop: {0}")]
    Sim(#[from] SimError),
    #[error("transport: {0}")]
    Transport(#[from] TransportError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwndSample {
    pub time: SimTime,
    pub flow: usize,
    pub subflow: usize,
    pub cwnd: f64,
    pub ssthresh: f64,
    pub srtt: Option<f64>,
    pub phase: Phase,
}

/// Segments that advanced a receiver's cumulative point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub time: SimTime,
    pub flow: usize,
    pub subflow: usize,
    pub bits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueSample {
    pub time: SimTime,
    pub link: LinkId,
    pub packets: usize,
    pub delay: SimTime,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub duration: SimTime,
    pub interval: SimTime,
    pub cwnd: Vec<CwndSample>,
    pub deliveries: Vec<Delivery>,
    /// Bottleneck backlog at every probe.
    pub queue: Vec<QueueSample>,
}

/// Everything a finished run leaves behind.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub spec: ExperimentSpec,
    pub network: Network,
    pub connections: Vec<MpConnection>,
    /// Actual (jittered) start time of each flow.
    pub start_times: Vec<SimTime>,
    pub trace: Trace,
}

#[derive(Debug, Clone)]
enum Event {
    FlowStart(usize),
    /// `packet` finished crossing the link at `packet.hop` of its route.
    PacketArrival(Packet),
    TransmitComplete(LinkId),
    Timer {
        flow: usize,
        subflow: SubflowId,
        generation: u64,
    },
    RoundProbe,
}

struct World {
    net: Network,
    conns: Vec<MpConnection>,
    receivers: Vec<Vec<SubflowReceiver>>,
    trace: Trace,
    effects: Effects,
}

/// Runs `spec` to completion. The result depends only on the experiment (seed
/// included).
pub fn simulate(spec: &ExperimentSpec) -> Result<RunOutcome, RunError> {
    let net = build_network(spec)?;
    let duration = SimTime::from_secs_f64(spec.duration);
    let interval = SimTime::from_secs_f64(spec.trace_interval);
    if interval == SimTime::ZERO {
        return Err(ConfigError::new("trace_interval", "below simulator resolution").into());
    }

    let conns = spec
        .flows
        .iter()
        .enumerate()
        .map(|(i, f)| MpConnection::new(i, f.algorithm, f.subflows.len(), spec.alpha_total))
        .collect();
    let receivers = spec
        .flows
        .iter()
        .map(|f| vec![SubflowReceiver::new(); f.subflows.len()])
        .collect();
    let mut world = World {
        net,
        conns,
        receivers,
        trace: Trace {
            duration,
            interval,
            ..Trace::default()
        },
        effects: Effects::default(),
    };

    let mut queue = EventQueue::new();
    let mut rng = seeded_rng(spec.seed);
    let mut start_times = Vec::with_capacity(spec.flows.len());
    for (i, f) in spec.flows.iter().enumerate() {
        let at = SimTime::from_secs_f64(f.start_time + spec.start_jitter * rng.next_f64());
        start_times.push(at);
        queue.schedule(at, Event::FlowStart(i))?;
    }
    queue.schedule(interval, Event::RoundProbe)?;

    queue.run_until(duration, |q, now, event| world.handle(q, now, event, duration))?;

    world.check_final(spec)?;
    Ok(RunOutcome {
        spec: spec.clone(),
        network: world.net,
        connections: world.conns,
        start_times,
        trace: world.trace,
    })
}

impl World {
    fn handle(&mut self, q: &mut EventQueue<Event>, now: SimTime, event: Event, end: SimTime) -> Result<(), RunError> {
        match event {
            Event::FlowStart(flow) => {
                self.effects.clear();
                self.conns[flow].start(now, &mut self.effects);
                self.apply_effects(q, flow, now)?;
            }
            Event::TransmitComplete(link) => {
                let done = self.net.links[link].transmit_complete(now);
                if let Some(at) = done.next_complete_at {
                    q.schedule(at, Event::TransmitComplete(link))?;
                }
                q.schedule(done.arrives_at, Event::PacketArrival(done.packet))?;
            }
            Event::PacketArrival(mut packet) => {
                let route = &self.net.routes[packet.flow][packet.subflow];
                let hops = if packet.is_ack { &route.reverse } else { &route.forward };
                packet.hop += 1;
                if let Some(&next) = hops.get(packet.hop) {
                    self.enqueue(q, next, packet, now)?;
                } else if packet.is_ack {
                    self.on_ack(q, packet, now)?;
                } else {
                    self.on_data(q, packet, now)?;
                }
            }
            Event::Timer {
                flow,
                subflow,
                generation,
            } => {
                self.effects.clear();
                self.conns[flow].on_rto(subflow, generation, now, &mut self.effects)?;
                self.apply_effects(q, flow, now)?;
            }
            Event::RoundProbe => {
                self.probe(now);
                let next = now + self.trace.interval;
                if next <= end {
                    q.schedule(next, Event::RoundProbe)?;
                }
            }
        }
        Ok(())
    }

    fn enqueue(
        &mut self,
        q: &mut EventQueue<Event>,
        link: LinkId,
        packet: Packet,
        now: SimTime,
    ) -> Result<(), RunError> {
        if let Enqueue::Transmitting { complete_at } = self.net.links[link].enqueue(packet, now) {
            q.schedule(complete_at, Event::TransmitComplete(link))?;
        }
        Ok(())
    }

    fn on_data(&mut self, q: &mut EventQueue<Event>, packet: Packet, now: SimTime) -> Result<(), RunError> {
        let (flow, subflow) = (packet.flow, packet.subflow);
        let out = self.receivers[flow][subflow].on_data(&packet);
        if out.newly_delivered > 0 {
            self.conns[flow].record_delivered(out.newly_delivered);
            self.trace.deliveries.push(Delivery {
                time: now,
                flow,
                subflow,
                bits: out.newly_delivered * u64::from(MSS_BYTES) * 8,
            });
        }
        let first = self.net.routes[flow][subflow].reverse[0];
        self.enqueue(q, first, out.ack, now)
    }

    fn on_ack(&mut self, q: &mut EventQueue<Event>, packet: Packet, now: SimTime) -> Result<(), RunError> {
        let flow = packet.flow;
        self.effects.clear();
        self.conns[flow].on_ack_receipt(
            SubflowId(packet.subflow),
            packet.seq,
            packet.timestamp_sent,
            now,
            &mut self.effects,
        )?;
        self.apply_effects(q, flow, now)
    }

    fn apply_effects(&mut self, q: &mut EventQueue<Event>, flow: usize, now: SimTime) -> Result<(), RunError> {
        let effects = std::mem::take(&mut self.effects);
        for t in &effects.transmissions {
            let packet = Packet::data(flow, t.subflow.0, t.seq, now);
            let first = self.net.routes[flow][t.subflow.0].forward[0];
            self.enqueue(q, first, packet, now)?;
        }
        for t in &effects.timers {
            q.schedule(
                t.deadline,
                Event::Timer {
                    flow,
                    subflow: t.subflow,
                    generation: t.generation,
                },
            )?;
        }
        let sent: Vec<SubflowId> = effects
            .transmissions
            .iter()
            .filter(|t| !t.retransmission)
            .map(|t| t.subflow)
            .collect();
        self.check_connection(flow, &sent)?;
        self.effects = effects;
        Ok(())
    }

    fn check_connection(&self, flow: usize, sent_new_data: &[SubflowId]) -> Result<(), RunError> {
        let conn = &self.conns[flow];
        for (i, (tx, cc)) in conn.txs.iter().zip(&conn.cc.subflows).enumerate() {
            if cc.cwnd < crate::cc::MIN_CWND || cc.ssthresh < crate::cc::MIN_SSTHRESH {
                return Err(RunError::Invariant(format!(
                    "flow {flow} subflow {i}: cwnd {} ssthresh {}",
                    cc.cwnd, cc.ssthresh
                )));
            }
            if sent_new_data.contains(&SubflowId(i)) && tx.in_flight() as f64 > cc.cwnd.ceil() + 1.0 {
                return Err(RunError::Invariant(format!(
                    "flow {flow} subflow {i}: {} in flight with cwnd {}",
                    tx.in_flight(),
                    cc.cwnd
                )));
            }
            if tx.high_seq > tx.highest_acked && tx.timer_deadline.is_none() {
                return Err(RunError::Invariant(format!(
                    "flow {flow} subflow {i}: unacknowledged data without a timer"
                )));
            }
        }
        Ok(())
    }

    fn probe(&mut self, now: SimTime) {
        for conn in &self.conns {
            for (s, cc) in conn.cc.subflows.iter().enumerate() {
                self.trace.cwnd.push(CwndSample {
                    time: now,
                    flow: conn.flow,
                    subflow: s,
                    cwnd: cc.cwnd,
                    ssthresh: cc.ssthresh,
                    srtt: cc.srtt,
                    phase: cc.phase,
                });
            }
        }
        for &link in &self.net.bottlenecks {
            let l = &self.net.links[link];
            self.trace.queue.push(QueueSample {
                time: now,
                link,
                packets: l.queue_len(),
                delay: l.backlog_delay(),
            });
        }
    }

    fn check_final(&self, spec: &ExperimentSpec) -> Result<(), RunError> {
        for (f, (conn, rxs)) in self.conns.iter().zip(&self.receivers).enumerate() {
            let delivered: u64 = rxs.iter().map(|r| r.delivered()).sum();
            if delivered != conn.delivered_segments {
                return Err(RunError::Invariant(format!("flow {f}: delivery counters disagree")));
            }
            for (s, (rx, tx)) in rxs.iter().zip(&conn.txs).enumerate() {
                if rx.expected() > tx.high_seq || tx.highest_acked > rx.expected() {
                    return Err(RunError::Invariant(format!(
                        "flow {f} subflow {s}: receiver at {} but sender acked {} of {}",
                        rx.expected(),
                        tx.highest_acked,
                        tx.high_seq
                    )));
                }
            }
        }
        for link in &self.net.links {
            // one packet may straddle the horizon by up to its serialization time
            let bound = link.rate_bps * spec.duration + 8.0 * f64::from(crate::sim::DATA_BYTES);
            if link.stats.transmitted_bits as f64 > bound {
                return Err(RunError::Invariant(format!(
                    "{} carried {} bits, more than capacity",
                    link.name, link.stats.transmitted_bits
                )));
            }
        }
        Ok(())
    }
}
