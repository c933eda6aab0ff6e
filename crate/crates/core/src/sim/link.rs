//! Point-to-point link: serialization at a fixed rate, propagation delay,
//! and a finite droptail FIFO in front of the transmitter.

use std::collections::VecDeque;

use super::SimTime;

/// Payload bytes per data segment.
pub const MSS_BYTES: u32 = 1460;
/// Wire size of a data segment.
pub const DATA_BYTES: u32 = 1500;
/// Wire size of a pure ACK.
pub const ACK_BYTES: u32 = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub size: u32,
    pub flow: usize,
    pub subflow: usize,
    /// Data: segment number. ACK: cumulative acknowledgment (next expected).
    pub seq: u64,
    pub is_ack: bool,
    /// Data: send time. ACK: send time echoed from the data that triggered it.
    pub timestamp_sent: SimTime,
    /// Position along the packet's route.
    pub hop: usize,
}

impl Packet {
    pub fn data(flow: usize, subflow: usize, seq: u64, now: SimTime) -> Self {
        Self {
            size: DATA_BYTES,
            flow,
            subflow,
            seq,
            is_ack: false,
            timestamp_sent: now,
            hop: 0,
        }
    }

    pub fn ack(flow: usize, subflow: usize, ack: u64, echo: SimTime) -> Self {
        Self {
            size: ACK_BYTES,
            flow,
            subflow,
            seq: ack,
            is_ack: true,
            timestamp_sent: echo,
            hop: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinkStats {
    pub drops: u64,
    /// Times at which arrivals were dropped.
    pub drop_times: Vec<SimTime>,
    /// Bits that finished serialization.
    pub transmitted_bits: u64,
    /// `(start of transmission, time spent waiting in the queue)` per packet.
    pub queue_waits: Vec<(SimTime, SimTime)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enqueue {
    Dropped,
    Queued,
    /// The link was idle; serialization ends at `complete_at`.
    Transmitting {
        complete_at: SimTime,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmitDone {
    pub packet: Packet,
    /// When the packet reaches the far end.
    pub arrives_at: SimTime,
    /// Completion time of the next queued packet, if one started.
    pub next_complete_at: Option<SimTime>,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub name: String,
    pub rate_bps: f64,
    pub prop_delay: SimTime,
    /// Waiting-room size in packets, excluding the one being serialized.
    /// `None` is unbounded.
    pub queue_capacity: Option<usize>,
    queue: VecDeque<(Packet, SimTime)>,
    in_service: Option<Packet>,
    pub stats: LinkStats,
}

impl Link {
    pub fn new(name: impl Into<String>, rate_bps: f64, prop_delay: SimTime, queue_capacity: Option<usize>) -> Self {
        assert!(rate_bps > 0.0, "link rate must be positive");
        Self {
            name: name.into(),
            rate_bps,
            prop_delay,
            queue_capacity,
            queue: VecDeque::new(),
            in_service: None,
            stats: LinkStats::default(),
        }
    }

    pub fn serialization_time(&self, bytes: u32) -> SimTime {
        SimTime::from_secs_f64(8.0 * f64::from(bytes) / self.rate_bps)
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_busy(&self) -> bool {
        self.in_service.is_some()
    }

    /// Queueing delay a data packet arriving now would see, counting only
    /// whole packets waiting ahead of it.
    pub fn backlog_delay(&self) -> SimTime {
        let bytes: u64 = self.queue.iter().map(|(p, _)| u64::from(p.size)).sum();
        SimTime::from_secs_f64(8.0 * bytes as f64 / self.rate_bps)
    }

    pub fn enqueue(&mut self, packet: Packet, now: SimTime) -> Enqueue {
        if self.in_service.is_none() {
            debug_assert!(self.queue.is_empty());
            return Enqueue::Transmitting {
                complete_at: self.start(packet, now, now),
            };
        }
        if self.queue_capacity.is_some_and(|cap| self.queue.len() >= cap) {
            self.stats.drops += 1;
            self.stats.drop_times.push(now);
            return Enqueue::Dropped;
        }
        self.queue.push_back((packet, now));
        Enqueue::Queued
    }

    fn start(&mut self, packet: Packet, enqueued: SimTime, now: SimTime) -> SimTime {
        self.stats.queue_waits.push((now, now - enqueued));
        let done = now + self.serialization_time(packet.size);
        self.in_service = Some(packet);
        done
    }

    /// Finishes the packet in service and starts the next one, if any.
    ///
    /// # Panics
    /// If nothing is being transmitted.
    pub fn transmit_complete(&mut self, now: SimTime) -> TransmitDone {
        let packet = self.in_service.take().expect("transmit_complete on idle link");
        self.stats.transmitted_bits += 8 * u64::from(packet.size);
        let next_complete_at = self
            .queue
            .pop_front()
            .map(|(next, enqueued)| self.start(next, enqueued, now));
        TransmitDone {
            packet,
            arrives_at: now + self.prop_delay,
            next_complete_at,
        }
    }
}
