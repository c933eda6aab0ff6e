use std::collections::BTreeSet;

use crate::sim::Packet;

/// Per-subflow cumulative-ACK receiver with an out-of-order buffer.
#[derive(Debug, Clone, Default)]
pub struct SubflowReceiver {
    expected: u64,
    out_of_order: BTreeSet<u64>,
    delivered: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverOutput {
    pub ack: crate::sim::Packet,
    /// Segments that advanced the cumulative point with this arrival.
    pub newly_delivered: u64,
}

impl SubflowReceiver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Next in-order segment expected.
    pub fn expected(&self) -> u64 {
        self.expected
    }

    /// Distinct segments delivered in order so far.
    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    /// Accepts a data segment and returns the immediate cumulative ACK.
    pub fn on_data(&mut self, packet: &Packet) -> ReceiverOutput {
        debug_assert!(!packet.is_ack);
        let before = self.expected;
        if packet.seq == self.expected {
            self.expected += 1;
            while self.out_of_order.remove(&self.expected) {
                self.expected += 1;
            }
        } else if packet.seq > self.expected {
            self.out_of_order.insert(packet.seq);
        }
        let newly_delivered = self.expected - before;
        self.delivered += newly_delivered;
        ReceiverOutput {
            ack: Packet::ack(packet.flow, packet.subflow, self.expected, packet.timestamp_sent),
            newly_delivered,
        }
    }
}
