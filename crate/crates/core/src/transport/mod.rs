//! Reliable bulk-transfer sender and receiver for multipath connections.
//!
//! The sender is event-driven and performs no I/O: every entry point takes
//! the current time and appends what the caller must do (transmit a segment,
//! arm a retransmission timer) to an [`Effects`] buffer. Slow start, fast
//! retransmit and fast recovery follow standard TCP; congestion avoidance is
//! delegated to [`crate::cc`].

mod receiver;
mod sender;

use thiserror::Error;

pub use receiver::{ReceiverOutput, SubflowReceiver};
pub use sender::{MpConnection, SubflowTx};

use crate::cc::{CcError, SubflowId};
use crate::sim::SimTime;

pub const INITIAL_CWND: f64 = 2.0;
pub const INITIAL_RTO: f64 = 1.0;
pub const MIN_RTO: f64 = 0.2;
pub const MAX_RTO: f64 = 60.0;
pub const DUP_ACK_THRESHOLD: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error(transparent)]
    Cc(#[from] CcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transmission {
    pub subflow: SubflowId,
    pub seq: u64,
    pub retransmission: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimerArm {
    pub subflow: SubflowId,
    pub generation: u64,
    pub deadline: SimTime,
}

/// Work requested by the sender.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Effects {
    pub transmissions: Vec<Transmission>,
    pub timers: Vec<TimerArm>,
    /// Number of wVegas end-of-round updates that ran.
    pub round_updates: u32,
    pub loss_events: u32,
}

impl Effects {
    pub fn clear(&mut self) {
        self.transmissions.clear();
        self.timers.clear();
        self.round_updates = 0;
        self.loss_events = 0;
    }
}
