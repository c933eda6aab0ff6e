//! Discrete-event kernel: simulated clock, ordered event queue, droptail
//! links and the seeded random stream.

mod link;
mod queue;
mod rng;
mod time;

pub use link::{Enqueue, Link, LinkStats, Packet, TransmitDone, ACK_BYTES, DATA_BYTES, MSS_BYTES};
pub use queue::{EventQueue, SimError};
pub use rng::{seeded_rng, SeededRng, RNG_ALGORITHM};
pub use time::SimTime;
