//! Deterministic packet-level simulator for coupled multipath congestion
//! control (LIA, OLIA, BALIA, wVegas) with scenario and metric tooling.

pub mod cc;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod sim;
pub mod transport;
