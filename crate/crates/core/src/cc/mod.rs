//! Coupled congestion avoidance for multipath connections.
//!
//! Every law in this module is a pure function of a [`ConnectionCcState`]
//! (or a single [`SubflowCcState`]) that returns the updated window or state
//! without touching its input. [`ConnectionCcState::on_ack`],
//! [`ConnectionCcState::on_loss`], [`ConnectionCcState::on_round_end`] and
//! [`ConnectionCcState::on_timeout`] are the dispatch surface used by the
//! transport: they pick the law for the configured [`Algorithm`] and phase
//! and write the result back.
//!
//! Windows are real-valued and measured in segments. Times are seconds.

mod balia;
mod lia;
mod olia;
mod standard;
mod state;
mod wvegas;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use balia::{balia_alpha, balia_on_ack, balia_on_loss};
pub use lia::{lia_alpha, lia_on_ack};
pub use olia::{olia_alpha, olia_classify, olia_on_ack, OliaSets};
pub use standard::{reno_on_ack, slow_start_ack, standard_loss_halve, timeout_collapse};
pub use state::{update_rtt, ConnectionCcState, Phase, SubflowCcState, SubflowId};
pub use wvegas::{wvegas_delta, wvegas_on_round, wvegas_weights};

/// Smallest congestion window, in segments.
pub const MIN_CWND: f64 = 1.0;
/// Smallest slow-start threshold, in segments.
pub const MIN_SSTHRESH: f64 = 2.0;
/// Default aggregate wVegas backlog target, in segments.
pub const DEFAULT_ALPHA_TOTAL: f64 = 10.0;
/// Per-subflow wVegas backlog target before the first weight adjustment.
pub const DEFAULT_INITIAL_VEGAS_ALPHA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("no such subflow {0}")]
    NoSuchSubflow(SubflowId),
}

pub type Result<T, E = CcError> = std::result::Result<T, E>;

/// Congestion-avoidance law applied to every subflow of a connection.
///
/// `Reno` runs each subflow as an independent standard TCP (the uncoupled
/// baseline, and the law used by single-path competitors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Reno,
    Lia,
    Olia,
    Balia,
    #[serde(rename = "wvegas")]
    WVegas,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Reno,
        Algorithm::Lia,
        Algorithm::Olia,
        Algorithm::Balia,
        Algorithm::WVegas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Reno => "reno",
            Algorithm::Lia => "lia",
            Algorithm::Olia => "olia",
            Algorithm::Balia => "balia",
            Algorithm::WVegas => "wvegas",
        }
    }

    pub fn is_coupled(self) -> bool {
        !matches!(self, Algorithm::Reno)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CcError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| CcError::InvalidInput(format!("unknown algorithm {s:?}")))
    }
}

/// `(cwnd, srtt)` of every subflow that has an RTT estimate. Subflows
/// without a sample yet take no part in the coupled sums.
pub(crate) fn measured(conn: &ConnectionCcState) -> impl Iterator<Item = (f64, f64)> + '_ {
    conn.subflows.iter().filter_map(|s| s.srtt.map(|tau| (s.cwnd, tau)))
}

/// Σ_k w_k / τ_k over measured subflows.
pub(crate) fn rate_sum(conn: &ConnectionCcState) -> f64 {
    measured(conn).map(|(w, tau)| w / tau).sum()
}

impl ConnectionCcState {
    /// Applies one acknowledged segment on subflow `r`.
    pub fn on_ack(&mut self, r: SubflowId) -> Result<()> {
        let sf = self.subflow(r)?;
        match sf.phase {
            Phase::SlowStart => {
                let next = slow_start_ack(sf);
                *self.subflow_mut(r)? = next;
            }
            Phase::CongestionAvoidance => {
                let cwnd = match self.algorithm {
                    Algorithm::Reno => reno_on_ack(sf),
                    Algorithm::Lia => lia_on_ack(self, r)?,
                    Algorithm::Olia => olia_on_ack(self, r)?,
                    Algorithm::Balia => balia_on_ack(self, r)?,
                    // wVegas moves its window once per round, not per ACK.
                    Algorithm::WVegas => sf.cwnd,
                };
                self.subflow_mut(r)?.cwnd = cwnd.max(MIN_CWND);
            }
            Phase::FastRecovery => {}
        }
        Ok(())
    }

    /// Applies a loss event (fast retransmit) on subflow `r` and enters fast
    /// recovery.
    pub fn on_loss(&mut self, r: SubflowId) -> Result<()> {
        let mut next = match self.algorithm {
            Algorithm::Balia => balia_on_loss(self, r)?,
            _ => standard_loss_halve(self.subflow(r)?),
        };
        next.phase = Phase::FastRecovery;
        *self.subflow_mut(r)? = next;
        Ok(())
    }

    /// Leaves fast recovery once the recovery point is acknowledged.
    pub fn exit_recovery(&mut self, r: SubflowId) -> Result<()> {
        let sf = self.subflow_mut(r)?;
        if sf.phase == Phase::FastRecovery {
            sf.phase = Phase::CongestionAvoidance;
        }
        Ok(())
    }

    /// Retransmission timeout on subflow `r`.
    pub fn on_timeout(&mut self, r: SubflowId) -> Result<()> {
        let next = timeout_collapse(self.subflow(r)?);
        *self.subflow_mut(r)? = next;
        Ok(())
    }

    /// Closes the current transmission round of subflow `r`. Only wVegas in
    /// congestion avoidance acts on round boundaries; every other case just
    /// resets the per-round RTT statistics.
    ///
    /// Returns true when the wVegas round law ran.
    pub fn on_round_end(&mut self, r: SubflowId) -> Result<bool> {
        let sf = self.subflow(r)?;
        if self.algorithm == Algorithm::WVegas
            && sf.phase == Phase::CongestionAvoidance
            && sf.rtt_min.is_some()
            && sf.rtt_round_avg.is_some()
            && sf.round_rtt_samples > 0
        {
            let next = wvegas_on_round(self, r)?;
            *self.subflow_mut(r)? = next;
            Ok(true)
        } else {
            self.subflow_mut(r)?.reset_round();
            Ok(false)
        }
    }
}
