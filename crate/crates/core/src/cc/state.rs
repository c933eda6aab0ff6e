use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CcError, Result, DEFAULT_ALPHA_TOTAL, DEFAULT_INITIAL_VEGAS_ALPHA, MIN_CWND, MIN_SSTHRESH};

/// Index of a subflow within its connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubflowId(pub usize);

impl fmt::Display for SubflowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    SlowStart,
    CongestionAvoidance,
    FastRecovery,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::SlowStart => "slow_start",
            Phase::CongestionAvoidance => "congestion_avoidance",
            Phase::FastRecovery => "fast_recovery",
        }
    }
}

/// Congestion variables of one subflow.
#[derive(Debug, Clone, PartialEq)]
pub struct SubflowCcState {
    /// Congestion window, segments.
    pub cwnd: f64,
    /// Slow-start threshold, segments.
    pub ssthresh: f64,
    /// Smoothed RTT, `None` until the first sample.
    pub srtt: Option<f64>,
    /// Lifetime minimum RTT (base RTT).
    pub rtt_min: Option<f64>,
    /// Mean RTT of the current round, or of the last round with samples.
    pub rtt_round_avg: Option<f64>,
    /// Samples folded into `rtt_round_avg` during the current round.
    pub round_rtt_samples: u32,
    pub bytes_since_last_loss: u64,
    pub bytes_between_last_two_losses: u64,
    /// Minimum queueing delay since the last wVegas backoff. `None` until
    /// measured.
    pub queue_delay_est: Option<f64>,
    /// wVegas per-subflow backlog target, segments.
    pub vegas_alpha: f64,
    pub phase: Phase,
    /// Sequence number that closes the current round once acknowledged.
    pub round_marker: u64,
}

impl SubflowCcState {
    /// Fresh subflow in slow start with an unbounded threshold.
    pub fn new(cwnd: f64) -> Self {
        Self {
            cwnd: cwnd.max(MIN_CWND),
            ssthresh: f64::MAX,
            srtt: None,
            rtt_min: None,
            rtt_round_avg: None,
            round_rtt_samples: 0,
            bytes_since_last_loss: 0,
            bytes_between_last_two_losses: 0,
            queue_delay_est: None,
            vegas_alpha: DEFAULT_INITIAL_VEGAS_ALPHA,
            phase: Phase::SlowStart,
            round_marker: 0,
        }
    }

    /// Sets smoothed, minimum and round-average RTT to the same value.
    pub fn with_rtt(self, rtt: f64) -> Self {
        self.with_rtts(rtt, rtt, rtt)
    }

    pub fn with_rtts(mut self, srtt: f64, rtt_min: f64, rtt_round_avg: f64) -> Self {
        self.srtt = Some(srtt);
        self.rtt_min = Some(rtt_min);
        self.rtt_round_avg = Some(rtt_round_avg);
        self.round_rtt_samples = 1;
        self
    }

    pub fn with_ssthresh(mut self, ssthresh: f64) -> Self {
        self.ssthresh = ssthresh.max(MIN_SSTHRESH);
        self
    }

    pub fn with_loss_history(mut self, since_last: u64, between_last_two: u64) -> Self {
        self.bytes_since_last_loss = since_last;
        self.bytes_between_last_two_losses = between_last_two;
        self
    }

    pub fn in_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// ℓ_r: the larger of the two loss-interval byte counts.
    pub fn loss_interval_bytes(&self) -> u64 {
        self.bytes_since_last_loss.max(self.bytes_between_last_two_losses)
    }

    /// Counts first transmissions toward the current loss interval.
    pub fn on_bytes_sent(&mut self, bytes: u64) {
        self.bytes_since_last_loss = self.bytes_since_last_loss.saturating_add(bytes);
    }

    /// Rotates the loss-interval counters at a loss event.
    pub(crate) fn rotate_loss_interval(&mut self) {
        self.bytes_between_last_two_losses = self.bytes_since_last_loss;
        self.bytes_since_last_loss = 0;
    }

    pub(crate) fn reset_round(&mut self) {
        self.round_rtt_samples = 0;
    }
}

/// Folds one RTT sample into the estimators of a subflow.
pub fn update_rtt(state: &SubflowCcState, sample: f64) -> Result<SubflowCcState> {
    if !(sample > 0.0 && sample.is_finite()) {
        return Err(CcError::InvalidInput(format!(
            "rtt sample must be positive, got {sample}"
        )));
    }
    let mut next = state.clone();
    next.srtt = Some(match state.srtt {
        Some(srtt) => 0.875 * srtt + 0.125 * sample,
        None => sample,
    });
    next.rtt_min = Some(state.rtt_min.map_or(sample, |m| m.min(sample)));
    next.rtt_round_avg = Some(match (state.rtt_round_avg, state.round_rtt_samples) {
        (Some(avg), n) if n > 0 => avg + (sample - avg) / f64::from(n + 1),
        _ => sample,
    });
    next.round_rtt_samples = state.round_rtt_samples + 1;
    Ok(next)
}

/// The coupled view of one connection.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCcState {
    pub subflows: Vec<SubflowCcState>,
    pub algorithm: super::Algorithm,
    /// wVegas aggregate backlog target, segments.
    pub alpha_total: f64,
}

impl ConnectionCcState {
    pub fn new(algorithm: super::Algorithm, subflows: Vec<SubflowCcState>) -> Self {
        assert!(!subflows.is_empty(), "a connection needs at least one subflow");
        Self {
            subflows,
            algorithm,
            alpha_total: DEFAULT_ALPHA_TOTAL,
        }
    }

    pub fn with_alpha_total(mut self, alpha_total: f64) -> Self {
        self.alpha_total = alpha_total;
        self
    }

    pub fn len(&self) -> usize {
        self.subflows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subflows.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SubflowId> {
        (0..self.subflows.len()).map(SubflowId)
    }

    pub fn subflow(&self, r: SubflowId) -> Result<&SubflowCcState> {
        self.subflows.get(r.0).ok_or(CcError::NoSuchSubflow(r))
    }

    pub fn subflow_mut(&mut self, r: SubflowId) -> Result<&mut SubflowCcState> {
        self.subflows.get_mut(r.0).ok_or(CcError::NoSuchSubflow(r))
    }

    /// w_total, recomputed on every call.
    pub fn total_cwnd(&self) -> f64 {
        self.subflows.iter().map(|s| s.cwnd).sum()
    }
}
