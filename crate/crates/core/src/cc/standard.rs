//! Standard single-path TCP responses the coupled laws defer to.

use super::{Phase, SubflowCcState, MIN_CWND, MIN_SSTHRESH};

/// Slow start: one segment of growth per acknowledged segment.
pub fn slow_start_ack(state: &SubflowCcState) -> SubflowCcState {
    let mut next = state.clone();
    if next.cwnd < next.ssthresh {
        next.cwnd += 1.0;
    }
    if next.cwnd >= next.ssthresh {
        next.phase = Phase::CongestionAvoidance;
    }
    next
}

/// Reno congestion avoidance: 1/w per acknowledged segment. Returns the new
/// window.
pub fn reno_on_ack(state: &SubflowCcState) -> f64 {
    state.cwnd + 1.0 / state.cwnd
}

/// Multiplicative decrease by one half, with loss-interval bookkeeping.
pub fn standard_loss_halve(state: &SubflowCcState) -> SubflowCcState {
    let mut next = state.clone();
    next.cwnd = (state.cwnd / 2.0).max(MIN_CWND);
    next.ssthresh = next.cwnd.max(MIN_SSTHRESH);
    next.rotate_loss_interval();
    next
}

/// Retransmission timeout: threshold to half the window, window to one
/// segment, back to slow start.
pub fn timeout_collapse(state: &SubflowCcState) -> SubflowCcState {
    let mut next = state.clone();
    next.ssthresh = (state.cwnd / 2.0).max(MIN_SSTHRESH);
    next.cwnd = MIN_CWND;
    next.phase = Phase::SlowStart;
    next.rotate_loss_interval();
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slow_start_grows_by_one() {
        let s = SubflowCcState::new(2.0).with_ssthresh(64.0);
        let s = slow_start_ack(&s);
        assert_eq!(s.cwnd, 3.0);
        assert_eq!(s.phase, Phase::SlowStart);
    }

    #[test]
    fn slow_start_crossing_threshold_flips_phase() {
        let s = SubflowCcState::new(63.5).with_ssthresh(64.0);
        let s = slow_start_ack(&s);
        assert_eq!(s.cwnd, 64.5);
        assert_eq!(s.phase, Phase::CongestionAvoidance);
    }

    #[test]
    fn slow_start_at_threshold_enters_avoidance_immediately() {
        let s = SubflowCcState::new(10.0).with_ssthresh(10.0);
        let s = slow_start_ack(&s);
        assert_eq!(s.phase, Phase::CongestionAvoidance);
        assert_eq!(s.cwnd, 10.0);
    }

    #[test]
    fn halving() {
        let s = standard_loss_halve(&SubflowCcState::new(10.0));
        assert_eq!(s.cwnd, 5.0);
        assert_eq!(s.ssthresh, 5.0);
    }

    #[test]
    fn halving_is_floored() {
        let s = standard_loss_halve(&SubflowCcState::new(1.5));
        assert_eq!(s.cwnd, 1.0);
        assert_eq!(s.ssthresh, 2.0);
    }

    #[test]
    fn halving_rotates_loss_interval() {
        let s = SubflowCcState::new(64.0).with_loss_history(1_000_000, 2_000_000);
        let s = standard_loss_halve(&s);
        assert_eq!(s.cwnd, 32.0);
        assert_eq!(s.bytes_since_last_loss, 0);
        assert_eq!(s.bytes_between_last_two_losses, 1_000_000);
    }

    #[test]
    fn timeout_collapses_to_one_segment() {
        let s = SubflowCcState::new(16.0).in_phase(Phase::CongestionAvoidance);
        let s = timeout_collapse(&s);
        assert_eq!(s.ssthresh, 8.0);
        assert_eq!(s.cwnd, 1.0);
        assert_eq!(s.phase, Phase::SlowStart);
    }

    #[test]
    fn reno_increment_is_inverse_window() {
        assert!((reno_on_ack(&SubflowCcState::new(10.0)) - 10.1).abs() < 1e-12);
    }
}
