//! Weighted Vegas: delay-based, once per transmission round.

use super::{CcError, ConnectionCcState, Result, SubflowCcState, SubflowId, MIN_CWND};

fn round_rtts(state: &SubflowCcState) -> Result<(f64, f64)> {
    match (state.rtt_min, state.rtt_round_avg) {
        (Some(base), Some(avg)) => Ok((base, avg)),
        _ => Err(CcError::InvalidState("no RTT sample yet".into())),
    }
}

/// Backlog estimate δ = (w/τ̂ − w/τ̄)·τ̂, in segments.
pub fn wvegas_delta(state: &SubflowCcState) -> Result<f64> {
    let (base, avg) = round_rtts(state)?;
    let w = state.cwnd;
    Ok(((w / base - w / avg) * base).max(0.0))
}

/// Rate shares ω_r = x_r / Σ x_k with x_k = w_k/τ̄_k. Subflows without a
/// round average get weight zero.
pub fn wvegas_weights(conn: &ConnectionCcState) -> Result<Vec<f64>> {
    let rates: Vec<f64> = conn
        .subflows
        .iter()
        .map(|s| s.rtt_round_avg.map_or(0.0, |avg| s.cwnd / avg))
        .collect();
    let sum: f64 = rates.iter().sum();
    if sum <= 0.0 {
        return Err(CcError::InvalidState("no subflow has a round RTT".into()));
    }
    Ok(rates.into_iter().map(|x| x / sum).collect())
}

/// End-of-round update for subflow `r`:
///
/// 1. if δ > α_r, retarget α_r to ω_r·α_total;
/// 2. step the window by one segment toward δ = α_r;
/// 3. track the minimum queueing delay q_r = min(τ̄ − τ̂);
/// 4. if the queueing delay reached twice q_r, scale the window by
///    τ̂/(2τ̄) and forget q_r.
///
/// A stored q_r of zero counts as unmeasured, and a round with no queueing
/// never backs off.
pub fn wvegas_on_round(conn: &ConnectionCcState, r: SubflowId) -> Result<SubflowCcState> {
    let sf = conn.subflow(r)?;
    let (base, avg) = round_rtts(sf)?;
    let mut next = sf.clone();

    let delta = wvegas_delta(sf)?;
    if delta > next.vegas_alpha {
        next.vegas_alpha = wvegas_weights(conn)?[r.0] * conn.alpha_total;
    }

    if delta > next.vegas_alpha {
        next.cwnd -= 1.0;
    } else if delta < next.vegas_alpha {
        next.cwnd += 1.0;
    }
    next.cwnd = next.cwnd.max(MIN_CWND);

    let queueing = (avg - base).max(0.0);
    let q = match next.queue_delay_est {
        Some(q) if q > 0.0 && q <= queueing => q,
        _ => queueing,
    };
    next.queue_delay_est = Some(q);

    if queueing > 0.0 && queueing >= 2.0 * q {
        next.cwnd = (next.cwnd * base / (2.0 * avg)).max(MIN_CWND);
        next.queue_delay_est = None;
    }

    next.reset_round();
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::{Algorithm, Phase};

    fn one(state: SubflowCcState) -> ConnectionCcState {
        ConnectionCcState::new(Algorithm::WVegas, vec![state.in_phase(Phase::CongestionAvoidance)])
    }

    #[test]
    fn delta_values() {
        let s = SubflowCcState::new(10.0).with_rtts(0.1, 0.1, 0.1);
        assert_eq!(wvegas_delta(&s).unwrap(), 0.0);
        let s = SubflowCcState::new(10.0).with_rtts(0.1, 0.1, 0.125);
        assert!((wvegas_delta(&s).unwrap() - 2.0).abs() < 1e-12);
        let s = SubflowCcState::new(20.0).with_rtts(0.1, 0.05, 0.1);
        assert!((wvegas_delta(&s).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn weights() {
        let c = one(SubflowCcState::new(10.0).with_rtt(0.1));
        assert_eq!(wvegas_weights(&c).unwrap(), vec![1.0]);
        let c = ConnectionCcState::new(
            Algorithm::WVegas,
            vec![
                SubflowCcState::new(30.0).with_rtt(0.1),
                SubflowCcState::new(10.0).with_rtt(0.1),
            ],
        );
        let w = wvegas_weights(&c).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-12 && (w[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn empty_queue_grows_without_backoff() {
        let c = one(SubflowCcState::new(10.0).with_rtt(0.1));
        let s = wvegas_on_round(&c, SubflowId(0)).unwrap();
        assert_eq!(s.cwnd, 11.0);
        assert_eq!(s.queue_delay_est, Some(0.0));
    }

    #[test]
    fn queue_growth_triggers_backoff() {
        let mut s = SubflowCcState::new(12.0).with_rtts(0.3, 0.1, 0.3);
        s.queue_delay_est = Some(0.05);
        // delta = 8 equals alpha: the window holds before the backoff
        s.vegas_alpha = 8.0;
        let s = wvegas_on_round(&one(s), SubflowId(0)).unwrap();
        assert!((s.cwnd - 2.0).abs() < 1e-12);
        assert_eq!(s.queue_delay_est, None);
    }

    #[test]
    fn first_round_measures_queue_without_backoff() {
        let s = SubflowCcState::new(10.0).with_rtts(0.15, 0.1, 0.15);
        let s = wvegas_on_round(&one(s), SubflowId(0)).unwrap();
        assert!((s.queue_delay_est.unwrap() - 0.05).abs() < 1e-12);
        assert!(s.cwnd >= 9.0);
    }

    #[test]
    fn large_delta_retargets_alpha_then_backs_down() {
        let c = ConnectionCcState::new(
            Algorithm::WVegas,
            vec![
                SubflowCcState::new(20.0).with_rtts(0.1, 0.05, 0.1),
                SubflowCcState::new(20.0).with_rtts(0.1, 0.05, 0.1),
            ],
        );
        // delta = 10 > 2 -> alpha = 0.5 * 10 = 5 -> still above -> cwnd - 1
        let s = wvegas_on_round(&c, SubflowId(0)).unwrap();
        assert!((s.vegas_alpha - 5.0).abs() < 1e-12);
        assert_eq!(s.cwnd, 19.0);
    }

    #[test]
    fn unmeasured_round_is_invalid_state() {
        let c = one(SubflowCcState::new(10.0));
        assert!(matches!(
            wvegas_on_round(&c, SubflowId(0)),
            Err(CcError::InvalidState(_))
        ));
    }
}
