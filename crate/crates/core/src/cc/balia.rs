//! Balanced linked adaptation.

use super::{
    rate_sum, reno_on_ack, standard_loss_halve, CcError, ConnectionCcState, Result, SubflowCcState, SubflowId,
    MIN_CWND, MIN_SSTHRESH,
};

fn rate(conn: &ConnectionCcState, r: SubflowId) -> Result<f64> {
    let sf = conn.subflow(r)?;
    let tau = sf
        .srtt
        .ok_or_else(|| CcError::InvalidState(format!("subflow {r} has no RTT estimate")))?;
    Ok(sf.cwnd / tau)
}

/// α_r = max_k x_k / x_r with x_k = w_k/τ_k. At least one, and exactly one
/// on the fastest subflow.
pub fn balia_alpha(conn: &ConnectionCcState, r: SubflowId) -> Result<f64> {
    let x_r = rate(conn, r)?;
    let x_max = super::measured(conn)
        .map(|(w, tau)| w / tau)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(x_max / x_r)
}

/// Per-ACK update: w_r + (x_r/τ_r)/(Σ_k x_k)² · (1+α_r)/2 · (4+α_r)/5.
pub fn balia_on_ack(conn: &ConnectionCcState, r: SubflowId) -> Result<f64> {
    let sf = conn.subflow(r)?;
    let Some(tau) = sf.srtt else {
        return Ok(reno_on_ack(sf));
    };
    let alpha = balia_alpha(conn, r)?;
    let x_r = sf.cwnd / tau;
    let sum = rate_sum(conn);
    let inc = (x_r / tau) / (sum * sum) * ((1.0 + alpha) / 2.0) * ((4.0 + alpha) / 5.0);
    Ok(sf.cwnd + inc)
}

/// Loss response: w_r − (w_r/2)·min(α_r, 3/2), floored at one segment.
pub fn balia_on_loss(conn: &ConnectionCcState, r: SubflowId) -> Result<SubflowCcState> {
    let sf = conn.subflow(r)?;
    if sf.srtt.is_none() {
        return Ok(standard_loss_halve(sf));
    }
    let alpha = balia_alpha(conn, r)?;
    let mut next = sf.clone();
    next.cwnd = (sf.cwnd - sf.cwnd / 2.0 * alpha.min(1.5)).max(MIN_CWND);
    next.ssthresh = next.cwnd.max(MIN_SSTHRESH);
    next.rotate_loss_interval();
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::Algorithm;

    fn conn(spec: &[(f64, f64)]) -> ConnectionCcState {
        ConnectionCcState::new(
            Algorithm::Balia,
            spec.iter()
                .map(|&(w, tau)| SubflowCcState::new(w).with_rtt(tau))
                .collect(),
        )
    }

    #[test]
    fn alpha_values() {
        assert_eq!(balia_alpha(&conn(&[(10.0, 0.1)]), SubflowId(0)).unwrap(), 1.0);
        let c = conn(&[(10.0, 0.1), (10.0, 0.1)]);
        assert_eq!(balia_alpha(&c, SubflowId(0)).unwrap(), 1.0);
        assert_eq!(balia_alpha(&c, SubflowId(1)).unwrap(), 1.0);
        let c = conn(&[(20.0, 0.1), (10.0, 0.1)]);
        assert_eq!(balia_alpha(&c, SubflowId(0)).unwrap(), 1.0);
        assert_eq!(balia_alpha(&c, SubflowId(1)).unwrap(), 2.0);
    }

    #[test]
    fn increments() {
        let c = conn(&[(10.0, 0.1)]);
        assert!((balia_on_ack(&c, SubflowId(0)).unwrap() - 10.1).abs() < 1e-12);
        let c = conn(&[(10.0, 0.1), (10.0, 0.1)]);
        assert!((balia_on_ack(&c, SubflowId(1)).unwrap() - 10.025).abs() < 1e-12);
        let c = conn(&[(10.0, 0.1), (10.0, 0.2)]);
        assert!((balia_on_ack(&c, SubflowId(1)).unwrap() - 10.02).abs() < 1e-12);
    }

    fn loss_with_alpha(w: f64, alpha: f64) -> SubflowCcState {
        // second subflow is the fastest; first runs at 1/alpha of its rate
        let c = conn(&[(w, 0.1 * alpha), (w, 0.1)]);
        assert!((balia_alpha(&c, SubflowId(0)).unwrap() - alpha).abs() < 1e-12);
        balia_on_loss(&c, SubflowId(0)).unwrap()
    }

    #[test]
    fn loss_responses() {
        assert_eq!(loss_with_alpha(10.0, 1.0).cwnd, 5.0);
        assert!((loss_with_alpha(10.0, 2.0).cwnd - 2.5).abs() < 1e-12);
        assert_eq!(loss_with_alpha(2.0, 3.0).cwnd, 1.0);
        assert_eq!(loss_with_alpha(2.0, 3.0).ssthresh, 2.0);
    }

    #[test]
    fn unmeasured_alpha_is_an_error() {
        let c = ConnectionCcState::new(Algorithm::Balia, vec![SubflowCcState::new(3.0)]);
        assert!(balia_alpha(&c, SubflowId(0)).is_err());
        assert_eq!(balia_on_loss(&c, SubflowId(0)).unwrap().cwnd, 1.5);
    }
}
