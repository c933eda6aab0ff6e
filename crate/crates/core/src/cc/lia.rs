//! Linked increases.

use super::{measured, rate_sum, reno_on_ack, CcError, ConnectionCcState, Result, SubflowId};

/// Aggressiveness factor α = w_total · max_k(w_k/τ_k²) / (Σ_k w_k/τ_k)².
pub fn lia_alpha(conn: &ConnectionCcState) -> Result<f64> {
    let mut w_total = 0.0;
    let mut best = f64::NEG_INFINITY;
    for (w, tau) in measured(conn) {
        w_total += w;
        best = best.max(w / (tau * tau));
    }
    if w_total == 0.0 {
        return Err(CcError::InvalidState("no subflow has an RTT estimate".into()));
    }
    let denom = rate_sum(conn);
    Ok(w_total * best / (denom * denom))
}

/// Per-ACK increase: w_r + min(α/w_total, 1/w_r). A subflow without an RTT
/// estimate grows like Reno.
pub fn lia_on_ack(conn: &ConnectionCcState, r: SubflowId) -> Result<f64> {
    let sf = conn.subflow(r)?;
    if sf.srtt.is_none() {
        return Ok(reno_on_ack(sf));
    }
    let alpha = lia_alpha(conn)?;
    let w_total: f64 = measured(conn).map(|(w, _)| w).sum();
    Ok(sf.cwnd + (alpha / w_total).min(1.0 / sf.cwnd))
}
