//! Opportunistic linked increases.

use std::collections::BTreeSet;

use super::{rate_sum, reno_on_ack, ConnectionCcState, Result, SubflowId};

/// Subflow classification used to shift window between paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OliaSets {
    /// Subflows with the largest window.
    pub largest: BTreeSet<SubflowId>,
    /// Subflows with the largest loss-interval byte count ℓ.
    pub best: BTreeSet<SubflowId>,
    /// Best subflows that do not have the largest window.
    pub collected: BTreeSet<SubflowId>,
}

fn argmax<F: Fn(usize) -> f64>(n: usize, key: F) -> BTreeSet<SubflowId> {
    let top = (0..n).map(&key).fold(f64::NEG_INFINITY, f64::max);
    (0..n).filter(|&i| key(i) == top).map(SubflowId).collect()
}

pub fn olia_classify(conn: &ConnectionCcState) -> OliaSets {
    let n = conn.subflows.len();
    let largest = argmax(n, |i| conn.subflows[i].cwnd);
    let best = argmax(n, |i| conn.subflows[i].loss_interval_bytes() as f64);
    let collected = best.difference(&largest).copied().collect();
    OliaSets {
        largest,
        best,
        collected,
    }
}

/// Signed α_r: positive on collected subflows, negative on the largest ones
/// while some collected subflow exists, zero otherwise. The mass 1/|R| is
/// split evenly inside each set, so the α_r sum to zero.
pub fn olia_alpha(conn: &ConnectionCcState, r: SubflowId, sets: &OliaSets) -> f64 {
    let share = 1.0 / conn.subflows.len() as f64;
    if sets.collected.contains(&r) {
        share / sets.collected.len() as f64
    } else if sets.largest.contains(&r) && !sets.collected.is_empty() {
        -share / sets.largest.len() as f64
    } else {
        0.0
    }
}

/// Per-ACK update: w_r + (w_r/τ_r²)/(Σ_k w_k/τ_k)² + α_r/w_r, floored at one
/// segment.
pub fn olia_on_ack(conn: &ConnectionCcState, r: SubflowId) -> Result<f64> {
    let sf = conn.subflow(r)?;
    let Some(tau) = sf.srtt else {
        return Ok(reno_on_ack(sf));
    };
    let sets = olia_classify(conn);
    let alpha = olia_alpha(conn, r, &sets);
    let denom = rate_sum(conn);
    let w = sf.cwnd;
    let next = w + (w / (tau * tau)) / (denom * denom) + alpha / w;
    Ok(next.max(super::MIN_CWND))
}
