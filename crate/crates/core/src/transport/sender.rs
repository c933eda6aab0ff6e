use crate::cc::{update_rtt, Algorithm, ConnectionCcState, Phase, SubflowCcState, SubflowId};
use crate::sim::{SimTime, MSS_BYTES};

use super::{
    Effects, TimerArm, Transmission, TransportError, DUP_ACK_THRESHOLD, INITIAL_CWND, INITIAL_RTO, MAX_RTO, MIN_RTO,
};

/// Sequence-space and timer state of one subflow.
#[derive(Debug, Clone, PartialEq)]
pub struct SubflowTx {
    /// Next segment to transmit. Rewinds to `highest_acked` after a timeout.
    pub next_seq: u64,
    /// One past the highest segment ever transmitted.
    pub high_seq: u64,
    /// Cumulative acknowledgment point: lowest unacknowledged segment.
    pub highest_acked: u64,
    pub dup_ack_count: u32,
    /// Segments known to have left the network during fast recovery.
    pub dup_acks_in_recovery: u64,
    /// Retransmission timeout, seconds.
    pub rto: f64,
    pub rttvar: Option<f64>,
    /// Fast recovery ends once this segment is acknowledged.
    pub recovery_point: Option<u64>,
    /// No new loss event is taken for ACKs below this point.
    pub recover: Option<u64>,
    pub timer_generation: u64,
    pub timer_deadline: Option<SimTime>,
    pub retransmits: u64,
    pub timeouts: u64,
    pub loss_events: u64,
}

impl Default for SubflowTx {
    fn default() -> Self {
        Self {
            next_seq: 0,
            high_seq: 0,
            highest_acked: 0,
            dup_ack_count: 0,
            dup_acks_in_recovery: 0,
            rto: INITIAL_RTO,
            rttvar: None,
            recovery_point: None,
            recover: None,
            timer_generation: 0,
            timer_deadline: None,
            retransmits: 0,
            timeouts: 0,
            loss_events: 0,
        }
    }
}

impl SubflowTx {
    /// Segments sent and not cumulatively acknowledged.
    pub fn outstanding(&self) -> u64 {
        self.next_seq.saturating_sub(self.highest_acked)
    }

    /// Estimate of segments still in the network: outstanding minus those
    /// reported by duplicate ACKs during recovery.
    pub fn in_flight(&self) -> u64 {
        self.outstanding().saturating_sub(self.dup_acks_in_recovery)
    }

    fn has_unacked(&self) -> bool {
        self.high_seq > self.highest_acked
    }
}

/// One (multipath or single-path) connection with an infinite backlog.
#[derive(Debug, Clone)]
pub struct MpConnection {
    pub flow: usize,
    pub txs: Vec<SubflowTx>,
    pub cc: ConnectionCcState,
    pub active: bool,
    pub delivered_segments: u64,
}

impl MpConnection {
    pub fn new(flow: usize, algorithm: Algorithm, subflows: usize, alpha_total: f64) -> Self {
        assert!(subflows > 0, "a connection needs at least one subflow");
        let cc = ConnectionCcState::new(
            algorithm,
            (0..subflows).map(|_| SubflowCcState::new(INITIAL_CWND)).collect(),
        )
        .with_alpha_total(alpha_total);
        Self {
            flow,
            txs: vec![SubflowTx::default(); subflows],
            cc,
            active: false,
            delivered_segments: 0,
        }
    }

    pub fn subflow_ids(&self) -> impl Iterator<Item = SubflowId> {
        (0..self.txs.len()).map(SubflowId)
    }

    /// Opens the connection and fills the initial windows.
    pub fn start(&mut self, now: SimTime, effects: &mut Effects) {
        self.active = true;
        self.pump(now, effects);
    }

    pub fn record_delivered(&mut self, segments: u64) {
        self.delivered_segments += segments;
    }

    /// Picks the subflow for the next segment: the lowest-srtt subflow with
    /// window space, ties to the lowest id, unmeasured subflows last.
    pub fn schedule_next(&self) -> Option<SubflowId> {
        if !self.active {
            return None;
        }
        let mut pick: Option<(f64, SubflowId)> = None;
        for (i, (tx, cc)) in self.txs.iter().zip(&self.cc.subflows).enumerate() {
            if (tx.in_flight() as f64) >= cc.cwnd {
                continue;
            }
            let srtt = cc.srtt.unwrap_or(f64::INFINITY);
            if pick.is_none_or(|(best, _)| srtt < best) {
                pick = Some((srtt, SubflowId(i)));
            }
        }
        pick.map(|(_, r)| r)
    }

    /// Sends new data while any subflow has window space.
    pub fn pump(&mut self, now: SimTime, effects: &mut Effects) {
        while let Some(r) = self.schedule_next() {
            self.send_next(r, now, effects);
        }
    }

    fn send_next(&mut self, r: SubflowId, now: SimTime, effects: &mut Effects) {
        let tx = &mut self.txs[r.0];
        let seq = tx.next_seq;
        let retransmission = seq < tx.high_seq;
        tx.next_seq += 1;
        if !retransmission {
            tx.high_seq = tx.next_seq;
            self.cc.subflows[r.0].on_bytes_sent(u64::from(MSS_BYTES));
        } else {
            tx.retransmits += 1;
        }
        effects.transmissions.push(Transmission {
            subflow: r,
            seq,
            retransmission,
        });
        self.arm_timer_if_idle(r, now, effects);
    }

    fn retransmit(&mut self, r: SubflowId, seq: u64, now: SimTime, effects: &mut Effects) {
        self.txs[r.0].retransmits += 1;
        effects.transmissions.push(Transmission {
            subflow: r,
            seq,
            retransmission: true,
        });
        self.arm_timer_if_idle(r, now, effects);
    }

    fn arm_timer(&mut self, r: SubflowId, now: SimTime, effects: &mut Effects) {
        let tx = &mut self.txs[r.0];
        tx.timer_generation += 1;
        let deadline = now + SimTime::from_secs_f64(tx.rto);
        tx.timer_deadline = Some(deadline);
        effects.timers.push(TimerArm {
            subflow: r,
            generation: tx.timer_generation,
            deadline,
        });
    }

    fn arm_timer_if_idle(&mut self, r: SubflowId, now: SimTime, effects: &mut Effects) {
        if self.txs[r.0].timer_deadline.is_none() {
            self.arm_timer(r, now, effects);
        }
    }

    fn cancel_timer(&mut self, r: SubflowId) {
        let tx = &mut self.txs[r.0];
        tx.timer_generation += 1;
        tx.timer_deadline = None;
    }

    fn sample_rtt(&mut self, r: SubflowId, sample: f64) -> Result<(), TransportError> {
        let cc = &mut self.cc.subflows[r.0];
        let tx = &mut self.txs[r.0];
        let rttvar = match (tx.rttvar, cc.srtt) {
            (Some(var), Some(srtt)) => 0.75 * var + 0.25 * (srtt - sample).abs(),
            _ => sample / 2.0,
        };
        *cc = update_rtt(cc, sample)?;
        tx.rttvar = Some(rttvar);
        let srtt = cc.srtt.expect("just updated");
        tx.rto = (srtt + 4.0 * rttvar).clamp(MIN_RTO, MAX_RTO);
        Ok(())
    }

    /// Processes a cumulative ACK for subflow `r`. `echo` is the send time
    /// of the data segment that triggered it.
    pub fn on_ack_receipt(
        &mut self,
        r: SubflowId,
        ack: u64,
        echo: SimTime,
        now: SimTime,
        effects: &mut Effects,
    ) -> Result<(), TransportError> {
        let tx = &self.txs[r.0];
        if ack < tx.highest_acked || ack > tx.high_seq {
            // stale or bogus
            return Ok(());
        }
        if ack > tx.highest_acked {
            self.on_new_ack(r, ack, echo, now, effects)?;
        } else if tx.has_unacked() {
            self.on_dup_ack(r, now, effects)?;
        }
        self.pump(now, effects);
        Ok(())
    }

    fn on_new_ack(
        &mut self,
        r: SubflowId,
        ack: u64,
        echo: SimTime,
        now: SimTime,
        effects: &mut Effects,
    ) -> Result<(), TransportError> {
        if now > echo {
            self.sample_rtt(r, (now - echo).as_secs_f64())?;
        }
        let tx = &mut self.txs[r.0];
        let acked = ack - tx.highest_acked;
        tx.highest_acked = ack;
        tx.next_seq = tx.next_seq.max(ack);
        tx.dup_ack_count = 0;

        let phase = self.cc.subflows[r.0].phase;
        if phase == Phase::FastRecovery {
            let point = tx.recovery_point.unwrap_or(0);
            if ack >= point {
                tx.recovery_point = None;
                tx.dup_acks_in_recovery = 0;
                self.cc.exit_recovery(r)?;
            } else {
                // partial ACK: the next hole is lost too
                tx.dup_acks_in_recovery = tx.dup_acks_in_recovery.saturating_sub(acked - 1);
                self.retransmit(r, ack, now, effects);
            }
        } else {
            for _ in 0..acked {
                self.cc.on_ack(r)?;
            }
        }

        let marker = self.cc.subflows[r.0].round_marker;
        if ack >= marker {
            if self.cc.on_round_end(r)? {
                effects.round_updates += 1;
            }
            let tx = &self.txs[r.0];
            self.cc.subflows[r.0].round_marker = tx.high_seq.max(tx.highest_acked + 1);
        }

        if self.txs[r.0].has_unacked() {
            self.arm_timer(r, now, effects);
        } else {
            self.cancel_timer(r);
        }
        Ok(())
    }

    fn on_dup_ack(&mut self, r: SubflowId, now: SimTime, effects: &mut Effects) -> Result<(), TransportError> {
        let tx = &mut self.txs[r.0];
        tx.dup_ack_count += 1;
        if self.cc.subflows[r.0].phase == Phase::FastRecovery {
            tx.dup_acks_in_recovery += 1;
            return Ok(());
        }
        let fresh = tx.recover.is_none_or(|rec| tx.highest_acked >= rec);
        if tx.dup_ack_count == DUP_ACK_THRESHOLD && fresh {
            tx.recovery_point = Some(tx.high_seq);
            tx.recover = Some(tx.high_seq);
            tx.dup_acks_in_recovery = u64::from(DUP_ACK_THRESHOLD);
            tx.loss_events += 1;
            let lost = tx.highest_acked;
            self.cc.on_loss(r)?;
            effects.loss_events += 1;
            self.retransmit(r, lost, now, effects);
        }
        Ok(())
    }

    /// Retransmission timer expiry. Stale generations are ignored.
    pub fn on_rto(
        &mut self,
        r: SubflowId,
        generation: u64,
        now: SimTime,
        effects: &mut Effects,
    ) -> Result<(), TransportError> {
        let tx = &mut self.txs[r.0];
        if generation != tx.timer_generation || tx.timer_deadline.is_none() {
            return Ok(());
        }
        tx.timer_deadline = None;
        if !tx.has_unacked() {
            return Ok(());
        }
        tx.timeouts += 1;
        tx.rto = (tx.rto * 2.0).min(MAX_RTO);
        tx.recover = Some(tx.high_seq);
        tx.recovery_point = None;
        tx.dup_ack_count = 0;
        tx.dup_acks_in_recovery = 0;
        // go-back-N from the first unacknowledged segment
        tx.next_seq = tx.highest_acked;
        self.cc.on_timeout(r)?;
        self.send_next(r, now, effects);
        self.pump(now, effects);
        Ok(())
    }
}
