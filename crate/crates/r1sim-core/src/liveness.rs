//! Epoch clock and heartbeat plumbing: per-node uptime models generate
//! liveness-proof emissions, and each oracle independently records how
//! many it received.
//!
//! Only counts matter downstream. Per-oracle delivery loss is i.i.d.
//! across heartbeat slots, so the received count is drawn directly from
//! `Binomial(up_slots, 1 − loss)` instead of simulating every slot.

use crate::ids::NodeId;
use crate::params::{EPOCH_SECONDS, HEARTBEAT_INTERVAL_MAX_S, HEARTBEAT_INTERVAL_MIN_S};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A 24-hour protocol interval. Epoch `e` spans simulated seconds
/// `[e · 86_400, (e+1) · 86_400)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct EpochId(pub u64);

impl EpochId {
    pub fn start_second(self) -> u64 {
        self.0 * EPOCH_SECONDS
    }

    pub fn end_second(self) -> u64 {
        (self.0 + 1) * EPOCH_SECONDS
    }

    pub fn next(self) -> EpochId {
        EpochId(self.0 + 1)
    }
}

impl fmt::Display for EpochId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LivenessError {
    #[error("heartbeat interval {0}s outside the supported 10–15s range")]
    BadInterval(u32),
}

/// Heartbeat slots per epoch for a given emission interval.
pub fn max_heartbeats(interval_s: u32) -> Result<u32, LivenessError> {
    if !(HEARTBEAT_INTERVAL_MIN_S..=HEARTBEAT_INTERVAL_MAX_S).contains(&interval_s) {
        return Err(LivenessError::BadInterval(interval_s));
    }
    Ok((EPOCH_SECONDS / interval_s as u64) as u32)
}

/// Availability process of a node across heartbeat slots.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum UptimeModel {
    AlwaysUp,
    AlwaysDown,
    /// A fixed up-fraction every epoch; the node is up for the first
    /// `floor(fraction × slots)` slots.
    Fixed { fraction: f64 },
    /// Per-epoch up-fractions; epochs past the end of the script are
    /// fully down.
    Scripted { fractions: Vec<f64> },
    /// The whole epoch is up with probability `p_up`, else fully down.
    BernoulliEpoch { p_up: f64 },
    /// Two-state bursty up/down Markov chain with per-slot transition
    /// probabilities.
    GilbertElliott {
        p_fail: f64,
        p_recover: f64,
        #[serde(default = "default_true")]
        start_up: bool,
    },
}

fn default_true() -> bool {
    true
}

/// Runtime state of an uptime model. Gilbert–Elliott dwell times carry
/// across epoch boundaries.
#[derive(Debug, Clone)]
pub struct UptimeState {
    model: UptimeModel,
    ge_up: bool,
    ge_dwell: u64,
}

impl UptimeState {
    pub fn new(model: UptimeModel) -> Self {
        let ge_up = match &model {
            UptimeModel::GilbertElliott { start_up, .. } => *start_up,
            _ => true,
        };
        UptimeState {
            model,
            ge_up,
            ge_dwell: 0,
        }
    }

    /// Number of slots (out of `slots`) the node is up during `epoch`,
    /// advancing any internal chain state.
    pub fn up_slots(&mut self, epoch: EpochId, slots: u32, rng: &mut ChaCha8Rng) -> u32 {
        match &self.model {
            UptimeModel::AlwaysUp => slots,
            UptimeModel::AlwaysDown => 0,
            UptimeModel::Fixed { fraction } => fraction_slots(*fraction, slots),
            UptimeModel::Scripted { fractions } => {
                let f = fractions.get(epoch.0 as usize).copied().unwrap_or(0.0);
                fraction_slots(f, slots)
            }
            UptimeModel::BernoulliEpoch { p_up } => {
                if rng.random_bool(p_up.clamp(0.0, 1.0)) {
                    slots
                } else {
                    0
                }
            }
            UptimeModel::GilbertElliott { p_fail, p_recover, .. } => {
                let (p_fail, p_recover) = (*p_fail, *p_recover);
                let mut remaining = slots as u64;
                let mut up_count = 0u64;
                while remaining > 0 {
                    if self.ge_dwell == 0 {
                        let leave_p = if self.ge_up { p_fail } else { p_recover };
                        self.ge_dwell = geometric_dwell(leave_p, rng);
                    }
                    let take = self.ge_dwell.min(remaining);
                    if self.ge_up {
                        up_count += take;
                    }
                    remaining -= take;
                    self.ge_dwell -= take;
                    if self.ge_dwell == 0 {
                        self.ge_up = !self.ge_up;
                    }
                }
                up_count as u32
            }
        }
    }
}

fn fraction_slots(fraction: f64, slots: u32) -> u32 {
    let f = fraction.clamp(0.0, 1.0);
    ((f * slots as f64).floor() as u32).min(slots)
}

/// Slots spent in the current state before leaving, for a per-slot leave
/// probability `p`. Equivalent in distribution to stepping the chain one
/// slot at a time, but O(transitions) per epoch.
fn geometric_dwell(p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p <= 0.0 {
        return u64::MAX;
    }
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let d = (u.ln() / (1.0 - p).ln()).floor();
    (d as u64).saturating_add(1)
}

/// Count of heartbeats one oracle received out of `up_slots` emissions,
/// each dropped independently with probability `loss`.
pub fn oracle_received(up_slots: u32, loss: f64, rng: &mut ChaCha8Rng) -> u32 {
    if up_slots == 0 || loss >= 1.0 {
        return 0;
    }
    if loss <= 0.0 {
        return up_slots;
    }
    let bin = Binomial::new(up_slots as u64, 1.0 - loss).expect("probability checked");
    bin.sample(rng) as u32
}

/// Per-(oracle, node, epoch) accepted liveness-proof counts plus the
/// per-node uptime trace.
#[derive(Debug, Clone)]
pub struct HeartbeatLog {
    mh: u32,
    counts: BTreeMap<(NodeId, EpochId), Vec<u32>>,
    up_slots: BTreeMap<(NodeId, EpochId), u32>,
}

impl HeartbeatLog {
    pub fn new(mh: u32) -> Self {
        HeartbeatLog {
            mh,
            counts: BTreeMap::new(),
            up_slots: BTreeMap::new(),
        }
    }

    /// Heartbeat slots per epoch (the normalization ceiling).
    pub fn mh(&self) -> u32 {
        self.mh
    }

    pub fn record(&mut self, node: NodeId, epoch: EpochId, up_slots: u32, per_oracle: Vec<u32>) {
        debug_assert!(per_oracle.iter().all(|c| *c <= self.mh));
        self.up_slots.insert((node.clone(), epoch), up_slots);
        self.counts.insert((node, epoch), per_oracle);
    }

    /// Per-oracle counts for a (node, epoch); `None` if the node emitted
    /// nothing that epoch (failed dAuth or not yet joined).
    pub fn counts_for(&self, node: &NodeId, epoch: EpochId) -> Option<&[u32]> {
        self.counts.get(&(node.clone(), epoch)).map(|v| v.as_slice())
    }

    pub fn up_slots_for(&self, node: &NodeId, epoch: EpochId) -> u32 {
        self.up_slots.get(&(node.clone(), epoch)).copied().unwrap_or(0)
    }
}

/// Generate one epoch of heartbeats for `node` and record what each
/// oracle received. Returns `(up_slots, per-oracle counts)`.
///
/// The caller gates on dAuth: nodes failing validation must simply not
/// be emitted for, which is how they accrue nothing.
pub fn emit_and_record(
    log: &mut HeartbeatLog,
    node: &NodeId,
    epoch: EpochId,
    state: &mut UptimeState,
    loss: f64,
    uptime_rng: &mut ChaCha8Rng,
    oracle_rngs: &mut [ChaCha8Rng],
) -> (u32, Vec<u32>) {
    let mh = log.mh();
    let up = state.up_slots(epoch, mh, uptime_rng);
    let per_oracle: Vec<u32> = oracle_rngs
        .iter_mut()
        .map(|rng| oracle_received(up, loss, rng).min(mh))
        .collect();
    log.record(node.clone(), epoch, up, per_oracle.clone());
    (up, per_oracle)
}

/// Finalized per-node availability for one epoch: the byte value `k`
/// gives the fraction `k/255`, and the service flag marks epochs at or
/// above the 98 % threshold. The flag is recorded for external
/// reputation use only and never affects payouts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpochRecord {
    pub node: NodeId,
    pub epoch: EpochId,
    pub availability: u8,
    pub service_flag: bool,
}

impl EpochRecord {
    pub fn new(node: NodeId, epoch: EpochId, availability: u8) -> Self {
        EpochRecord {
            node,
            epoch,
            availability,
            service_flag: availability >= crate::params::GATE_MIN_BYTE,
        }
    }

    pub fn a_fraction(&self) -> f64 {
        self.availability as f64 / 255.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn heartbeat_ceiling_per_interval() {
        assert_eq!(max_heartbeats(10).unwrap(), 8640);
        assert_eq!(max_heartbeats(15).unwrap(), 5760);
        assert_eq!(max_heartbeats(12).unwrap(), 7200);
        assert_eq!(max_heartbeats(9), Err(LivenessError::BadInterval(9)));
        assert_eq!(max_heartbeats(16), Err(LivenessError::BadInterval(16)));
    }

    #[test]
    fn epoch_boundaries_are_day_multiples() {
        assert_eq!(EpochId(0).start_second(), 0);
        assert_eq!(EpochId(0).end_second(), 86_400);
        assert_eq!(EpochId(3).start_second(), 3 * 86_400);
    }

    #[test]
    fn full_uptime_zero_loss_all_oracles_see_everything() {
        let mut log = HeartbeatLog::new(8640);
        let mut state = UptimeState::new(UptimeModel::AlwaysUp);
        let mut up_rng = rng(1);
        let mut oracles = vec![rng(2), rng(3), rng(4)];
        let (up, counts) = emit_and_record(
            &mut log,
            &NodeId::new("n"),
            EpochId(0),
            &mut state,
            0.0,
            &mut up_rng,
            &mut oracles,
        );
        assert_eq!(up, 8640);
        assert_eq!(counts, vec![8640, 8640, 8640]);
    }

    #[test]
    fn down_node_produces_zero_counts() {
        let mut state = UptimeState::new(UptimeModel::AlwaysDown);
        let mut up_rng = rng(9);
        assert_eq!(state.up_slots(EpochId(0), 8640, &mut up_rng), 0);
        assert_eq!(oracle_received(0, 0.0, &mut rng(1)), 0);
    }

    #[test]
    fn half_uptime_is_half_the_slots() {
        // brute-force slot count: node up for the first half of the epoch
        let mh = 8640u32;
        let expected = (0..mh).filter(|slot| *slot < mh / 2).count() as u32;
        let mut state = UptimeState::new(UptimeModel::Fixed { fraction: 0.5 });
        let got = state.up_slots(EpochId(0), mh, &mut rng(5));
        assert_eq!(got, expected);
        assert_eq!(got, 4320);
    }

    #[test]
    fn scripted_trace_runs_then_goes_dark() {
        let mut state = UptimeState::new(UptimeModel::Scripted {
            fractions: vec![1.0, 0.25],
        });
        let mut r = rng(7);
        assert_eq!(state.up_slots(EpochId(0), 8640, &mut r), 8640);
        assert_eq!(state.up_slots(EpochId(1), 8640, &mut r), 2160);
        assert_eq!(state.up_slots(EpochId(2), 8640, &mut r), 0);
    }

    #[test]
    fn loss_reduces_counts_but_keeps_bound() {
        let mut r = rng(11);
        for _ in 0..200 {
            let c = oracle_received(8640, 0.3, &mut r);
            assert!(c <= 8640);
        }
        assert_eq!(oracle_received(8640, 1.0, &mut rng(1)), 0);
        assert_eq!(oracle_received(8640, 0.0, &mut rng(1)), 8640);
    }

    #[test]
    fn gilbert_elliott_is_deterministic_and_bounded() {
        let model = UptimeModel::GilbertElliott {
            p_fail: 0.001,
            p_recover: 0.05,
            start_up: true,
        };
        let run = |seed| {
            let mut s = UptimeState::new(model.clone());
            let mut r = rng(seed);
            (0..50)
                .map(|e| s.up_slots(EpochId(e), 8640, &mut r))
                .collect::<Vec<_>>()
        };
        let a = run(42);
        let b = run(42);
        assert_eq!(a, b);
        assert!(a.iter().all(|c| *c <= 8640));
        // bursty but not degenerate: some epochs are partial
        assert!(a.iter().any(|c| *c > 0));
    }

    #[test]
    fn gilbert_elliott_extreme_probs() {
        let mut s = UptimeState::new(UptimeModel::GilbertElliott {
            p_fail: 0.0,
            p_recover: 1.0,
            start_up: true,
        });
        let mut r = rng(3);
        assert_eq!(s.up_slots(EpochId(0), 8640, &mut r), 8640);

        let mut s = UptimeState::new(UptimeModel::GilbertElliott {
            p_fail: 1.0,
            p_recover: 1.0,
            start_up: true,
        });
        // alternates every slot starting up: exactly half the slots up
        assert_eq!(s.up_slots(EpochId(0), 8640, &mut r), 4320);
    }

    #[test]
    fn service_flag_boundary() {
        let rec = EpochRecord::new(NodeId::new("n"), EpochId(0), 250);
        assert!(rec.service_flag);
        let rec = EpochRecord::new(NodeId::new("n"), EpochId(0), 249);
        assert!(!rec.service_flag);
    }
}
