//! Oracle-side availability computation and epoch finalization.
//!
//! Each oracle byte-normalizes the liveness proofs it received from a
//! node, gates itself on a 98 % self-availability threshold, and the vote
//! vector is finalized by a quorum-checked median: with `O` configured
//! oracles and `f = ⌊(O−1)/3⌋`, at least `2f+1` eligible votes are
//! required. The PBFT message phases are abstracted to a single
//! vote-collection round; only the finalized value feeds the economy.

use crate::ids::NodeId;
use crate::liveness::EpochId;
use crate::params::GATE_MIN_BYTE;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// One oracle's byte-scaled availability assessment of a node for an
/// epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVote {
    pub oracle: NodeId,
    pub node: NodeId,
    pub epoch: EpochId,
    pub h_value: u8,
}

/// Finalization outcome for one (node, epoch).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusResult {
    pub node: NodeId,
    pub epoch: EpochId,
    /// Agreed availability byte; 0 when unfinalized.
    pub availability: u8,
    pub finalized: bool,
    /// Oracles whose votes were counted, sorted by identifier.
    pub eligible_oracles: Vec<NodeId>,
    /// Number of votes counted.
    pub quorum_size: usize,
    /// Votes required for finalization (2f + 1).
    pub quorum_required: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConsensusError {
    #[error("oracle {0} voted more than once for the same (node, epoch)")]
    DuplicateVote(NodeId),
    #[error("no oracle satisfies the cost cap")]
    NoFeasibleOracle,
}

/// Byte-normalized availability: `⌊count / mh × 255⌋`, clamped to 255.
pub fn byte_availability(count: u32, mh: u32) -> u8 {
    if mh == 0 {
        return 0;
    }
    let h = (count as u64 * 255) / mh as u64;
    h.min(255) as u8
}

/// The oracle self-gate: an oracle proposes votes only while its own
/// availability clears 98 % (byte 250).
pub fn self_gate(self_availability: u8) -> bool {
    self_availability >= GATE_MIN_BYTE
}

/// Fault tolerance for a configured oracle population.
pub fn fault_bound(o_total: usize) -> usize {
    o_total.saturating_sub(1) / 3
}

/// Votes required to finalize: `2f + 1`.
pub fn quorum_required(o_total: usize) -> usize {
    2 * fault_bound(o_total) + 1
}

/// Sorted-median with floor tie-break on even counts. Keeps the result
/// integral in 0..=255.
fn median_byte(values: &mut [u8]) -> u8 {
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        let lo = values[n / 2 - 1] as u16;
        let hi = values[n / 2] as u16;
        ((lo + hi) / 2) as u8
    }
}

/// Finalize one (node, epoch) from eligible-oracle votes. Below quorum
/// the result carries `finalized = false` and the epoch is retried in a
/// later round; vote order never affects the outcome.
pub fn finalize_epoch(
    node: &NodeId,
    epoch: EpochId,
    votes: &[OracleVote],
    o_total: usize,
) -> Result<ConsensusResult, ConsensusError> {
    let mut seen = BTreeSet::new();
    for v in votes {
        debug_assert!(v.node == *node && v.epoch == epoch);
        if !seen.insert(v.oracle.clone()) {
            return Err(ConsensusError::DuplicateVote(v.oracle.clone()));
        }
    }
    let required = quorum_required(o_total);
    let eligible_oracles: Vec<NodeId> = seen.into_iter().collect();
    if votes.len() < required {
        return Ok(ConsensusResult {
            node: node.clone(),
            epoch,
            availability: 0,
            finalized: false,
            eligible_oracles,
            quorum_size: votes.len(),
            quorum_required: required,
        });
    }
    let mut values: Vec<u8> = votes.iter().map(|v| v.h_value).collect();
    let availability = median_byte(&mut values);
    Ok(ConsensusResult {
        node: node.clone(),
        epoch,
        availability,
        finalized: true,
        eligible_oracles,
        quorum_size: votes.len(),
        quorum_required: required,
    })
}

/// Adversarial vote strategies for fault injection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum ByzantineStrategy {
    /// Always vote 0.
    Zero,
    /// Always vote 255.
    Max,
    /// Uniform pseudo-random vote from the oracle's seeded stream.
    Random,
    /// Honest value shifted by a fixed delta, clamped to 0..=255.
    Offset { delta: i16 },
}

impl ByzantineStrategy {
    /// The vote an injected oracle casts instead of its honest value.
    pub fn vote(self, honest: u8, rng: &mut ChaCha8Rng) -> u8 {
        match self {
            ByzantineStrategy::Zero => 0,
            ByzantineStrategy::Max => 255,
            ByzantineStrategy::Random => rng.random_range(0..=255u8),
            ByzantineStrategy::Offset { delta } => {
                (honest as i16 + delta).clamp(0, 255) as u8
            }
        }
    }
}

/// Ledger of oracle quality used for selection: implementation cost and
/// an exponential moving average of observed availability.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleProfile {
    pub id: NodeId,
    pub cost: f64,
    pub ema_availability: f64,
}

/// Pick the oracle minimizing estimated failure probability
/// (`1 − EMA availability`) among those within the cost cap; ties break
/// toward the lowest identifier.
pub fn select_oracle(pool: &[OracleProfile], cost_cap: f64) -> Result<NodeId, ConsensusError> {
    pool.iter()
        .filter(|o| o.cost <= cost_cap)
        .min_by(|a, b| {
            let fa = 1.0 - a.ema_availability;
            let fb = 1.0 - b.ema_availability;
            fa.partial_cmp(&fb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.id.cmp(&b.id))
        })
        .map(|o| o.id.clone())
        .ok_or(ConsensusError::NoFeasibleOracle)
}
