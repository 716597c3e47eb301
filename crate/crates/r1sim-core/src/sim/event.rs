//! Append-only event log with a canonical serialization and content
//! digest. Identical (scenario, seed) pairs produce byte-identical logs;
//! every report figure is recoverable from the events alone.

use crate::amount::TokenAmount;
use crate::ids::{AccountId, JobId, LicenseId, NodeId};
use crate::ledger::PoolId;
use crate::licensing::LicenseClass;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct VoteEntry {
    pub oracle: NodeId,
    pub value: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoolShare {
    pub pool: PoolId,
    pub amount: TokenAmount,
}

#[derive(Debug, Clone, Serialize)]
pub struct PayoutEntry {
    pub node: NodeId,
    pub owner: AccountId,
    pub epochs_served: u32,
    pub amount: TokenAmount,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    RunStarted {
        seed: u64,
        duration_epochs: u64,
        heartbeat_interval_s: u32,
    },
    GenesisAccount {
        account: AccountId,
        kyc: bool,
        balance: TokenAmount,
    },
    GenesisLicense {
        license: LicenseId,
        class: LicenseClass,
        owner: AccountId,
        cap: TokenAmount,
        span: u32,
    },
    PoolsLocked {
        pools: Vec<PoolId>,
    },
    PoolsUnlocked {
        pools: Vec<PoolId>,
    },
    KycRevoked {
        account: AccountId,
    },
    NdPurchased {
        license: LicenseId,
        buyer: AccountId,
        price: TokenAmount,
        lp: TokenAmount,
        burned: TokenAmount,
        opex: TokenAmount,
    },
    NdPurchaseFailed {
        node: NodeId,
        owner: AccountId,
        reason: String,
    },
    Associated {
        license: LicenseId,
        node: NodeId,
        replaced: Option<NodeId>,
    },
    Heartbeats {
        node: NodeId,
        up_slots: u32,
        received: Vec<u32>,
    },
    OracleGate {
        oracle: NodeId,
        self_availability: u8,
        eligible: bool,
    },
    OracleSelected {
        oracle: NodeId,
    },
    Finalized {
        node: NodeId,
        measured_epoch: u64,
        availability: u8,
        service_flag: bool,
        quorum: usize,
        votes: Vec<VoteEntry>,
    },
    FinalizationDeferred {
        node: NodeId,
        measured_epoch: u64,
        eligible_votes: usize,
        required: usize,
    },
    FinalizationDefaulted {
        node: NodeId,
        measured_epoch: u64,
    },
    PoaMint {
        license: LicenseId,
        node: NodeId,
        measured_epoch: u64,
        availability: u8,
        amount: TokenAmount,
        credits_scaled: u64,
    },
    LicenseCompleted {
        license: LicenseId,
    },
    GndRouted {
        amount: TokenAmount,
        shares: Vec<PoolShare>,
    },
    JobSubmitted {
        job: JobId,
        sponsor: AccountId,
        fee: TokenAmount,
        resources: u64,
        duration: u32,
    },
    JobRejected {
        sponsor: AccountId,
        fee: TokenAmount,
        reason: String,
    },
    JobAssigned {
        job: JobId,
        node: NodeId,
    },
    JobWaiting {
        job: JobId,
    },
    JobMonitored {
        job: JobId,
        node: NodeId,
        measured_epoch: u64,
        availability: u8,
        passed: bool,
        consumed: TokenAmount,
    },
    JobTransferred {
        job: JobId,
        from: NodeId,
    },
    JobSettled {
        job: JobId,
        payable: TokenAmount,
        released: TokenAmount,
        burned: TokenAmount,
        refunded: TokenAmount,
        forced: bool,
        payouts: Vec<PayoutEntry>,
    },
    SupplySnapshot {
        minted: TokenAmount,
        burned: TokenAmount,
        circulating: TokenAmount,
        pools: Vec<PoolShare>,
    },
}

/// One timestamped log entry. `t` is simulated seconds; `seq` makes the
/// total order explicit.
#[derive(Debug, Clone, Serialize)]
pub struct Event {
    pub seq: u64,
    pub t: u64,
    pub epoch: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, epoch: u64, t: u64, kind: EventKind) {
        let seq = self.events.len() as u64;
        self.events.push(Event { seq, t, epoch, kind });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Canonical serialization: one JSON object per line, struct field
    /// order, `\n` separators.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for e in &self.events {
            out.extend_from_slice(
                serde_json::to_string(e)
                    .expect("event serialization is infallible")
                    .as_bytes(),
            );
            out.push(b'\n');
        }
        out
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        digest_bytes(&self.to_jsonl())
    }
}

/// Hex SHA-256 of arbitrary bytes; `digest --log` applies this to a log
/// file so on-disk and in-memory digests agree byte for byte.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
