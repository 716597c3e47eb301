//! Protocol state machine and deterministic simulator for an
//! availability-mined token economy.
//!
//! The crate is organised around the on-chain state it models:
//!
//! * [`ledger`] — exact integer token ledger with a hard cap, burns and
//!   treasury pools; conservation of supply is its core invariant.
//! * [`licensing`] — node-deed lifecycle: KYC gating, purchases with
//!   payment routing, node association and dAuth validation.
//! * [`liveness`] — epoch clock, heartbeat emission models and per-oracle
//!   reception logs.
//! * [`consensus`] — oracle-side availability computation, the 98 %
//!   self-availability gate and quorum-gated median finalization with
//!   Byzantine fault injection.
//! * [`poa`] — availability-mined emission: credit accrual against license
//!   caps, linear and sigmoid schedules, completion detection.
//! * [`poai`] — paid-compute job economy: fee escrow, assignment,
//!   per-epoch service monitoring and 85/15 settlement.
//! * [`sim`] — the deterministic discrete-event engine, scenario
//!   configuration, event log digests and report writers.
//!
//! Everything monetary is computed in integer base units of 10⁻¹⁸ tokens;
//! no floating point ever touches a balance.

pub mod amount;
pub mod consensus;
pub mod ids;
pub mod ledger;
pub mod licensing;
pub mod liveness;
pub mod params;
pub mod poa;
pub mod poai;
pub mod sim;

pub use amount::TokenAmount;
pub use consensus::{ByzantineStrategy, ConsensusResult, OracleProfile, OracleVote};
pub use ids::{AccountId, JobId, LicenseId, NodeId};
pub use ledger::{Holder, PoolId, PoolWallet, SupplyLedger};
pub use licensing::{License, LicenseClass, Registry};
pub use liveness::{EpochId, HeartbeatLog, UptimeModel};
pub use poa::ScheduleShape;
pub use poai::{Job, JobBook, JobState};
pub use sim::{load_config, run, Scenario, SimRun};
