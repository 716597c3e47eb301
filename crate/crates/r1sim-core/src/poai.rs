//! Paid-compute job economy: fee escrow, node assignment, per-epoch
//! service monitoring with penalty and transfer, and 85/15 settlement
//! with zero platform commission.
//!
//! Escrow conservation is the backbone: for every job,
//! `locked + released + burned + refunded = deposit` after every
//! operation. Consumption is tracked with a cumulative floor over the
//! served epochs' availability, so a fully-served job consumes its fee
//! exactly and partial service leaves an exact refund.

use crate::amount::TokenAmount;
use crate::ids::{AccountId, JobId, NodeId};
use crate::ledger::{split_shares, Holder, LedgerError, SupplyLedger};
use crate::liveness::EpochId;
use crate::params::{CREDIT_SCALE, GATE_MIN_BYTE, SETTLE_BURN_PM, SETTLE_RELEASE_PM};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default service window in epochs.
pub const DEFAULT_JOB_DURATION: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Pending,
    Running,
    Transferred,
    Settled,
    Aborted,
}

/// One monitored service epoch.
#[derive(Debug, Clone, Serialize)]
pub struct EpochOutcome {
    pub epoch: EpochId,
    pub node: NodeId,
    pub availability: u8,
    pub passed: bool,
    /// Fee units consumed by this epoch (zero on failure).
    pub consumed: TokenAmount,
}

/// Escrow breakdown for one job; the four parts always re-sum to the
/// original deposit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EscrowAccount {
    pub job: JobId,
    pub locked: TokenAmount,
    pub released: TokenAmount,
    pub burned: TokenAmount,
    pub refunded: TokenAmount,
}

impl EscrowAccount {
    pub fn deposit(&self) -> TokenAmount {
        TokenAmount::from_units(
            self.locked.units() + self.released.units() + self.burned.units()
                + self.refunded.units(),
        )
    }
}

/// A paid workload: escrowed fee, abstract resource demand and a service
/// window measured in passed epochs. Failed epochs extend the window.
#[derive(Debug, Clone)]
pub struct Job {
    pub id: JobId,
    pub sponsor: AccountId,
    pub fee: TokenAmount,
    pub resources: u64,
    pub duration: u32,
    pub state: JobState,
    pub assigned: Option<NodeId>,
    pub submitted: EpochId,
    pub outcomes: Vec<EpochOutcome>,
    pub escrow: EscrowAccount,
    /// Distinct serving nodes in first-served order.
    pub node_history: Vec<NodeId>,
    passed_epochs: u32,
    /// Σ availability bytes over passed epochs; drives consumption.
    a_sum: u64,
    consumed: TokenAmount,
}

impl Job {
    pub fn passed_epochs(&self) -> u32 {
        self.passed_epochs
    }

    /// Fee units earned by service so far.
    pub fn consumed(&self) -> TokenAmount {
        self.consumed
    }

    /// All required service epochs delivered; ready to settle.
    pub fn window_complete(&self) -> bool {
        self.passed_epochs >= self.duration
    }

    fn is_terminal(&self) -> bool {
        matches!(self.state, JobState::Settled | JobState::Aborted)
    }
}

/// Result of monitoring one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorOutcome {
    pub passed: bool,
    pub consumed: TokenAmount,
    /// Job was kicked off the node and waits for reassignment.
    pub transferred: bool,
    /// The service window is complete; the job can settle.
    pub complete: bool,
}

/// Per-node share of a settlement.
#[derive(Debug, Clone, Serialize)]
pub struct NodePayout {
    pub node: NodeId,
    pub owner: AccountId,
    pub epochs_served: u32,
    pub amount: TokenAmount,
}

#[derive(Debug, Clone, Serialize)]
pub struct SettlementRecord {
    pub job: JobId,
    /// Consumed portion of the fee (earned by service).
    pub payable: TokenAmount,
    pub released: TokenAmount,
    pub burned: TokenAmount,
    pub refunded: TokenAmount,
    pub payouts: Vec<NodePayout>,
    /// True when settled early at scenario end rather than on window
    /// completion.
    pub forced: bool,
}

/// An assignment candidate prepared by the scheduler: the node already
/// passed dAuth, holds a standard deed (master deeds are excluded from
/// paid work) and has spare capacity.
#[derive(Debug, Clone)]
pub struct NodeCandidate {
    pub node: NodeId,
    pub score: f64,
    pub load: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PoaiError {
    #[error("job {0} does not exist")]
    UnknownJob(JobId),
    #[error("fee {fee} below the minimum {min_fee} for the requested resources and duration")]
    InsufficientFee {
        fee: TokenAmount,
        min_fee: TokenAmount,
    },
    #[error("no eligible node available")]
    NoEligibleNode,
    #[error("job {0} is not running")]
    JobNotRunning(JobId),
    #[error("job {job} cannot be assigned from state {state:?}")]
    NotAssignable { job: JobId, state: JobState },
    #[error("service window incomplete: {passed}/{duration} epochs passed")]
    WindowIncomplete { passed: u32, duration: u32 },
    #[error("job {0} already reached a terminal state")]
    AlreadyTerminal(JobId),
    #[error("no owner known for serving node {0}")]
    UnknownOperator(NodeId),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// Book of jobs plus the node-score ledger used by the scheduler.
#[derive(Debug, Clone)]
pub struct JobBook {
    jobs: BTreeMap<JobId, Job>,
    next_id: u64,
    /// Fee units per resource-unit per epoch backing the minimum fee.
    fee_rate: TokenAmount,
    /// EMA smoothing factor for node scores.
    smoothing: f64,
    scores: BTreeMap<NodeId, f64>,
}

impl JobBook {
    pub fn new(fee_rate: TokenAmount, smoothing: f64) -> Self {
        JobBook {
            jobs: BTreeMap::new(),
            next_id: 0,
            fee_rate,
            smoothing,
            scores: BTreeMap::new(),
        }
    }

    pub fn job(&self, id: JobId) -> Result<&Job, PoaiError> {
        self.jobs.get(&id).ok_or(PoaiError::UnknownJob(id))
    }

    pub fn jobs(&self) -> impl Iterator<Item = &Job> {
        self.jobs.values()
    }

    pub fn job_ids(&self) -> Vec<JobId> {
        self.jobs.keys().copied().collect()
    }

    /// Minimum fee for a workload: `fee_rate × resources × duration`.
    pub fn min_fee(&self, resources: u64, duration: u32) -> TokenAmount {
        self.fee_rate
            .checked_mul(resources as u128)
            .and_then(|f| f.checked_mul(duration as u128))
            .unwrap_or(TokenAmount::MAX)
    }

    /// Node score: EMA of observed epoch availability fractions. Unseen
    /// nodes start at 1.0.
    pub fn score(&self, node: &NodeId) -> f64 {
        self.scores.get(node).copied().unwrap_or(1.0)
    }

    pub fn update_score(&mut self, node: &NodeId, availability: u8) {
        let x = availability as f64 / CREDIT_SCALE as f64;
        let prev = self.score(node);
        let next = (1.0 - self.smoothing) * prev + self.smoothing * x;
        self.scores.insert(node.clone(), next.clamp(0.0, 1.0));
    }

    /// Lock `fee` in escrow and queue the job.
    pub fn submit_job(
        &mut self,
        ledger: &mut SupplyLedger,
        sponsor: AccountId,
        fee: TokenAmount,
        resources: u64,
        duration: Option<u32>,
        epoch: EpochId,
    ) -> Result<JobId, PoaiError> {
        let duration = duration.unwrap_or(DEFAULT_JOB_DURATION);
        let min_fee = self.min_fee(resources, duration);
        if fee < min_fee {
            return Err(PoaiError::InsufficientFee { fee, min_fee });
        }
        let id = JobId(self.next_id);
        ledger.transfer(&Holder::Account(sponsor.clone()), &Holder::Escrow(id), fee)?;
        self.next_id += 1;
        self.jobs.insert(
            id,
            Job {
                id,
                sponsor,
                fee,
                resources,
                duration,
                state: JobState::Pending,
                assigned: None,
                submitted: epoch,
                outcomes: Vec::new(),
                escrow: EscrowAccount {
                    job: id,
                    locked: fee,
                    released: TokenAmount::ZERO,
                    burned: TokenAmount::ZERO,
                    refunded: TokenAmount::ZERO,
                },
                node_history: Vec::new(),
                passed_epochs: 0,
                a_sum: 0,
                consumed: TokenAmount::ZERO,
            },
        );
        Ok(id)
    }

    /// Place a pending or transferred job on the best candidate: highest
    /// score, then lowest load, then lowest identifier.
    pub fn assign_job(
        &mut self,
        id: JobId,
        candidates: &[NodeCandidate],
    ) -> Result<NodeId, PoaiError> {
        let job = self.jobs.get_mut(&id).ok_or(PoaiError::UnknownJob(id))?;
        match job.state {
            JobState::Pending | JobState::Transferred => {}
            state => return Err(PoaiError::NotAssignable { job: id, state }),
        }
        let best = candidates
            .iter()
            .min_by(|a, b| {
                b.score
                    .partial_cmp(&a.score)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.load.cmp(&b.load))
                    .then_with(|| a.node.cmp(&b.node))
            })
            .ok_or(PoaiError::NoEligibleNode)?;
        job.state = JobState::Running;
        job.assigned = Some(best.node.clone());
        if !job.node_history.contains(&best.node) {
            job.node_history.push(best.node.clone());
        }
        Ok(best.node.clone())
    }

    /// Score one service epoch of a running job against the finalized
    /// availability of its node. A pass (≥ 98 %) consumes the epoch's
    /// fee share; a fail withholds it, penalizes the node score and
    /// kicks the job into the transfer queue, extending the window.
    pub fn monitor_epoch(
        &mut self,
        id: JobId,
        epoch: EpochId,
        availability: u8,
    ) -> Result<MonitorOutcome, PoaiError> {
        let job = self.jobs.get_mut(&id).ok_or(PoaiError::UnknownJob(id))?;
        if job.state != JobState::Running {
            return Err(PoaiError::JobNotRunning(id));
        }
        let node = job.assigned.clone().expect("running job has a node");
        let passed = availability >= GATE_MIN_BYTE;
        let mut consumed = TokenAmount::ZERO;
        if passed {
            let new_sum = job.a_sum + availability as u64;
            let denom = job.duration as u128 * CREDIT_SCALE as u128;
            let total = job
                .fee
                .mul_div_floor(new_sum as u128, denom)
                .unwrap_or(job.fee)
                .min(job.fee);
            consumed = total.saturating_sub(job.consumed);
            job.a_sum = new_sum;
            job.consumed = total;
            job.passed_epochs += 1;
        }
        job.outcomes.push(EpochOutcome {
            epoch,
            node: node.clone(),
            availability,
            passed,
            consumed,
        });
        let mut transferred = false;
        if !passed {
            job.state = JobState::Transferred;
            job.assigned = None;
            transferred = true;
        }
        let complete = job.window_complete();
        if !passed {
            self.update_score(&node, availability);
        }
        Ok(MonitorOutcome {
            passed,
            consumed,
            transferred,
            complete,
        })
    }

    /// Settle a job whose window is complete.
    pub fn settle(
        &mut self,
        ledger: &mut SupplyLedger,
        id: JobId,
        owners: &BTreeMap<NodeId, AccountId>,
    ) -> Result<SettlementRecord, PoaiError> {
        {
            let job = self.jobs.get(&id).ok_or(PoaiError::UnknownJob(id))?;
            if job.is_terminal() {
                return Err(PoaiError::AlreadyTerminal(id));
            }
            if !job.window_complete() {
                return Err(PoaiError::WindowIncomplete {
                    passed: job.passed_epochs,
                    duration: job.duration,
                });
            }
        }
        self.close_out(ledger, id, owners, false)
    }

    /// Settle whatever was earned so far and refund the rest; used when
    /// the scenario ends with the job still open. The job ends Aborted.
    pub fn force_settle(
        &mut self,
        ledger: &mut SupplyLedger,
        id: JobId,
        owners: &BTreeMap<NodeId, AccountId>,
    ) -> Result<SettlementRecord, PoaiError> {
        let job = self.jobs.get(&id).ok_or(PoaiError::UnknownJob(id))?;
        if job.is_terminal() {
            return Err(PoaiError::AlreadyTerminal(id));
        }
        self.close_out(ledger, id, owners, true)
    }

    fn close_out(
        &mut self,
        ledger: &mut SupplyLedger,
        id: JobId,
        owners: &BTreeMap<NodeId, AccountId>,
        forced: bool,
    ) -> Result<SettlementRecord, PoaiError> {
        // per-node attribution in first-served order
        let (payable, sponsor, fee, per_node) = {
            let job = self.jobs.get(&id).expect("checked by caller");
            let mut attributed: BTreeMap<NodeId, (u32, TokenAmount)> = BTreeMap::new();
            for o in job.outcomes.iter().filter(|o| o.passed) {
                let e = attributed.entry(o.node.clone()).or_insert((0, TokenAmount::ZERO));
                e.0 += 1;
                e.1 = TokenAmount::from_units(e.1.units() + o.consumed.units());
            }
            let ordered: Vec<(NodeId, u32, TokenAmount)> = job
                .node_history
                .iter()
                .filter_map(|n| attributed.get(n).map(|(c, a)| (n.clone(), *c, *a)))
                .collect();
            (job.consumed, job.sponsor.clone(), job.fee, ordered)
        };

        // 85/15 of the consumed portion, largest-remainder exact
        let split = split_shares(payable, &[("release", SETTLE_RELEASE_PM), ("burn", SETTLE_BURN_PM)])?;
        let (released_total, burn_total) = (split[0].1, split[1].1);

        // released pot divided across serving nodes proportionally to
        // what their epochs earned
        let mut payouts: Vec<NodePayout> = Vec::new();
        if !released_total.is_zero() {
            let mut floors: Vec<u128> = Vec::new();
            let mut rems: Vec<(usize, u128)> = Vec::new();
            let mut assigned = 0u128;
            for (i, (_, _, attr)) in per_node.iter().enumerate() {
                let (f, rem) = released_total
                    .mul_div_rem(attr.units(), payable.units())
                    .expect("payable is nonzero here");
                floors.push(f.units());
                rems.push((i, rem));
                assigned += f.units();
            }
            let mut leftover = released_total.units() - assigned;
            rems.sort_by_key(|r| std::cmp::Reverse(r.1));
            for (i, _) in rems {
                if leftover == 0 {
                    break;
                }
                floors[i] += 1;
                leftover -= 1;
            }
            for ((node, epochs, _), units) in per_node.iter().zip(floors) {
                let owner = owners
                    .get(node)
                    .cloned()
                    .ok_or_else(|| PoaiError::UnknownOperator(node.clone()))?;
                payouts.push(NodePayout {
                    node: node.clone(),
                    owner,
                    epochs_served: *epochs,
                    amount: TokenAmount::from_units(units),
                });
            }
        }

        let escrow = Holder::Escrow(id);
        for p in &payouts {
            ledger.transfer(&escrow, &Holder::Account(p.owner.clone()), p.amount)?;
        }
        ledger.burn(&escrow, burn_total)?;
        let refund = fee.saturating_sub(payable);
        ledger.transfer(&escrow, &Holder::Account(sponsor), refund)?;

        let job = self.jobs.get_mut(&id).expect("checked by caller");
        job.state = if forced { JobState::Aborted } else { JobState::Settled };
        job.assigned = None;
        job.escrow.locked = TokenAmount::ZERO;
        job.escrow.released = released_total;
        job.escrow.burned = burn_total;
        job.escrow.refunded = refund;
        debug_assert_eq!(job.escrow.deposit(), job.fee);
        debug_assert!(ledger.balance_of(&escrow).is_zero());

        Ok(SettlementRecord {
            job: id,
            payable,
            released: released_total,
            burned: burn_total,
            refunded: refund,
            payouts,
            forced,
        })
    }
}
