//! The deterministic discrete-event engine.
//!
//! Epochs execute in a fixed pipeline: admin (unlocks, revocations,
//! joins, job submissions, assignment) → heartbeat generation → oracle
//! self-gating → finalization (retrying earlier deferred epochs first)
//! → availability-mined accrual → job monitoring and settlement →
//! supply snapshot. No event of epoch `e+1` precedes the finalization
//! attempt of epoch `e`, and identical (scenario, seed) pairs replay to
//! byte-identical event logs.

use crate::amount::TokenAmount;
use crate::consensus::{
    self, byte_availability, finalize_epoch, select_oracle, ConsensusResult, OracleProfile,
    OracleVote,
};
use crate::ids::{AccountId, JobId, LicenseId, NodeId};
use crate::ledger::{Holder, PoolId, SupplyLedger};
use crate::licensing::{tier_price, LicenseClass, Registry};
use crate::liveness::{max_heartbeats, EpochId, HeartbeatLog, UptimeState};
use crate::params;
use crate::poa::epoch_accrual;
use crate::poai::{JobBook, JobState, NodeCandidate, SettlementRecord};
use crate::sim::config::{NodeSpec, OracleSpec, Scenario};
use crate::sim::event::{EventKind, EventLog, PayoutEntry, PoolShare, VoteEntry};
use crate::sim::rng::RngFactory;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// One line of `epochs.csv`: a (node, epoch) consensus outcome.
#[derive(Debug, Clone)]
pub struct EpochRow {
    pub node: NodeId,
    pub epoch: u64,
    pub per_oracle: Vec<u32>,
    pub availability: u8,
    pub finalized: bool,
    pub minted: TokenAmount,
    /// Votes counted toward the quorum.
    pub eligible_votes: usize,
    /// How many of those came from fault-injected oracles.
    pub byzantine_votes: usize,
}

/// One line of `supply.csv`: the supply state after an epoch closed.
#[derive(Debug, Clone)]
pub struct SupplyRow {
    pub epoch: u64,
    pub minted: TokenAmount,
    pub burned: TokenAmount,
    pub circulating: TokenAmount,
    pub pools: Vec<(PoolId, TokenAmount)>,
}

/// Everything a finished run leaves behind; reports are pure views of
/// this value.
#[derive(Debug)]
pub struct SimRun {
    pub scenario: Scenario,
    pub seed: u64,
    pub events: EventLog,
    pub ledger: SupplyLedger,
    pub registry: Registry,
    pub jobs: JobBook,
    pub epoch_rows: Vec<EpochRow>,
    pub supply_rows: Vec<SupplyRow>,
    pub settlements: Vec<SettlementRecord>,
    pub unfinalized_epochs: u64,
    pub flags: Vec<String>,
}

struct NodeRuntime {
    spec: NodeSpec,
    uptime: UptimeState,
    rng_uptime: ChaCha8Rng,
    rng_loss: Vec<ChaCha8Rng>,
    license: Option<LicenseId>,
    joined: bool,
}

impl NodeRuntime {
    fn left(&self, epoch: u64) -> bool {
        self.spec.leave_epoch.is_some_and(|l| epoch >= l)
    }
}

struct OracleRuntime {
    spec: OracleSpec,
    uptime: UptimeState,
    rng_uptime: ChaCha8Rng,
    rng_byz: ChaCha8Rng,
    ema: f64,
    self_availability: u8,
    eligible: bool,
}

struct Engine {
    sc: Scenario,
    seed: u64,
    mh: u32,
    ledger: SupplyLedger,
    registry: Registry,
    jobs: JobBook,
    log: EventLog,
    hb: HeartbeatLog,
    nodes: Vec<NodeRuntime>,
    oracles: Vec<OracleRuntime>,
    nd_sold: u64,
    /// (measured epoch, node) pairs that missed quorum, retried next round.
    retry_queue: Vec<(u64, NodeId)>,
    /// Jobs that served (node, epoch) and await that epoch's finalization.
    assignments_at: BTreeMap<(NodeId, u64), Vec<JobId>>,
    epoch_rows: Vec<EpochRow>,
    supply_rows: Vec<SupplyRow>,
    settlements: Vec<SettlementRecord>,
    unfinalized: u64,
    flags: Vec<String>,
}

/// Execute a scenario under a seed. All runtime anomalies (failed
/// purchases, rejected jobs, unfinalizable epochs) are recorded as
/// events and report flags, never aborts.
pub fn run(scenario: Scenario, seed: u64) -> SimRun {
    let mh = max_heartbeats(scenario.heartbeat_interval_s)
        .expect("interval validated with the scenario");
    let rngf = RngFactory::new(seed);
    let oracle_count = scenario.oracles.len();

    let nodes = scenario
        .nodes
        .iter()
        .map(|spec| NodeRuntime {
            spec: spec.clone(),
            uptime: UptimeState::new(spec.uptime.clone()),
            rng_uptime: rngf.stream(&format!("uptime/node/{}", spec.id)),
            rng_loss: (0..oracle_count)
                .map(|i| rngf.stream(&format!("hb/{}/oracle-{i}", spec.id)))
                .collect(),
            license: None,
            joined: false,
        })
        .collect();

    let oracles = scenario
        .oracles
        .iter()
        .map(|spec| OracleRuntime {
            spec: spec.clone(),
            uptime: UptimeState::new(spec.uptime.clone()),
            rng_uptime: rngf.stream(&format!("uptime/oracle/{}", spec.id)),
            rng_byz: rngf.stream(&format!("byzantine/{}", spec.id)),
            ema: 1.0,
            self_availability: 0,
            eligible: false,
        })
        .collect();

    let mut engine = Engine {
        seed,
        mh,
        ledger: SupplyLedger::new(params::HARD_CAP),
        registry: Registry::new(),
        jobs: JobBook::new(scenario.fee_rate, scenario.score_smoothing),
        log: EventLog::new(),
        hb: HeartbeatLog::new(mh),
        nodes,
        oracles,
        nd_sold: 0,
        retry_queue: Vec::new(),
        assignments_at: BTreeMap::new(),
        epoch_rows: Vec::new(),
        supply_rows: Vec::new(),
        settlements: Vec::new(),
        unfinalized: 0,
        flags: Vec::new(),
        sc: scenario,
    };
    engine.genesis();
    let last = engine.sc.duration_epochs;
    for e in 0..last {
        engine.run_epoch(e, e + 1 == last);
    }
    if last == 0 {
        // degenerate scenario: still emit one snapshot so reports exist
        engine.snapshot(0);
    }
    engine.finish()
}

impl Engine {
    fn genesis(&mut self) {
        self.log.push(
            0,
            0,
            EventKind::RunStarted {
                seed: self.seed,
                duration_epochs: self.sc.duration_epochs,
                heartbeat_interval_s: self.sc.heartbeat_interval_s,
            },
        );
        for a in &self.sc.accounts {
            self.registry.register_account(a.id.clone(), a.kyc);
            if !a.balance.is_zero() {
                self.ledger
                    .mint(&Holder::Account(a.id.clone()), a.balance)
                    .expect("genesis balances below cap");
            }
            self.log.push(
                0,
                0,
                EventKind::GenesisAccount {
                    account: a.id.clone(),
                    kyc: a.kyc,
                    balance: a.balance,
                },
            );
        }

        let locked = [PoolId::Marketing, PoolId::Grants, PoolId::Csr];
        for p in locked {
            self.ledger.set_pool_locked(p, true);
        }
        self.log.push(0, 0, EventKind::PoolsLocked { pools: locked.to_vec() });

        // genesis and master deeds exist from day zero; standard deeds
        // are purchased when their node joins
        let mnd_count = self
            .sc
            .nodes
            .iter()
            .filter(|n| n.class == LicenseClass::Mnd)
            .count() as u64;
        let mut mnd_allocs = params::mnd_license_allocations(mnd_count).into_iter();
        for i in 0..self.nodes.len() {
            let (class, owner, node_id) = {
                let spec = &self.nodes[i].spec;
                (spec.class, spec.owner.clone(), spec.id.clone())
            };
            let cap = match class {
                LicenseClass::Gnd => params::gnd_allocation(),
                LicenseClass::Mnd => mnd_allocs.next().expect("one allocation per master deed"),
                LicenseClass::Nd => continue,
            };
            match self.registry.create_genesis_license(class, owner.clone(), cap) {
                Ok(id) => {
                    self.nodes[i].license = Some(id);
                    self.log.push(
                        0,
                        0,
                        EventKind::GenesisLicense {
                            license: id,
                            class,
                            owner,
                            cap,
                            span: class.credit_span(),
                        },
                    );
                }
                Err(e) => self.flags.push(format!(
                    "genesis license for node {node_id} not created: {e}"
                )),
            }
        }
    }

    fn run_epoch(&mut self, e: u64, is_last: bool) {
        let t_start = e * params::EPOCH_SECONDS;
        let t_end = (e + 1) * params::EPOCH_SECONDS;

        self.admin_phase(e, t_start);
        self.heartbeat_phase(e, t_start);
        self.gate_phase(e, t_end);
        self.finalize_round(e, t_end);
        self.fail_unmeasured_assignments(e, t_end);
        if is_last {
            self.default_unfinalized(e, t_end);
            self.force_settle_outstanding(e, t_end);
        }
        self.snapshot(e);
    }

    // -- phase 1: administration ---------------------------------------

    fn admin_phase(&mut self, e: u64, t: u64) {
        if self.sc.maturity_unlock_epoch == Some(e) {
            let pools = [PoolId::Marketing, PoolId::Grants, PoolId::Csr];
            for p in pools {
                self.ledger.set_pool_locked(p, false);
            }
            self.log.push(e, t, EventKind::PoolsUnlocked { pools: pools.to_vec() });
        }

        let revocations: Vec<AccountId> = self
            .sc
            .kyc_revocations
            .iter()
            .filter(|(_, epoch)| *epoch == e)
            .map(|(a, _)| a.clone())
            .collect();
        for account in revocations {
            if self.registry.set_kyc(&account, false).is_ok() {
                self.log.push(e, t, EventKind::KycRevoked { account });
            }
        }

        self.join_nodes(e, t);
        self.submit_jobs(e, t);
        self.assign_jobs(e, t);
    }

    fn join_nodes(&mut self, e: u64, t: u64) {
        for i in 0..self.nodes.len() {
            if self.nodes[i].spec.join_epoch != e {
                continue;
            }
            let (node_id, owner, class) = {
                let spec = &self.nodes[i].spec;
                (spec.id.clone(), spec.owner.clone(), spec.class)
            };
            if class == LicenseClass::Nd {
                let Some(price) = tier_price(&self.sc.nd_price_tiers, self.nd_sold) else {
                    self.flags
                        .push(format!("node {node_id}: deed tiers sold out, cannot join"));
                    self.log.push(
                        e,
                        t,
                        EventKind::NdPurchaseFailed {
                            node: node_id,
                            owner,
                            reason: "price tiers sold out".into(),
                        },
                    );
                    continue;
                };
                match self.registry.purchase_nd(&mut self.ledger, &owner, price) {
                    Ok((license, routing)) => {
                        self.nd_sold += 1;
                        self.nodes[i].license = Some(license);
                        self.log.push(
                            e,
                            t,
                            EventKind::NdPurchased {
                                license,
                                buyer: owner.clone(),
                                price,
                                lp: routing.lp,
                                burned: routing.burned,
                                opex: routing.opex,
                            },
                        );
                    }
                    Err(err) => {
                        self.flags
                            .push(format!("node {node_id}: deed purchase failed: {err}"));
                        self.log.push(
                            e,
                            t,
                            EventKind::NdPurchaseFailed {
                                node: node_id,
                                owner,
                                reason: err.to_string(),
                            },
                        );
                        continue;
                    }
                }
            }
            let Some(license) = self.nodes[i].license else {
                // master deed whose genesis creation failed
                continue;
            };
            let owner = self.nodes[i].spec.owner.clone();
            match self
                .registry
                .associate(&owner, license, node_id.clone(), EpochId(e))
            {
                Ok(rec) => {
                    self.nodes[i].joined = true;
                    self.log.push(
                        e,
                        t,
                        EventKind::Associated {
                            license,
                            node: rec.node,
                            replaced: rec.replaced,
                        },
                    );
                }
                Err(err) => self
                    .flags
                    .push(format!("node {node_id}: association failed: {err}")),
            }
        }
    }

    fn submit_jobs(&mut self, e: u64, t: u64) {
        let specs: Vec<_> = self
            .sc
            .jobs
            .iter()
            .filter(|j| j.submit_epoch == e)
            .cloned()
            .collect();
        for j in specs {
            let duration = j.duration.unwrap_or(self.sc.default_job_duration);
            match self.jobs.submit_job(
                &mut self.ledger,
                j.sponsor.clone(),
                j.fee,
                j.resources,
                Some(duration),
                EpochId(e),
            ) {
                Ok(id) => self.log.push(
                    e,
                    t,
                    EventKind::JobSubmitted {
                        job: id,
                        sponsor: j.sponsor,
                        fee: j.fee,
                        resources: j.resources,
                        duration,
                    },
                ),
                Err(err) => {
                    self.flags.push(format!(
                        "job from {} at epoch {e} rejected: {err}",
                        j.sponsor
                    ));
                    self.log.push(
                        e,
                        t,
                        EventKind::JobRejected {
                            sponsor: j.sponsor,
                            fee: j.fee,
                            reason: err.to_string(),
                        },
                    );
                }
            }
        }
    }

    fn assign_jobs(&mut self, e: u64, t: u64) {
        // load of already-running jobs
        let mut load: BTreeMap<NodeId, u64> = BTreeMap::new();
        for job in self.jobs.jobs() {
            if job.state == JobState::Running {
                if let Some(n) = &job.assigned {
                    *load.entry(n.clone()).or_insert(0) += job.resources;
                }
            }
        }
        let waiting: Vec<JobId> = self
            .jobs
            .jobs()
            .filter(|j| matches!(j.state, JobState::Pending | JobState::Transferred))
            .map(|j| j.id)
            .collect();
        for id in waiting {
            let resources = self.jobs.job(id).expect("listed above").resources;
            let candidates: Vec<NodeCandidate> = self
                .nodes
                .iter()
                .filter(|n| {
                    n.joined
                        && !n.left(e)
                        && n.spec.class == LicenseClass::Nd
                        && self.registry.dauth_validate(&n.spec.id)
                        && n.spec.capacity
                            >= load.get(&n.spec.id).copied().unwrap_or(0) + resources
                })
                .map(|n| NodeCandidate {
                    node: n.spec.id.clone(),
                    score: self.jobs.score(&n.spec.id),
                    load: load.get(&n.spec.id).copied().unwrap_or(0),
                })
                .collect();
            match self.jobs.assign_job(id, &candidates) {
                Ok(node) => {
                    *load.entry(node.clone()).or_insert(0) += resources;
                    self.log.push(e, t, EventKind::JobAssigned { job: id, node });
                }
                Err(_) => {
                    self.log.push(e, t, EventKind::JobWaiting { job: id });
                }
            }
        }
        // every running job serves this epoch and awaits its finalization
        let serving: Vec<(NodeId, JobId)> = self
            .jobs
            .jobs()
            .filter(|j| j.state == JobState::Running)
            .filter_map(|j| j.assigned.clone().map(|n| (n, j.id)))
            .collect();
        for (node, job) in serving {
            self.assignments_at.entry((node, e)).or_default().push(job);
        }
    }

    // -- phase 2: heartbeats --------------------------------------------

    fn heartbeat_phase(&mut self, e: u64, t: u64) {
        let mh = self.mh;
        let loss = self.sc.heartbeat_loss_prob;
        for node in &mut self.nodes {
            // the physical machine runs regardless of authorization
            let up = node.uptime.up_slots(EpochId(e), mh, &mut node.rng_uptime);
            let active = node.joined
                && !node.left(e)
                && self.registry.dauth_validate(&node.spec.id);
            if !active {
                continue;
            }
            let per_oracle: Vec<u32> = node
                .rng_loss
                .iter_mut()
                .map(|rng| crate::liveness::oracle_received(up, loss, rng).min(mh))
                .collect();
            self.hb
                .record(node.spec.id.clone(), EpochId(e), up, per_oracle.clone());
            self.log.push(
                e,
                t,
                EventKind::Heartbeats {
                    node: node.spec.id.clone(),
                    up_slots: up,
                    received: per_oracle,
                },
            );
        }
    }

    // -- phase 3: oracle self-gating --------------------------------------

    fn gate_phase(&mut self, e: u64, t: u64) {
        let mh = self.mh;
        for o in &mut self.oracles {
            let up = o.uptime.up_slots(EpochId(e), mh, &mut o.rng_uptime);
            o.self_availability = byte_availability(up, mh);
            o.eligible = consensus::self_gate(o.self_availability);
            let alpha = 0.1;
            o.ema = (1.0 - alpha) * o.ema + alpha * (o.self_availability as f64 / 255.0);
        }
        for o in &self.oracles {
            self.log.push(
                e,
                t,
                EventKind::OracleGate {
                    oracle: o.spec.id.clone(),
                    self_availability: o.self_availability,
                    eligible: o.eligible,
                },
            );
        }
        // designate the round's proof submitter among eligible oracles
        let profiles: Vec<OracleProfile> = self
            .oracles
            .iter()
            .filter(|o| o.eligible)
            .map(|o| OracleProfile {
                id: o.spec.id.clone(),
                cost: o.spec.cost,
                ema_availability: o.ema,
            })
            .collect();
        let cap = self.sc.oracle_cost_cap.unwrap_or(f64::INFINITY);
        match select_oracle(&profiles, cap) {
            Ok(oracle) => self.log.push(e, t, EventKind::OracleSelected { oracle }),
            Err(_) if !profiles.is_empty() => self
                .flags
                .push(format!("epoch {e}: no eligible oracle within the cost cap")),
            Err(_) => {}
        }
    }

    // -- phase 4: finalization -------------------------------------------

    fn finalize_round(&mut self, e: u64, t: u64) {
        let mut targets: Vec<(u64, NodeId)> = std::mem::take(&mut self.retry_queue);
        targets.sort();
        let mut current: Vec<NodeId> = self
            .nodes
            .iter()
            .filter(|n| self.hb.counts_for(&n.spec.id, EpochId(e)).is_some())
            .map(|n| n.spec.id.clone())
            .collect();
        current.sort();
        targets.extend(current.into_iter().map(|n| (e, n)));

        for (measured, node) in targets {
            self.finalize_one(measured, &node, e, t);
        }
    }

    fn finalize_one(&mut self, measured: u64, node: &NodeId, round: u64, t: u64) {
        let counts = self
            .hb
            .counts_for(node, EpochId(measured))
            .expect("finalization targets have heartbeat records")
            .to_vec();
        let mut votes: Vec<OracleVote> = Vec::new();
        let mut vote_entries: Vec<VoteEntry> = Vec::new();
        let mut byzantine_votes = 0usize;
        for (i, o) in self.oracles.iter_mut().enumerate() {
            if !o.eligible {
                continue;
            }
            let honest = byte_availability(counts[i], self.mh);
            let value = match o.spec.byzantine {
                Some(strategy) => {
                    byzantine_votes += 1;
                    strategy.vote(honest, &mut o.rng_byz)
                }
                None => honest,
            };
            votes.push(OracleVote {
                oracle: o.spec.id.clone(),
                node: node.clone(),
                epoch: EpochId(measured),
                h_value: value,
            });
            vote_entries.push(VoteEntry {
                oracle: o.spec.id.clone(),
                value,
            });
        }
        let result = finalize_epoch(node, EpochId(measured), &votes, self.oracles.len())
            .expect("engine casts one vote per oracle");
        if !result.finalized {
            self.log.push(
                round,
                t,
                EventKind::FinalizationDeferred {
                    node: node.clone(),
                    measured_epoch: measured,
                    eligible_votes: result.quorum_size,
                    required: result.quorum_required,
                },
            );
            self.retry_queue.push((measured, node.clone()));
            return;
        }
        self.log.push(
            round,
            t,
            EventKind::Finalized {
                node: node.clone(),
                measured_epoch: measured,
                availability: result.availability,
                service_flag: result.availability >= params::GATE_MIN_BYTE,
                quorum: result.quorum_size,
                votes: vote_entries,
            },
        );
        self.apply_finalized(&result, counts, byzantine_votes, round, t);
    }

    /// Post-finalization hooks: score update, emission accrual, job
    /// monitoring and settlement.
    fn apply_finalized(
        &mut self,
        result: &ConsensusResult,
        per_oracle: Vec<u32>,
        byzantine_votes: usize,
        round: u64,
        t: u64,
    ) {
        let node = result.node.clone();
        let measured = result.epoch.0;
        let a = result.availability;

        self.jobs.update_score(&node, a);

        let minted = self.accrue_poa(&node, measured, a, round, t);
        self.epoch_rows.push(EpochRow {
            node: node.clone(),
            epoch: measured,
            per_oracle,
            availability: a,
            finalized: true,
            minted,
            eligible_votes: result.quorum_size,
            byzantine_votes,
        });

        self.monitor_jobs(&node, measured, a, round, t);
    }

    fn accrue_poa(&mut self, node: &NodeId, measured: u64, a: u8, round: u64, t: u64) -> TokenAmount {
        if a == 0 {
            return TokenAmount::ZERO; // downtime pauses the emission clock
        }
        let Some(license_id) = self.registry.license_of_node(node).map(|l| l.id) else {
            return TokenAmount::ZERO;
        };
        let (class, complete_before) = {
            let lic = self.registry.license(license_id).expect("indexed");
            (lic.class, lic.is_complete())
        };
        if complete_before {
            return TokenAmount::ZERO;
        }
        let lic = self.registry.license_mut(license_id).expect("indexed");
        match epoch_accrual(lic, a, &mut self.ledger) {
            Ok(minted) => {
                let credits = lic.credits_scaled;
                let completed = lic.is_complete();
                if !minted.is_zero() {
                    self.log.push(
                        round,
                        t,
                        EventKind::PoaMint {
                            license: license_id,
                            node: node.clone(),
                            measured_epoch: measured,
                            availability: a,
                            amount: minted,
                            credits_scaled: credits,
                        },
                    );
                    if class == LicenseClass::Gnd {
                        let shares = crate::ledger::split_shares(minted, &params::GND_POOL_SPLIT)
                            .expect("constant shares sum to 1000");
                        self.log.push(
                            round,
                            t,
                            EventKind::GndRouted {
                                amount: minted,
                                shares: shares
                                    .into_iter()
                                    .map(|(pool, amount)| PoolShare { pool, amount })
                                    .collect(),
                            },
                        );
                    }
                }
                if completed {
                    self.log.push(round, t, EventKind::LicenseCompleted { license: license_id });
                }
                minted
            }
            Err(err) => {
                self.flags
                    .push(format!("accrual for {node} at epoch {measured} failed: {err}"));
                TokenAmount::ZERO
            }
        }
    }

    fn monitor_jobs(&mut self, node: &NodeId, measured: u64, a: u8, round: u64, t: u64) {
        let Some(job_ids) = self.assignments_at.remove(&(node.clone(), measured)) else {
            return;
        };
        for id in job_ids {
            match self.jobs.monitor_epoch(id, EpochId(measured), a) {
                Ok(outcome) => {
                    self.log.push(
                        round,
                        t,
                        EventKind::JobMonitored {
                            job: id,
                            node: node.clone(),
                            measured_epoch: measured,
                            availability: a,
                            passed: outcome.passed,
                            consumed: outcome.consumed,
                        },
                    );
                    if outcome.transferred {
                        self.log.push(
                            round,
                            t,
                            EventKind::JobTransferred {
                                job: id,
                                from: node.clone(),
                            },
                        );
                    }
                    if outcome.complete {
                        self.settle_job(id, false, round, t);
                    }
                }
                Err(err) => self
                    .flags
                    .push(format!("monitor of {id} at epoch {measured} failed: {err}")),
            }
        }
    }

    fn settle_job(&mut self, id: JobId, forced: bool, round: u64, t: u64) {
        let owners = self.serving_owners(id);
        let settled = if forced {
            self.jobs.force_settle(&mut self.ledger, id, &owners)
        } else {
            self.jobs.settle(&mut self.ledger, id, &owners)
        };
        match settled {
            Ok(rec) => {
                self.log.push(
                    round,
                    t,
                    EventKind::JobSettled {
                        job: id,
                        payable: rec.payable,
                        released: rec.released,
                        burned: rec.burned,
                        refunded: rec.refunded,
                        forced: rec.forced,
                        payouts: rec
                            .payouts
                            .iter()
                            .map(|p| PayoutEntry {
                                node: p.node.clone(),
                                owner: p.owner.clone(),
                                epochs_served: p.epochs_served,
                                amount: p.amount,
                            })
                            .collect(),
                    },
                );
                self.settlements.push(rec);
            }
            Err(err) => self.flags.push(format!("settlement of {id} failed: {err}")),
        }
    }

    fn serving_owners(&self, id: JobId) -> BTreeMap<NodeId, AccountId> {
        let mut owners = BTreeMap::new();
        if let Ok(job) = self.jobs.job(id) {
            for node in &job.node_history {
                if let Some(lic) = self.registry.license_of_node(node) {
                    owners.insert(node.clone(), lic.owner.clone());
                }
            }
        }
        owners
    }

    // -- phase 5: stragglers and end-of-run --------------------------------

    /// Jobs whose serving node produced no heartbeats this epoch (left,
    /// lost authorization) fail the epoch outright and transfer.
    fn fail_unmeasured_assignments(&mut self, e: u64, t: u64) {
        let stale: Vec<(NodeId, u64)> = self
            .assignments_at
            .keys()
            .filter(|(node, epoch)| {
                *epoch == e && self.hb.counts_for(node, EpochId(e)).is_none()
            })
            .cloned()
            .collect();
        for (node, epoch) in stale {
            self.monitor_jobs(&node.clone(), epoch, 0, e, t);
        }
    }

    /// Epochs still unfinalized when the scenario ends default to
    /// availability 0 and are flagged; service on them counts as failed.
    fn default_unfinalized(&mut self, round: u64, t: u64) {
        let mut leftovers = std::mem::take(&mut self.retry_queue);
        leftovers.sort();
        for (measured, node) in leftovers {
            self.unfinalized += 1;
            self.flags.push(format!(
                "epoch {measured} for node {node} never finalized; availability defaulted to 0"
            ));
            self.log.push(
                round,
                t,
                EventKind::FinalizationDefaulted {
                    node: node.clone(),
                    measured_epoch: measured,
                },
            );
            let per_oracle = self
                .hb
                .counts_for(&node, EpochId(measured))
                .map(|c| c.to_vec())
                .unwrap_or_default();
            self.epoch_rows.push(EpochRow {
                node: node.clone(),
                epoch: measured,
                per_oracle,
                availability: 0,
                finalized: false,
                minted: TokenAmount::ZERO,
                eligible_votes: 0,
                byzantine_votes: 0,
            });
            self.monitor_jobs(&node, measured, 0, round, t);
        }
    }

    fn force_settle_outstanding(&mut self, round: u64, t: u64) {
        for id in self.jobs.job_ids() {
            let state = self.jobs.job(id).expect("listed").state;
            if matches!(state, JobState::Pending | JobState::Running | JobState::Transferred) {
                self.flags
                    .push(format!("{id} still open at scenario end; settled early"));
                self.settle_job(id, true, round, t);
            }
        }
    }

    // -- phase 6: snapshot -------------------------------------------------

    fn snapshot(&mut self, e: u64) {
        let pools: Vec<(PoolId, TokenAmount)> = PoolId::ALL
            .into_iter()
            .map(|p| (p, self.ledger.pool(p).balance))
            .collect();
        if !self.ledger.conservation_holds() {
            self.flags
                .push(format!("CONSERVATION VIOLATION after epoch {e}"));
            debug_assert!(false, "conservation violated at epoch {e}");
        }
        self.log.push(
            e,
            (e + 1) * params::EPOCH_SECONDS,
            EventKind::SupplySnapshot {
                minted: self.ledger.minted_total(),
                burned: self.ledger.burned_total(),
                circulating: self.ledger.circulating(),
                pools: pools
                    .iter()
                    .map(|(pool, amount)| PoolShare {
                        pool: *pool,
                        amount: *amount,
                    })
                    .collect(),
            },
        );
        self.supply_rows.push(SupplyRow {
            epoch: e,
            minted: self.ledger.minted_total(),
            burned: self.ledger.burned_total(),
            circulating: self.ledger.circulating(),
            pools,
        });
    }

    fn finish(mut self) -> SimRun {
        self.epoch_rows.sort_by(|a, b| {
            (a.epoch, a.node.clone()).cmp(&(b.epoch, b.node.clone()))
        });
        SimRun {
            scenario: self.sc,
            seed: self.seed,
            events: self.log,
            ledger: self.ledger,
            registry: self.registry,
            jobs: self.jobs,
            epoch_rows: self.epoch_rows,
            supply_rows: self.supply_rows,
            settlements: self.settlements,
            unfinalized_epochs: self.unfinalized,
            flags: self.flags,
        }
    }
}
