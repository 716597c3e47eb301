//! Report writers. Every figure here is a pure view of a finished
//! [`SimRun`]; monetary values are emitted both as exact base-unit
//! integers and as human-readable decimal strings.

use crate::amount::TokenAmount;
use crate::ledger::PoolId;
use crate::poai::JobState;
use crate::sim::engine::SimRun;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

/// A token amount rendered for reports.
#[derive(Debug, Clone, Serialize)]
pub struct Money {
    pub units: String,
    pub r1: String,
}

impl From<TokenAmount> for Money {
    fn from(a: TokenAmount) -> Self {
        Money {
            units: a.units().to_string(),
            r1: a.to_decimal_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LicenseSummary {
    pub license: String,
    pub class: String,
    pub owner: String,
    pub node: Option<String>,
    pub cap: Money,
    pub credit_span: u32,
    pub credits_scaled: u64,
    pub minted: Money,
    pub remaining: Money,
    pub completed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JobSummary {
    pub job: String,
    pub state: String,
    pub sponsor: String,
    pub fee: Money,
    pub resources: u64,
    pub duration: u32,
    pub passed_epochs: u32,
    pub nodes: Vec<String>,
    pub payable: Money,
    pub released: Money,
    pub burned: Money,
    pub refunded: Money,
    pub forced: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AccountSummary {
    pub account: String,
    pub balance: Money,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub minted: Money,
    pub burned: Money,
    pub circulating: Money,
    pub hard_cap: Money,
}

/// The run digestible at a glance; written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub duration_epochs: u64,
    pub digest: String,
    pub conservation_ok: bool,
    pub unfinalized_epochs: u64,
    pub totals: Totals,
    pub pools: BTreeMap<String, Money>,
    pub accounts: Vec<AccountSummary>,
    pub licenses: Vec<LicenseSummary>,
    pub jobs: Vec<JobSummary>,
    pub flags: Vec<String>,
}

fn job_state_str(state: JobState) -> &'static str {
    match state {
        JobState::Pending => "pending",
        JobState::Running => "running",
        JobState::Transferred => "transferred",
        JobState::Settled => "settled",
        JobState::Aborted => "aborted",
    }
}

fn license_summaries(run: &SimRun) -> Vec<LicenseSummary> {
    run.registry
        .licenses()
        .map(|lic| LicenseSummary {
            license: lic.id.to_string(),
            class: lic.class.as_str().to_string(),
            owner: lic.owner.to_string(),
            node: lic.node.as_ref().map(|n| n.to_string()),
            cap: lic.cap.into(),
            credit_span: lic.credit_span,
            credits_scaled: lic.credits_scaled,
            minted: lic.minted.into(),
            remaining: lic.remaining().into(),
            completed: lic.is_complete(),
        })
        .collect()
}

fn job_summaries(run: &SimRun) -> Vec<JobSummary> {
    run.jobs
        .jobs()
        .map(|job| {
            let settlement = run.settlements.iter().find(|s| s.job == job.id);
            JobSummary {
                job: job.id.to_string(),
                state: job_state_str(job.state).to_string(),
                sponsor: job.sponsor.to_string(),
                fee: job.fee.into(),
                resources: job.resources,
                duration: job.duration,
                passed_epochs: job.passed_epochs(),
                nodes: job.node_history.iter().map(|n| n.to_string()).collect(),
                payable: job.consumed().into(),
                released: settlement.map(|s| s.released).unwrap_or(TokenAmount::ZERO).into(),
                burned: settlement.map(|s| s.burned).unwrap_or(TokenAmount::ZERO).into(),
                refunded: settlement.map(|s| s.refunded).unwrap_or(TokenAmount::ZERO).into(),
                forced: settlement.map(|s| s.forced),
            }
        })
        .collect()
}

/// Aggregate a finished run into the summary document.
pub fn report_summary(run: &SimRun) -> Summary {
    let pools = PoolId::ALL
        .into_iter()
        .map(|p| (p.as_str().to_string(), run.ledger.pool(p).balance.into()))
        .collect();
    Summary {
        seed: run.seed,
        duration_epochs: run.scenario.duration_epochs,
        digest: run.events.digest(),
        conservation_ok: run.ledger.conservation_holds(),
        unfinalized_epochs: run.unfinalized_epochs,
        totals: Totals {
            minted: run.ledger.minted_total().into(),
            burned: run.ledger.burned_total().into(),
            circulating: run.ledger.circulating().into(),
            hard_cap: run.ledger.hard_cap().into(),
        },
        pools,
        accounts: run
            .ledger
            .accounts()
            .map(|(id, balance)| AccountSummary {
                account: id.to_string(),
                balance: balance.into(),
            })
            .collect(),
        licenses: license_summaries(run),
        jobs: job_summaries(run),
        flags: run.flags.clone(),
    }
}

fn epochs_csv(run: &SimRun) -> String {
    let mut out = String::from(
        "node,epoch,heartbeats_per_oracle,A,finalized,minted_this_epoch,minted_this_epoch_units,\
         eligible_oracles,byzantine_votes\n",
    );
    for row in &run.epoch_rows {
        let hb = row
            .per_oracle
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("|");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.node,
            row.epoch,
            hb,
            row.availability,
            row.finalized,
            row.minted.to_decimal_string(),
            row.minted.units(),
            row.eligible_votes,
            row.byzantine_votes
        );
    }
    out
}

fn supply_csv(run: &SimRun) -> String {
    let mut out = String::from("epoch,minted,minted_units,burned,burned_units,circulating,circulating_units");
    for p in PoolId::ALL {
        let _ = write!(out, ",pool_{p},pool_{p}_units");
    }
    out.push('\n');
    for row in &run.supply_rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            row.epoch,
            row.minted.to_decimal_string(),
            row.minted.units(),
            row.burned.to_decimal_string(),
            row.burned.units(),
            row.circulating.to_decimal_string(),
            row.circulating.units()
        );
        for (_, balance) in &row.pools {
            let _ = write!(out, ",{},{}", balance.to_decimal_string(), balance.units());
        }
        out.push('\n');
    }
    out
}

fn jobs_csv(run: &SimRun) -> String {
    let mut out = String::from(
        "job,sponsor,state,fee,fee_units,resources,duration,passed_epochs,nodes,outcomes,\
         payable,payable_units,released,released_units,burned,burned_units,refunded,refunded_units,forced\n",
    );
    for job in run.jobs.jobs() {
        let settlement = run.settlements.iter().find(|s| s.job == job.id);
        let nodes = job
            .node_history
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let outcomes = job
            .outcomes
            .iter()
            .map(|o| {
                format!(
                    "{}:{}:{}",
                    o.epoch.0,
                    o.availability,
                    if o.passed { "pass" } else { "fail" }
                )
            })
            .collect::<Vec<_>>()
            .join("|");
        let (released, burned, refunded) = settlement
            .map(|s| (s.released, s.burned, s.refunded))
            .unwrap_or((TokenAmount::ZERO, TokenAmount::ZERO, TokenAmount::ZERO));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            job.id,
            job.sponsor,
            job_state_str(job.state),
            job.fee.to_decimal_string(),
            job.fee.units(),
            job.resources,
            job.duration,
            job.passed_epochs(),
            nodes,
            outcomes,
            job.consumed().to_decimal_string(),
            job.consumed().units(),
            released.to_decimal_string(),
            released.units(),
            burned.to_decimal_string(),
            burned.units(),
            refunded.to_decimal_string(),
            refunded.units(),
            settlement.map(|s| s.forced.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Paths of everything [`write_reports`] produced.
#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub events_log: PathBuf,
    pub epochs_csv: PathBuf,
    pub supply_csv: PathBuf,
    pub jobs_csv: PathBuf,
    pub licenses_json: PathBuf,
    pub summary_json: PathBuf,
}

/// Write the full report set into `out_dir` (created if missing).
pub fn write_reports(run: &SimRun, out_dir: impl AsRef<Path>) -> io::Result<ReportPaths> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let paths = ReportPaths {
        events_log: dir.join("events.log"),
        epochs_csv: dir.join("epochs.csv"),
        supply_csv: dir.join("supply.csv"),
        jobs_csv: dir.join("jobs.csv"),
        licenses_json: dir.join("licenses.json"),
        summary_json: dir.join("summary.json"),
    };
    std::fs::write(&paths.events_log, run.events.to_jsonl())?;
    std::fs::write(&paths.epochs_csv, epochs_csv(run))?;
    std::fs::write(&paths.supply_csv, supply_csv(run))?;
    std::fs::write(&paths.jobs_csv, jobs_csv(run))?;
    let licenses = serde_json::to_vec_pretty(&license_summaries(run)).expect("serializable");
    std::fs::write(&paths.licenses_json, licenses)?;
    let summary = serde_json::to_vec_pretty(&report_summary(run)).expect("serializable");
    std::fs::write(&paths.summary_json, summary)?;
    Ok(paths)
}

/// Recompute a (node, epoch) availability from the event log; reports
/// carry nothing that the log cannot reproduce.
pub fn availability_from_events(run: &SimRun, node: &str, epoch: u64) -> Option<u8> {
    use crate::sim::event::EventKind;
    run.events.events().iter().find_map(|ev| match &ev.kind {
        EventKind::Finalized {
            node: n,
            measured_epoch,
            availability,
            ..
        } if n.as_str() == node && *measured_epoch == epoch => Some(*availability),
        _ => None,
    })
}
