//! Scenario configuration: JSON schema, defaults, shorthand expansion
//! and validation.
//!
//! Syntax problems surface as [`ConfigError::Parse`] with line/column
//! diagnostics; everything semantic — unknown fields, bad bounds,
//! dangling references — collects into [`ConfigError::Validation`].
//!
//! Two shorthands keep small configs small: `"nodes": 3` expands to
//! three always-up standard-deed nodes with auto-funded operator
//! accounts, and `"oracles": 4` to four always-up oracles.

use crate::amount::TokenAmount;
use crate::consensus::ByzantineStrategy;
use crate::ids::{AccountId, NodeId};
use crate::licensing::LicenseClass;
use crate::liveness::UptimeModel;
use crate::params;
use serde::Deserialize;
use serde_json::Value;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config:\n{}", problems.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n"))]
    Validation { problems: Vec<String> },
}

fn validation(problem: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        problems: vec![problem.into()],
    }
}

// ---------------------------------------------------------------------
// raw (serde) layer
// ---------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    duration_epochs: u64,
    heartbeat_interval_s: Option<u32>,
    rng_seed: Option<u64>,
    maturity_unlock_epoch: Option<u64>,
    fee_rate: Option<TokenAmount>,
    default_job_duration: Option<u32>,
    heartbeat_loss_prob: Option<f64>,
    score_smoothing: Option<f64>,
    oracle_cost_cap: Option<f64>,
    #[serde(default)]
    accounts: Vec<RawAccount>,
    oracles: RawOracles,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    nd_price_tiers: Vec<RawTier>,
    #[serde(default)]
    jobs: Vec<RawJob>,
    #[serde(default)]
    kyc_revocations: Vec<RawRevocation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAccount {
    id: String,
    kyc: Option<bool>,
    balance: Option<TokenAmount>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracles {
    count: usize,
    /// Uptime models: empty = all always-up, one entry = broadcast,
    /// otherwise one per oracle.
    #[serde(default)]
    uptime: Vec<UptimeModel>,
    #[serde(default)]
    byzantine: Vec<RawByzantine>,
    costs: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawByzantine {
    oracle: usize,
    strategy: RawStrategy,
    delta: Option<i16>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawStrategy {
    Zero,
    Max,
    Random,
    Offset,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    owner: Option<String>,
    license: Option<LicenseClass>,
    uptime: Option<UptimeModel>,
    join_epoch: Option<u64>,
    leave_epoch: Option<u64>,
    capacity: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTier {
    count: u64,
    price: TokenAmount,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    submit_epoch: u64,
    sponsor: String,
    fee: TokenAmount,
    resources: u64,
    duration: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRevocation {
    account: String,
    epoch: u64,
}

// ---------------------------------------------------------------------
// normalized layer
// ---------------------------------------------------------------------

pub const DEFAULT_HEARTBEAT_INTERVAL_S: u32 = 10;
pub const DEFAULT_FEE_RATE: &str = "0.001";
pub const DEFAULT_NODE_CAPACITY: u64 = 100;
pub const DEFAULT_ND_PRICE: &str = "500";
pub const DEFAULT_SCORE_SMOOTHING: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct AccountSpec {
    pub id: AccountId,
    pub kyc: bool,
    pub balance: TokenAmount,
}

#[derive(Debug, Clone)]
pub struct OracleSpec {
    pub id: NodeId,
    pub uptime: UptimeModel,
    pub cost: f64,
    pub byzantine: Option<ByzantineStrategy>,
}

#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub id: NodeId,
    pub owner: AccountId,
    pub class: LicenseClass,
    pub uptime: UptimeModel,
    pub join_epoch: u64,
    pub leave_epoch: Option<u64>,
    pub capacity: u64,
}

#[derive(Debug, Clone)]
pub struct JobSpec {
    pub submit_epoch: u64,
    pub sponsor: AccountId,
    pub fee: TokenAmount,
    pub resources: u64,
    pub duration: Option<u32>,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub duration_epochs: u64,
    pub heartbeat_interval_s: u32,
    pub rng_seed: u64,
    pub maturity_unlock_epoch: Option<u64>,
    pub fee_rate: TokenAmount,
    pub default_job_duration: u32,
    pub heartbeat_loss_prob: f64,
    pub score_smoothing: f64,
    pub oracle_cost_cap: Option<f64>,
    pub accounts: Vec<AccountSpec>,
    pub oracles: Vec<OracleSpec>,
    pub nodes: Vec<NodeSpec>,
    pub nd_price_tiers: Vec<(u64, TokenAmount)>,
    pub jobs: Vec<JobSpec>,
    pub kyc_revocations: Vec<(AccountId, u64)>,
}

/// Load, normalize and validate a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Same as [`load_config`] from an in-memory JSON string.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    expand_shorthand(&mut value)?;
    let raw: RawScenario = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let msg = e.into_inner().to_string();
        validation(if path == "." {
            msg
        } else {
            format!("{path}: {msg}")
        })
    })?;
    normalize(raw)
}

/// `"nodes": 3` → three default node objects; `"oracles": 4` →
/// `{"count": 4}`.
fn expand_shorthand(value: &mut Value) -> Result<(), ConfigError> {
    let Some(root) = value.as_object_mut() else {
        return Err(validation("top-level config must be a JSON object"));
    };
    if let Some(n) = root.get("nodes").and_then(Value::as_u64) {
        let list: Vec<Value> = (0..n)
            .map(|i| serde_json::json!({ "id": format!("node-{i}") }))
            .collect();
        root.insert("nodes".into(), Value::Array(list));
    }
    if let Some(n) = root.get("oracles").and_then(Value::as_u64) {
        root.insert("oracles".into(), serde_json::json!({ "count": n }));
    }
    Ok(())
}

fn normalize(raw: RawScenario) -> Result<Scenario, ConfigError> {
    let mut problems: Vec<String> = Vec::new();

    let nd_price_tiers: Vec<(u64, TokenAmount)> = if raw.nd_price_tiers.is_empty() {
        vec![(
            params::max_nd_count(),
            TokenAmount::from_decimal_str(DEFAULT_ND_PRICE).expect("literal parses"),
        )]
    } else {
        raw.nd_price_tiers.iter().map(|t| (t.count, t.price)).collect()
    };
    let max_tier_price = nd_price_tiers
        .iter()
        .map(|(_, p)| *p)
        .max()
        .unwrap_or(TokenAmount::ZERO);

    let mut accounts: Vec<AccountSpec> = raw
        .accounts
        .iter()
        .map(|a| AccountSpec {
            id: AccountId::new(a.id.clone()),
            kyc: a.kyc.unwrap_or(true),
            balance: a.balance.unwrap_or(TokenAmount::ZERO),
        })
        .collect();

    // auto-fund an operator account per ownerless node
    let mut nodes: Vec<NodeSpec> = Vec::with_capacity(raw.nodes.len());
    for n in &raw.nodes {
        let class = n.license.unwrap_or(LicenseClass::Nd);
        let owner = match &n.owner {
            Some(o) => AccountId::new(o.clone()),
            None => {
                let auto = AccountId::new(format!("op-{}", n.id));
                if !accounts.iter().any(|a| a.id == auto) {
                    accounts.push(AccountSpec {
                        id: auto.clone(),
                        kyc: true,
                        balance: if class == LicenseClass::Nd {
                            max_tier_price
                        } else {
                            TokenAmount::ZERO
                        },
                    });
                }
                auto
            }
        };
        nodes.push(NodeSpec {
            id: NodeId::new(n.id.clone()),
            owner,
            class,
            uptime: n.uptime.clone().unwrap_or(UptimeModel::AlwaysUp),
            join_epoch: n.join_epoch.unwrap_or(0),
            leave_epoch: n.leave_epoch,
            capacity: n.capacity.unwrap_or(DEFAULT_NODE_CAPACITY),
        });
    }

    let oracle_count = raw.oracles.count;
    let mut oracles: Vec<OracleSpec> = Vec::with_capacity(oracle_count);
    for i in 0..oracle_count {
        let uptime = match raw.oracles.uptime.len() {
            0 => UptimeModel::AlwaysUp,
            1 => raw.oracles.uptime[0].clone(),
            _ => raw
                .oracles
                .uptime
                .get(i)
                .cloned()
                .unwrap_or(UptimeModel::AlwaysUp),
        };
        let cost = raw
            .oracles
            .costs
            .as_ref()
            .and_then(|c| c.get(i).copied())
            .unwrap_or(1.0);
        oracles.push(OracleSpec {
            id: NodeId::new(format!("oracle-{i}")),
            uptime,
            cost,
            byzantine: None,
        });
    }
    for b in &raw.oracles.byzantine {
        let strategy = match (b.strategy, b.delta) {
            (RawStrategy::Zero, _) => ByzantineStrategy::Zero,
            (RawStrategy::Max, _) => ByzantineStrategy::Max,
            (RawStrategy::Random, _) => ByzantineStrategy::Random,
            (RawStrategy::Offset, Some(delta)) => ByzantineStrategy::Offset { delta },
            (RawStrategy::Offset, None) => {
                problems.push(format!(
                    "oracles.byzantine[oracle {}]: offset strategy requires a delta",
                    b.oracle
                ));
                continue;
            }
        };
        match oracles.get_mut(b.oracle) {
            Some(o) => {
                if o.byzantine.is_some() {
                    problems.push(format!(
                        "oracles.byzantine: oracle {} configured twice",
                        b.oracle
                    ));
                }
                o.byzantine = Some(strategy);
            }
            None => problems.push(format!(
                "oracles.byzantine: oracle index {} out of range (count {})",
                b.oracle, oracle_count
            )),
        }
    }

    let scenario = Scenario {
        duration_epochs: raw.duration_epochs,
        heartbeat_interval_s: raw
            .heartbeat_interval_s
            .unwrap_or(DEFAULT_HEARTBEAT_INTERVAL_S),
        rng_seed: raw.rng_seed.unwrap_or(0),
        maturity_unlock_epoch: raw.maturity_unlock_epoch,
        fee_rate: raw
            .fee_rate
            .unwrap_or_else(|| TokenAmount::from_decimal_str(DEFAULT_FEE_RATE).expect("literal parses")),
        default_job_duration: raw
            .default_job_duration
            .unwrap_or(crate::poai::DEFAULT_JOB_DURATION),
        heartbeat_loss_prob: raw.heartbeat_loss_prob.unwrap_or(0.0),
        score_smoothing: raw.score_smoothing.unwrap_or(DEFAULT_SCORE_SMOOTHING),
        oracle_cost_cap: raw.oracle_cost_cap,
        accounts,
        oracles,
        nodes,
        nd_price_tiers,
        jobs: raw
            .jobs
            .iter()
            .map(|j| JobSpec {
                submit_epoch: j.submit_epoch,
                sponsor: AccountId::new(j.sponsor.clone()),
                fee: j.fee,
                resources: j.resources,
                duration: j.duration,
            })
            .collect(),
        kyc_revocations: raw
            .kyc_revocations
            .iter()
            .map(|r| (AccountId::new(r.account.clone()), r.epoch))
            .collect(),
    };

    problems.extend(scenario.check());
    if problems.is_empty() {
        Ok(scenario)
    } else {
        Err(ConfigError::Validation { problems })
    }
}

impl Scenario {
    /// All bound violations, empty when the scenario is sound.
    fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let interval = self.heartbeat_interval_s;
        if !(params::HEARTBEAT_INTERVAL_MIN_S..=params::HEARTBEAT_INTERVAL_MAX_S)
            .contains(&interval)
        {
            problems.push(format!(
                "heartbeat_interval_s: {interval} outside the 10–15 s range"
            ));
        }
        if !(0.0..=1.0).contains(&self.heartbeat_loss_prob) {
            problems.push(format!(
                "heartbeat_loss_prob: {} outside [0, 1]",
                self.heartbeat_loss_prob
            ));
        }
        if !(0.0..=1.0).contains(&self.score_smoothing) {
            problems.push(format!(
                "score_smoothing: {} outside [0, 1]",
                self.score_smoothing
            ));
        }
        if self.oracles.is_empty() {
            problems.push("oracles.count: at least one oracle is required".into());
        }
        let byz_count = self.oracles.iter().filter(|o| o.byzantine.is_some()).count();
        if byz_count > 0 && self.oracles.len() < 4 {
            problems.push(format!(
                "oracles.count: {} oracles cannot tolerate Byzantine injection (need ≥ 4)",
                self.oracles.len()
            ));
        }
        for o in &self.oracles {
            if o.cost < 0.0 {
                problems.push(format!("oracles.costs: negative cost for {}", o.id));
            }
            problems.extend(check_uptime(&o.uptime, &format!("oracle {}", o.id)));
        }

        let mut account_ids = std::collections::BTreeSet::new();
        for a in &self.accounts {
            if !account_ids.insert(a.id.clone()) {
                problems.push(format!("accounts: duplicate id {}", a.id));
            }
        }

        let mut node_ids = std::collections::BTreeSet::new();
        let mut gnd_count = 0usize;
        for n in &self.nodes {
            if !node_ids.insert(n.id.clone()) {
                problems.push(format!("nodes: duplicate id {}", n.id));
            }
            if self.oracles.iter().any(|o| o.id == n.id) {
                problems.push(format!("nodes: id {} collides with an oracle id", n.id));
            }
            if !account_ids.contains(&n.owner) {
                problems.push(format!(
                    "nodes[{}].owner: account {} is not declared",
                    n.id, n.owner
                ));
            }
            if n.class == LicenseClass::Gnd {
                gnd_count += 1;
            }
            if let Some(leave) = n.leave_epoch {
                if leave <= n.join_epoch {
                    problems.push(format!(
                        "nodes[{}]: leave_epoch {} not after join_epoch {}",
                        n.id, leave, n.join_epoch
                    ));
                }
            }
            if n.capacity == 0 {
                problems.push(format!("nodes[{}].capacity: must be positive", n.id));
            }
            problems.extend(check_uptime(&n.uptime, &format!("node {}", n.id)));
        }
        if gnd_count > 1 {
            problems.push(format!(
                "nodes: {gnd_count} genesis-deed nodes configured; the genesis deed is singular"
            ));
        }

        for (i, (count, _)) in self.nd_price_tiers.iter().enumerate() {
            if *count == 0 {
                problems.push(format!("nd_price_tiers[{i}].count: must be positive"));
            }
        }

        for (i, j) in self.jobs.iter().enumerate() {
            if !account_ids.contains(&j.sponsor) {
                problems.push(format!(
                    "jobs[{i}].sponsor: account {} is not declared",
                    j.sponsor
                ));
            }
            if j.submit_epoch >= self.duration_epochs && self.duration_epochs > 0 {
                problems.push(format!(
                    "jobs[{i}].submit_epoch: {} beyond the last epoch {}",
                    j.submit_epoch,
                    self.duration_epochs - 1
                ));
            }
            if j.resources == 0 {
                problems.push(format!("jobs[{i}].resources: must be positive"));
            }
            if j.duration == Some(0) {
                problems.push(format!("jobs[{i}].duration: must be positive"));
            }
        }

        for (acct, epoch) in &self.kyc_revocations {
            if !account_ids.contains(acct) {
                problems.push(format!(
                    "kyc_revocations: account {acct} is not declared"
                ));
            }
            if *epoch >= self.duration_epochs && self.duration_epochs > 0 {
                problems.push(format!(
                    "kyc_revocations: epoch {epoch} beyond the scenario end"
                ));
            }
        }

        problems
    }
}

fn check_uptime(model: &UptimeModel, ctx: &str) -> Vec<String> {
    let mut problems = Vec::new();
    let mut check_p = |name: &str, p: f64| {
        if !(0.0..=1.0).contains(&p) {
            problems.push(format!("{ctx}: {name} {p} outside [0, 1]"));
        }
    };
    match model {
        UptimeModel::AlwaysUp | UptimeModel::AlwaysDown => {}
        UptimeModel::Fixed { fraction } => check_p("fraction", *fraction),
        UptimeModel::Scripted { fractions } => {
            for (i, f) in fractions.iter().enumerate() {
                check_p(&format!("fractions[{i}]"), *f);
            }
        }
        UptimeModel::BernoulliEpoch { p_up } => check_p("p_up", *p_up),
        UptimeModel::GilbertElliott { p_fail, p_recover, .. } => {
            check_p("p_fail", *p_fail);
            check_p("p_recover", *p_recover);
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_shorthand_config_fills_defaults() {
        let s = parse_config(r#"{"nodes": 1, "oracles": 4, "duration_epochs": 10}"#).unwrap();
        assert_eq!(s.duration_epochs, 10);
        assert_eq!(s.heartbeat_interval_s, 10);
        assert_eq!(s.rng_seed, 0);
        assert_eq!(s.default_job_duration, 30);
        assert_eq!(s.fee_rate, TokenAmount::from_decimal_str("0.001").unwrap());
        assert_eq!(s.nodes.len(), 1);
        assert_eq!(s.nodes[0].id, NodeId::new("node-0"));
        assert_eq!(s.nodes[0].class, LicenseClass::Nd);
        assert_eq!(s.oracles.len(), 4);
        // the auto operator account can afford the default tier price
        let op = &s.accounts[0];
        assert_eq!(op.id, AccountId::new("op-node-0"));
        assert!(op.kyc);
        assert_eq!(op.balance, TokenAmount::from_decimal_str(DEFAULT_ND_PRICE).unwrap());
    }

    #[test]
    fn out_of_range_interval_is_a_validation_error() {
        let err =
            parse_config(r#"{"nodes": 1, "oracles": 4, "duration_epochs": 5, "heartbeat_interval_s": 20}"#)
                .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems.iter().any(|p| p.contains("heartbeat_interval_s")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_named() {
        let err =
            parse_config(r#"{"nodes": 1, "oracles": 4, "duration_epochs": 5, "spindle": 3}"#)
                .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems[0].contains("spindle"), "got {problems:?}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_config("{\"duration_epochs\": 5,\n  ?}").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn byzantine_requires_enough_oracles() {
        let err = parse_config(
            r#"{"nodes": 1, "duration_epochs": 5,
                "oracles": {"count": 3, "byzantine": [{"oracle": 0, "strategy": "zero"}]}}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems.iter().any(|p| p.contains("Byzantine")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn byzantine_index_and_offset_delta_checked() {
        let err = parse_config(
            r#"{"nodes": 1, "duration_epochs": 5,
                "oracles": {"count": 5, "byzantine": [
                    {"oracle": 9, "strategy": "zero"},
                    {"oracle": 1, "strategy": "offset"}]}}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems.iter().any(|p| p.contains("out of range")));
                assert!(problems.iter().any(|p| p.contains("delta")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_references_rejected() {
        let err = parse_config(
            r#"{"duration_epochs": 5, "oracles": 4,
                "nodes": [{"id": "n0", "owner": "ghost"}],
                "jobs": [{"submit_epoch": 1, "sponsor": "ghost2", "fee": "1", "resources": 1}]}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems.iter().any(|p| p.contains("ghost") && p.contains("n0")));
                assert!(problems.iter().any(|p| p.contains("ghost2")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn full_config_round_trip() {
        let s = parse_config(
            r#"{
              "duration_epochs": 50,
              "rng_seed": 7,
              "maturity_unlock_epoch": 40,
              "heartbeat_loss_prob": 0.05,
              "accounts": [
                {"id": "foundation", "balance": "0"},
                {"id": "alice", "balance": "2000"},
                {"id": "buyer", "kyc": false}
              ],
              "oracles": {"count": 4, "uptime": [{"model": "fixed", "fraction": 0.999}],
                          "byzantine": [{"oracle": 3, "strategy": "offset", "delta": -40}],
                          "costs": [1.0, 2.0, 1.5, 1.0]},
              "nodes": [
                {"id": "gnd-node", "owner": "foundation", "license": "gnd"},
                {"id": "n0", "owner": "alice",
                 "uptime": {"model": "gilbert_elliott", "p_fail": 0.001, "p_recover": 0.1}},
                {"id": "n1", "owner": "alice", "join_epoch": 10, "leave_epoch": 30}
              ],
              "nd_price_tiers": [{"count": 10, "price": "500"}, {"count": 10, "price": "750"}],
              "jobs": [{"submit_epoch": 2, "sponsor": "alice", "fee": "30", "resources": 4, "duration": 10}],
              "kyc_revocations": [{"account": "alice", "epoch": 45}]
            }"#,
        )
        .unwrap();
        assert_eq!(s.nodes.len(), 3);
        assert_eq!(s.nodes[0].class, LicenseClass::Gnd);
        assert_eq!(s.oracles[3].byzantine, Some(ByzantineStrategy::Offset { delta: -40 }));
        assert_eq!(s.oracles[1].cost, 2.0);
        assert_eq!(s.nd_price_tiers.len(), 2);
        assert_eq!(s.jobs[0].duration, Some(10));
        assert_eq!(s.kyc_revocations[0], (AccountId::new("alice"), 45));
    }

    #[test]
    fn two_gnd_nodes_rejected() {
        let err = parse_config(
            r#"{"duration_epochs": 5, "oracles": 4,
                "accounts": [{"id": "f"}],
                "nodes": [{"id": "g0", "owner": "f", "license": "gnd"},
                          {"id": "g1", "owner": "f", "license": "gnd"}]}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::Validation { problems } => {
                assert!(problems.iter().any(|p| p.contains("singular")));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
