//! Shared scenario builders for the benchmark targets.

use r1sim_core::sim::{parse_config, Scenario};

/// A mid-sized mixed scenario: bursty nodes, lossy heartbeats, one
/// adversarial oracle and a stream of jobs.
pub fn mixed_scenario(epochs: u64) -> Scenario {
    let config = format!(
        r#"{{
        "duration_epochs": {epochs},
        "rng_seed": 11,
        "heartbeat_loss_prob": 0.02,
        "accounts": [
            {{"id": "fund", "balance": "10000"}},
            {{"id": "client", "balance": "5000"}}
        ],
        "oracles": {{"count": 6, "byzantine": [{{"oracle": 5, "strategy": "random"}}]}},
        "nodes": [
            {{"id": "n0", "owner": "fund",
              "uptime": {{"model": "gilbert_elliott", "p_fail": 0.0001, "p_recover": 0.05}}}},
            {{"id": "n1", "owner": "fund"}},
            {{"id": "n2", "owner": "fund", "uptime": {{"model": "bernoulli_epoch", "p_up": 0.95}}}},
            {{"id": "n3", "owner": "fund", "join_epoch": 5}}
        ],
        "jobs": [
            {{"submit_epoch": 2, "sponsor": "client", "fee": "60", "resources": 2, "duration": 15}},
            {{"submit_epoch": 8, "sponsor": "client", "fee": "90", "resources": 3, "duration": 20}}
        ]
    }}"#
    );
    parse_config(&config).expect("benchmark scenario is valid")
}
