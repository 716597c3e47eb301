//! Deterministic scenario simulation: configuration, event log, engine
//! and reports.

pub mod config;
pub mod engine;
pub mod event;
pub mod report;
pub mod rng;

pub use config::{load_config, parse_config, ConfigError, Scenario};
pub use engine::{run, EpochRow, SimRun, SupplyRow};
pub use event::{digest_bytes, Event, EventKind, EventLog};
pub use report::{report_summary, write_reports, ReportPaths, Summary};
pub use rng::RngFactory;
