//! Deterministic tick-based simulator for delay-tolerant networks: nodes
//! walk a map, meet over short-range radios and forward buffered messages
//! with Epidemic or Spray-and-Wait routing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod engine;
pub mod map;
pub mod mobility;
pub mod net;
pub mod reports;
pub mod routing;
pub mod traffic;

pub use config::{parse_scenario, validate, Protocol, ScenarioConfig};
pub use engine::{run, EventLog, Simulation};
pub use reports::{compute_metrics, MetricsSummary};
