//! Experiment descriptions, topology construction and the simulation driver.

pub mod config;
pub mod presets;
pub mod runner;
pub mod topology;

pub use config::{
    parse_config, parse_document, ConfigDocument, ConfigError, ExperimentSpec, FlowKind, FlowSpec, OutputOptions,
    PathSpec, Topology,
};
pub use runner::{simulate, CwndSample, Delivery, QueueSample, RunError, RunOutcome, Trace};
pub use topology::{build_disjoint_paths, build_network, build_shared_bottleneck, LinkId, LinkRole, Network, Route};
