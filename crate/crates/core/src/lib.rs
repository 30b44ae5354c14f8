//! Simulation of budgeted link-query measurement on complex networks.
//!
//! A ground-truth [`Graph`] is hidden behind a [`MeasurementState`]; a
//! strategy spends a query budget testing node pairs, and the resulting
//! discovery curve is scored by [`metrics`] while the discovered sample is
//! compared to the hidden graph by [`bias`].

pub mod bias;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod strategies;

pub use error::{Error, Result};
pub use graph::{Graph, GraphStats, Node};
pub use oracle::{MeasurementState, MeasurementTrace};
pub use strategies::{run_strategy, StrategyKind, StrategyName, StrategySpec};
