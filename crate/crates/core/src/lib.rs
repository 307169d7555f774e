//! Runtime measurement of self-adaptive, self-organising multi-agent systems.
//!
//! Every metric consumes a [`ConfigurationSeries`]: the configuration vector of
//! every agent at every tick. The [`adaptation`] module measures how the
//! population adapts (stability, variability, coherence, parameter usage), and
//! [`transfer`] relates the complexity of the system's state to that of its
//! environment. Three reference simulations live in [`scenario`], and
//! [`harness`] runs them through all metrics.

pub mod adaptation;
pub mod error;
pub mod harness;
pub mod histogram;
pub mod metric;
pub mod scenario;
pub mod series;
pub mod stats;
pub mod transfer;

pub use error::{Error, Result};
pub use histogram::Histogram;
pub use metric::MetricSeries;
pub use series::{AgentId, ConfigurationSeries, ConfigurationVector, Window};
