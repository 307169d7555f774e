//! Seeded multi-agent simulations that expose their agents' configurations.

pub mod flocking;
pub mod life;
pub mod traffic;

use crate::adaptation::UsageBounds;
use crate::error::{Error, Result};
use crate::series::ConfigurationVector;
use crate::transfer::Binning;

pub use flocking::{FlockParams, FlockWorld};
pub use life::{LifeParams, LifeWorld};
pub use traffic::{TrafficParams, TrafficWorld};

/// A scheduled perturbation of the simulated system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disturbance {
    pub tick: u64,
    pub label: &'static str,
}

/// The uniform surface every scenario offers to the metric pipelines.
pub trait Scenario: Send {
    fn name(&self) -> &'static str;

    /// Current tick; 0 before the first `step`.
    fn tick(&self) -> u64;

    fn agent_count(&self) -> usize;

    /// Length of every agent's configuration vector.
    fn dimension(&self) -> usize;

    fn usage_bounds(&self) -> UsageBounds;

    /// Advances the world by one tick.
    fn step(&mut self);

    /// One configuration vector per agent, in agent order.
    fn configurations(&self) -> Vec<ConfigurationVector>;

    /// Samples describing the environment at the current tick.
    fn environment_observation(&self) -> Result<Vec<f64>>;

    /// Samples describing the system's internal state at the current tick.
    fn system_observation(&self) -> Result<Vec<f64>>;

    fn environment_binning(&self) -> Binning;

    fn system_binning(&self) -> Binning;

    /// First tick at which both observations are available.
    fn first_observation_tick(&self) -> u64 {
        0
    }

    fn disturbances(&self) -> Vec<Disturbance>;
}

/// Scenario names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Traffic,
    Flocking,
    Life,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [ScenarioKind::Traffic, ScenarioKind::Flocking, ScenarioKind::Life];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Traffic => "traffic",
            ScenarioKind::Flocking => "flocking",
            ScenarioKind::Life => "life",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "traffic" => Ok(ScenarioKind::Traffic),
            "flocking" => Ok(ScenarioKind::Flocking),
            "life" => Ok(ScenarioKind::Life),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn lag_warm_up(tick: u64) -> Error {
    Error::WarmUp {
        end: tick,
        length: 2,
        required_from: tick as i64 - 1,
    }
}
