//! Per-agent configuration time series and the windows metrics are computed over.

use crate::error::{Error, Result};

/// Identifier of one agent (subsystem) within a scenario run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

/// The control-parameter values one agent exposes at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationVector(Vec<f64>);

impl ConfigurationVector {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("configuration vector"));
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ConfigurationVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A trailing window of ticks `[end - length + 1, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub end: u64,
    pub length: u64,
}

impl Window {
    pub fn new(end: u64, length: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidParameter("window length must be positive".into()));
        }
        Ok(Self { end, length })
    }

    /// First covered tick, or `None` when the window reaches before tick 0.
    pub fn start(&self) -> Option<u64> {
        (self.end + 1).checked_sub(self.length)
    }

    fn warm_up_error(&self) -> Error {
        Error::WarmUp {
            end: self.end,
            length: self.length,
            required_from: self.end as i64 - self.length as i64 + 1,
        }
    }
}

/// Dense history of configuration vectors: every agent has exactly one sample at
/// every tick from 0 to the horizon.
///
/// Samples are recorded tick by tick. A tick is sealed (and the horizon advanced)
/// once every agent has reported for it; sealed ticks are immutable.
#[derive(Debug, Clone)]
pub struct ConfigurationSeries {
    agents: usize,
    dimension: usize,
    sealed: u64,
    data: Vec<f64>,
    pending: Vec<Option<ConfigurationVector>>,
    pending_count: usize,
}

impl ConfigurationSeries {
    pub fn new(agents: usize, dimension: usize) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidParameter("a series needs at least one agent".into()));
        }
        if dimension == 0 {
            return Err(Error::InvalidParameter(
                "configuration dimension must be positive".into(),
            ));
        }
        Ok(Self {
            agents,
            dimension,
            sealed: 0,
            data: Vec::new(),
            pending: vec![None; agents],
            pending_count: 0,
        })
    }

    pub fn agent_count(&self) -> usize {
        self.agents
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents).map(AgentId)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Latest sealed tick, `None` while nothing has been sealed.
    pub fn horizon(&self) -> Option<u64> {
        self.sealed.checked_sub(1)
    }

    /// Number of sealed ticks.
    pub fn len(&self) -> u64 {
        self.sealed
    }

    pub fn is_empty(&self) -> bool {
        self.sealed == 0
    }

    /// Stores one agent's sample for the tick currently being filled.
    pub fn record(&mut self, tick: u64, agent: AgentId, vector: ConfigurationVector) -> Result<()> {
        if agent.0 >= self.agents {
            return Err(Error::UnknownAgent(agent.0));
        }
        if vector.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: vector.dimension(),
            });
        }
        if tick < self.sealed {
            return Err(Error::DuplicateSample { tick, agent: agent.0 });
        }
        if tick > self.sealed {
            return Err(Error::OutOfOrder {
                tick,
                expected: self.sealed,
            });
        }
        let slot = &mut self.pending[agent.0];
        if slot.is_some() {
            return Err(Error::DuplicateSample { tick, agent: agent.0 });
        }
        *slot = Some(vector);
        self.pending_count += 1;
        if self.pending_count == self.agents {
            self.seal();
        }
        Ok(())
    }

    /// Records a full tick at once; `vectors[i]` belongs to agent `i`.
    pub fn record_tick(&mut self, tick: u64, vectors: Vec<ConfigurationVector>) -> Result<()> {
        if vectors.len() != self.agents {
            return Err(Error::LengthMismatch {
                left: vectors.len(),
                right: self.agents,
            });
        }
        if let Some(bad) = vectors.iter().find(|v| v.dimension() != self.dimension) {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: bad.dimension(),
            });
        }
        for (i, v) in vectors.into_iter().enumerate() {
            self.record(tick, AgentId(i), v)?;
        }
        Ok(())
    }

    fn seal(&mut self) {
        self.data.reserve(self.agents * self.dimension);
        for slot in self.pending.iter_mut() {
            let v = slot.take().expect("sealing a tick with a missing sample");
            self.data.extend_from_slice(v.values());
        }
        self.pending_count = 0;
        self.sealed += 1;
    }

    /// The sealed sample of `agent` at `tick`.
    pub fn sample(&self, tick: u64, agent: AgentId) -> Option<&[f64]> {
        if tick >= self.sealed || agent.0 >= self.agents {
            return None;
        }
        let offset = (tick as usize * self.agents + agent.0) * self.dimension;
        Some(&self.data[offset..offset + self.dimension])
    }

    /// All agents' samples at one sealed tick, in agent order.
    pub fn tick_samples(&self, tick: u64) -> Option<impl Iterator<Item = &[f64]> + '_> {
        if tick >= self.sealed {
            return None;
        }
        let row = self.agents * self.dimension;
        let offset = tick as usize * row;
        Some(self.data[offset..offset + row].chunks_exact(self.dimension))
    }

    /// Checks that `window` lies fully inside the sealed history.
    pub fn check_window(&self, window: Window) -> Result<u64> {
        let start = window.start().ok_or_else(|| window.warm_up_error())?;
        if window.end >= self.sealed {
            return Err(window.warm_up_error());
        }
        Ok(start)
    }

    /// One agent's samples over `window`, ordered by tick.
    pub fn agent_window(&self, window: Window, agent: AgentId) -> Result<Vec<&[f64]>> {
        if agent.0 >= self.agents {
            return Err(Error::UnknownAgent(agent.0));
        }
        let start = self.check_window(window)?;
        Ok((start..=window.end)
            .map(|t| self.sample(t, agent).expect("window checked"))
            .collect())
    }

    /// Owned copies of the samples over `window`: one agent's, or every agent's
    /// (tick-major, agent order within a tick) when `agent` is `None`.
    pub fn slice(&self, window: Window, agent: Option<AgentId>) -> Result<Vec<ConfigurationVector>> {
        match agent {
            Some(a) => Ok(self
                .agent_window(window, a)?
                .into_iter()
                .map(|s| ConfigurationVector(s.to_vec()))
                .collect()),
            None => {
                let start = self.check_window(window)?;
                Ok((start..=window.end)
                    .flat_map(|t| self.tick_samples(t).expect("window checked"))
                    .map(|s| ConfigurationVector(s.to_vec()))
                    .collect())
            }
        }
    }
}
