use std::path::PathBuf;

use crate::adaptation::{BandwidthRule, StabilityParams};
use crate::error::{Error, Result};
use crate::scenario::{FlockParams, LifeParams, ScenarioKind, TrafficParams};
use crate::transfer::TransferabilityParams;

/// Everything needed to reproduce one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub seed: u64,
    /// Number of recorded ticks (0..ticks).
    pub ticks: u64,
    pub stability: StabilityParams,
    /// Parameter-usage window `L`.
    pub usage_window: u64,
    pub transferability: TransferabilityParams,
    pub traffic: TrafficParams,
    pub flocking: FlockParams,
    pub life: LifeParams,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults matching the published evaluation settings for each scenario.
    pub fn defaults(scenario: ScenarioKind, seed: u64) -> Self {
        let (ticks, m, l, epsilon) = match scenario {
            ScenarioKind::Traffic => (1200, 15, 15, 2.0),
            ScenarioKind::Flocking => (1000, 10, 10, 1.0),
            ScenarioKind::Life => (1000, 15, 15, 0.05),
        };
        Self {
            scenario,
            seed,
            ticks,
            stability: StabilityParams {
                window: m,
                density_window: l,
                epsilon,
                bandwidth: BandwidthRule::default(),
            },
            usage_window: 5,
            transferability: TransferabilityParams::default(),
            traffic: TrafficParams::default(),
            flocking: FlockParams::default(),
            life: LifeParams::default(),
            out_dir: None,
        }
    }

    /// Applies one `key=value` override.
    pub fn apply_param(&mut self, param: &str) -> Result<()> {
        let (key, value) = parse_param(param)?;
        self.set(key, value)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::InvalidParameter(format!("invalid value {value:?} for {key}"));
        let float = || value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        let uint = || value.parse::<u64>().map_err(|_| bad());
        let size = || value.parse::<usize>().map_err(|_| bad());
        let opt_tick = || {
            if value == "none" {
                Ok(None)
            } else {
                uint().map(Some)
            }
        };
        match (self.scenario, key) {
            (_, "m") => self.stability.window = uint()?,
            (_, "l") => self.stability.density_window = uint()?,
            (_, "epsilon") => self.stability.epsilon = float()?,
            (_, "bandwidth_floor") => self.stability.bandwidth = BandwidthRule::Silverman { floor: float()? },
            (_, "bandwidth") => self.stability.bandwidth = BandwidthRule::Fixed(float()?),
            (_, "usage_l") => self.usage_window = uint()?,
            (_, "transfer_l") => self.transferability.window = uint()?,
            (_, "bins") => {
                self.transferability.bin_count = size()?;
                self.flocking.angle_bins = size()?;
            }

            (ScenarioKind::Traffic, "background_cars") => self.traffic.background_cars = size()?,
            (ScenarioKind::Traffic, "rush_cars") => self.traffic.rush_cars = size()?,
            (ScenarioKind::Traffic, "rush_out_tick") => self.traffic.rush_out_tick = opt_tick()?,
            (ScenarioKind::Traffic, "rush_back_tick") => self.traffic.rush_back_tick = opt_tick()?,
            (ScenarioKind::Traffic, "cycle_budget") => self.traffic.cycle_budget = value.parse().map_err(|_| bad())?,
            (ScenarioKind::Traffic, "min_green") => self.traffic.min_green = value.parse().map_err(|_| bad())?,
            (ScenarioKind::Traffic, "adaptation_period") => self.traffic.adaptation_period = uint()?,
            (ScenarioKind::Traffic, "homestead_column") => self.traffic.homestead_column = size()?,
            (ScenarioKind::Traffic, "workplace_column") => self.traffic.workplace_column = size()?,
            (ScenarioKind::Traffic, "travel_time") => self.traffic.travel_time = uint()?,
            (ScenarioKind::Traffic, "staggered") => self.traffic.staggered = value.parse().map_err(|_| bad())?,
            (ScenarioKind::Traffic, "max_queue_bin") => {
                self.traffic.max_queue_bin = value.parse().map_err(|_| bad())?
            }

            (ScenarioKind::Flocking, "birds") => self.flocking.birds = size()?,
            (ScenarioKind::Flocking, "width") => self.flocking.width = float()?,
            (ScenarioKind::Flocking, "height") => self.flocking.height = float()?,
            (ScenarioKind::Flocking, "neighbour_radius") => self.flocking.neighbour_radius = float()?,
            (ScenarioKind::Flocking, "avoidance_radius") => self.flocking.avoidance_radius = float()?,
            (ScenarioKind::Flocking, "alignment") => self.flocking.alignment_weight = float()?,
            (ScenarioKind::Flocking, "cohesion") => self.flocking.cohesion_weight = float()?,
            (ScenarioKind::Flocking, "avoidance") => self.flocking.avoidance_weight = float()?,
            (ScenarioKind::Flocking, "speed") => self.flocking.speed = float()?,
            (ScenarioKind::Flocking, "shot_tick") => self.flocking.shot_tick = opt_tick()?,
            (ScenarioKind::Flocking, "shot_radius") => self.flocking.shot_radius = float()?,
            (ScenarioKind::Flocking, "shot_duration") => self.flocking.shot_duration = uint()?,

            (ScenarioKind::Life, "width") => self.life.width = size()?,
            (ScenarioKind::Life, "height") => self.life.height = size()?,
            (ScenarioKind::Life, "density") => self.life.initial_density = float()?,

            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter {key:?} for scenario {}",
                    self.scenario
                )))
            }
        }
        Ok(())
    }

    /// Checks parameter ranges and that the run is long enough for every metric
    /// to emit at least one value.
    pub fn validate(&self) -> Result<()> {
        self.stability.validate()?;
        self.transferability.validate()?;
        if self.usage_window == 0 {
            return Err(Error::InvalidParameter("usage_l must be positive".into()));
        }
        match self.scenario {
            ScenarioKind::Traffic => {
                let t = &self.traffic;
                if t.rows == 0 || t.cols < 2 || t.cycle_budget == 0 || t.adaptation_period == 0 || t.max_queue_bin < 1 {
                    return Err(Error::InvalidParameter("invalid traffic parameters".into()));
                }
                if t.homestead_column >= t.cols || t.workplace_column >= t.cols {
                    return Err(Error::InvalidParameter(
                        "homestead/workplace column outside the grid".into(),
                    ));
                }
                if t.min_green * 4 > t.cycle_budget {
                    return Err(Error::InvalidParameter("cycle budget below 4 * min_green".into()));
                }
            }
            ScenarioKind::Flocking => {
                let f = &self.flocking;
                let positive = [f.width, f.height, f.neighbour_radius, f.shot_radius];
                if f.birds == 0 || positive.iter().any(|&v| v <= 0.0) || f.avoidance_radius < 0.0 || f.speed < 0.0 {
                    return Err(Error::InvalidParameter("invalid flocking parameters".into()));
                }
                if f.angle_bins < 2 {
                    return Err(Error::InvalidParameter("bins must be >= 2".into()));
                }
            }
            ScenarioKind::Life => {
                let l = &self.life;
                if l.width < 3 || l.height < 3 || !(0.0..=1.0).contains(&l.initial_density) {
                    return Err(Error::InvalidParameter("invalid life parameters".into()));
                }
            }
        }
        let needed = self.warm_up_ticks() + 1;
        if self.ticks < needed {
            return Err(Error::InvalidParameter(format!(
                "{} ticks is too short: the metrics need at least {needed}",
                self.ticks
            )));
        }
        Ok(())
    }

    /// Latest first-emission tick over all metrics.
    pub fn warm_up_ticks(&self) -> u64 {
        let first_observation = match self.scenario {
            ScenarioKind::Traffic => 0,
            _ => 1,
        };
        self.stability
            .first_stability_tick()
            .max(self.usage_window)
            .max(first_observation + self.transferability.window - 1)
    }
}

/// Splits `key=value`; the key must be a non-empty identifier.
pub fn parse_param(param: &str) -> Result<(&str, &str)> {
    let (key, value) = param
        .split_once('=')
        .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {param:?}")))?;
    let key = key.trim();
    let value = value.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::InvalidParameter(format!("invalid parameter name {key:?}")));
    }
    if value.is_empty() {
        return Err(Error::InvalidParameter(format!("missing value for {key}")));
    }
    Ok((key, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_defaults() {
        let t = RunConfig::defaults(ScenarioKind::Traffic, 1);
        assert_eq!(
            (t.stability.window, t.stability.density_window, t.stability.epsilon),
            (15, 15, 2.0)
        );
        assert_eq!((t.usage_window, t.transferability.window, t.ticks), (5, 40, 1200));
        let f = RunConfig::defaults(ScenarioKind::Flocking, 1);
        assert_eq!(
            (f.stability.window, f.stability.density_window, f.stability.epsilon),
            (10, 10, 1.0)
        );
        let l = RunConfig::defaults(ScenarioKind::Life, 1);
        assert_eq!(
            (l.stability.window, l.stability.density_window, l.stability.epsilon),
            (15, 15, 0.05)
        );
        for c in [t, f, l] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::defaults(ScenarioKind::Flocking, 1);
        c.apply_param("epsilon=0.5").unwrap();
        c.apply_param(" shot_tick = none ").unwrap();
        c.apply_param("birds=20").unwrap();
        assert_eq!(c.stability.epsilon, 0.5);
        assert_eq!(c.flocking.shot_tick, None);
        assert_eq!(c.flocking.birds, 20);
        assert!(c.apply_param("rush_cars=3").is_err());
        assert!(c.apply_param("epsilon=abc").is_err());
        assert!(c.apply_param("epsilon=inf").is_err());
        assert!(c.apply_param("epsilon").is_err());
        assert!(c.apply_param("=3").is_err());
        assert!(c.apply_param("m=").is_err());
    }

    #[test]
    fn too_short_runs_are_rejected() {
        let mut c = RunConfig::defaults(ScenarioKind::Traffic, 1);
        // first stability value at 2*15-1 + 2*14 = 57
        assert_eq!(c.warm_up_ticks(), 57);
        c.ticks = 57;
        assert!(c.validate().is_err());
        c.ticks = 58;
        c.validate().unwrap();
    }

    #[test]
    fn invalid_metric_params() {
        let mut c = RunConfig::defaults(ScenarioKind::Life, 1);
        c.apply_param("m=1").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn commuter_columns_must_lie_on_the_grid() {
        let mut c = RunConfig::defaults(ScenarioKind::Traffic, 1);
        c.apply_param("homestead_column=4").unwrap();
        c.apply_param("staggered=false").unwrap();
        c.validate().unwrap();
        assert!(!c.traffic.staggered);
        c.apply_param("workplace_column=5").unwrap();
        assert!(c.validate().is_err());
        assert!(c.apply_param("staggered=maybe").is_err());
    }
}
