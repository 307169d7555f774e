//! Drives a scenario tick by tick and streams its configurations through every
//! metric pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use crate::adaptation::{
    average_parameter_usage, configuration_coherence, configuration_variability, global_parameter_usage,
    StabilityTracker,
};
use crate::error::Result;
use crate::metric::{format_significant, MetricSeries};
use crate::scenario::{Disturbance, FlockWorld, LifeWorld, Scenario, ScenarioKind, TrafficWorld};
use crate::series::{AgentId, ConfigurationSeries};
use crate::transfer::{transferability, ComplexitySignal, SignalSource};

pub const COHERENCE: &str = "coherence";
pub const STABILITY: &str = "stability";
pub const VARIABILITY: &str = "variability";
pub const GLOBAL_USAGE: &str = "global_usage";
pub const AVERAGE_USAGE: &str = "average_usage";
pub const TRANSFERABILITY: &str = "transferability";

/// The five adaptation measures, in the order they are reported.
pub const ADAPTATION_METRICS: [&str; 5] = [COHERENCE, STABILITY, VARIABILITY, GLOBAL_USAGE, AVERAGE_USAGE];

pub fn build_scenario(config: &RunConfig) -> Box<dyn Scenario> {
    match config.scenario {
        ScenarioKind::Traffic => Box::new(TrafficWorld::new(config.traffic.clone(), config.seed)),
        ScenarioKind::Flocking => Box::new(FlockWorld::new(config.flocking, config.seed)),
        ScenarioKind::Life => Box::new(LifeWorld::new(config.life, config.seed)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryLine {
    pub metric: String,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl std::fmt::Display for SummaryLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "metric={}, mean={}, min={}, max={}",
            self.metric,
            format_significant(self.mean, 9),
            format_significant(self.min, 9),
            format_significant(self.max, 9)
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub dimension: usize,
    pub disturbances: Vec<Disturbance>,
    pub series: Vec<MetricSeries>,
    /// Complexity of the system and environment observables per tick.
    pub system_complexity: ComplexitySignal,
    pub environment_complexity: ComplexitySignal,
}

impl RunOutput {
    pub fn metric(&self, name: &str) -> Option<&MetricSeries> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn summary(&self) -> Vec<SummaryLine> {
        self.series
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                let n = s.len() as f64;
                SummaryLine {
                    metric: s.name.clone(),
                    mean: s.values().sum::<f64>() / n,
                    min: s.values().fold(f64::INFINITY, f64::min),
                    max: s.values().fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect()
    }

    pub fn summary_text(&self) -> String {
        self.summary().iter().map(|l| format!("{l}\n")).collect()
    }

    /// `<scenario>_<metric>.csv` for every series plus `<scenario>_summary.txt`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for s in &self.series {
            let path = dir.join(format!("{}_{}.csv", self.scenario, s.name));
            fs::write(&path, s.to_csv())?;
            written.push(path);
        }
        let path = dir.join(format!("{}_summary.txt", self.scenario));
        fs::write(&path, self.summary_text())?;
        written.push(path);
        Ok(written)
    }
}

fn params(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Runs the configured scenario and evaluates every metric at every tick past
/// its warm-up.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let mut scenario = build_scenario(config);
    let dim = scenario.dimension();
    let bounds = scenario.usage_bounds();
    let mut series = ConfigurationSeries::new(scenario.agent_count(), dim)?;
    let stab = config.stability;
    let usage_l = config.usage_window;
    let transfer = config.transferability;
    let first_obs = scenario.first_observation_tick();

    let mut coherence = MetricSeries::new(COHERENCE, vec![], 0);
    let mut variability = MetricSeries::new(VARIABILITY, vec![], 0);
    let mut stability = MetricSeries::new(
        STABILITY,
        params(&[
            ("M", stab.window as f64),
            ("L", stab.density_window as f64),
            ("epsilon", stab.epsilon),
        ]),
        stab.first_stability_tick(),
    );
    let usage_params = params(&[("L", usage_l as f64)]);
    let mut global = MetricSeries::new(GLOBAL_USAGE, usage_params.clone(), usage_l);
    let mut average = MetricSeries::new(AVERAGE_USAGE, usage_params.clone(), usage_l);
    let per_param = |name: &str| -> Vec<MetricSeries> {
        if dim == 1 {
            return Vec::new();
        }
        (0..dim)
            .map(|j| MetricSeries::new(format!("{name}_{j}"), usage_params.clone(), usage_l))
            .collect()
    };
    let mut global_j = per_param(GLOBAL_USAGE);
    let mut average_j = per_param(AVERAGE_USAGE);
    let mut transferability_series = MetricSeries::new(
        TRANSFERABILITY,
        params(&[("L", transfer.window as f64), ("bins", transfer.bin_count as f64)]),
        first_obs + transfer.window - 1,
    );
    let mut tracker = StabilityTracker::new(stab)?;
    let mut system_c = ComplexitySignal::new(SignalSource::System, scenario.system_binning(), first_obs);
    let mut env_c = ComplexitySignal::new(SignalSource::Environment, scenario.environment_binning(), first_obs);

    for t in 0..config.ticks {
        if t > 0 {
            scenario.step();
        }
        series.record_tick(t, scenario.configurations())?;
        let now: Vec<&[f64]> = series.tick_samples(t).expect("sealed").collect();

        let (c, v) = rayon::join(|| configuration_coherence(&now), || configuration_variability(&now));
        coherence.push(t, c?)?;
        variability.push(t, v?)?;

        if t >= usage_l {
            let mut g_sum = 0.0;
            let mut a_sum = 0.0;
            for j in 0..dim {
                let g = global_parameter_usage(&series, j, t, usage_l, &bounds)?.value;
                let a = average_parameter_usage(&series, j, t, usage_l, &bounds)?.value;
                if dim > 1 {
                    global_j[j].push(t, g)?;
                    average_j[j].push(t, a)?;
                }
                g_sum += g;
                a_sum += a;
            }
            global.push(t, g_sum / dim as f64)?;
            average.push(t, a_sum / dim as f64)?;
        }

        if let Some(record) = tracker.observe(&series, t)? {
            if let Some(nu) = record.fluctuation_variance {
                stability.push(t, nu)?;
            }
        }

        if t >= first_obs {
            system_c.push_samples(&scenario.system_observation()?)?;
            env_c.push_samples(&scenario.environment_observation()?)?;
            if t >= transferability_series.warm_up {
                transferability_series.push(t, transferability(&system_c, &env_c, t, &transfer)?)?;
            }
        }
    }

    let mut all = vec![coherence, stability, variability, global, average];
    all.extend(global_j);
    all.extend(average_j);
    all.push(transferability_series);
    Ok(RunOutput {
        scenario: config.scenario,
        seed: config.seed,
        dimension: dim,
        disturbances: scenario.disturbances(),
        series: all,
        system_complexity: system_c,
        environment_complexity: env_c,
    })
}

/// Recorded configurations of a run, for inspection outside the metric pipeline.
pub fn record_configurations(config: &RunConfig) -> Result<ConfigurationSeries> {
    config.validate()?;
    let mut scenario = build_scenario(config);
    let mut series = ConfigurationSeries::new(scenario.agent_count(), scenario.dimension())?;
    for t in 0..config.ticks {
        if t > 0 {
            scenario.step();
        }
        for (i, v) in scenario.configurations().into_iter().enumerate() {
            series.record(t, AgentId(i), v)?;
        }
    }
    Ok(series)
}
