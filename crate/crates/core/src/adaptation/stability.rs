//! Configuration stability: the variance of the fluctuation of the number of
//! agents whose configuration distribution shifted between two adjacent windows.

use rayon::prelude::*;

use super::kde::{kl_divergence, BandwidthRule, ParzenDensity};
use crate::error::{Error, Result};
use crate::series::{AgentId, ConfigurationSeries, Window};
use crate::stats::mean_and_variance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    /// Fluctuation / variance window `M`.
    pub window: u64,
    /// Density window `L`; the current and previous windows each span `L` ticks.
    pub density_window: u64,
    /// KL threshold above which an agent counts as active.
    pub epsilon: f64,
    pub bandwidth: BandwidthRule,
}

impl StabilityParams {
    pub fn new(window: u64, density_window: u64, epsilon: f64) -> Result<Self> {
        let p = Self {
            window,
            density_window,
            epsilon,
            bandwidth: BandwidthRule::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidParameter("stability window M must be >= 2".into()));
        }
        if self.density_window < 2 {
            return Err(Error::InvalidParameter("density window L must be >= 2".into()));
        }
        // +inf is allowed: nothing is ever active.
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter("epsilon must be > 0".into()));
        }
        self.bandwidth.validate()
    }

    /// First tick with both density windows full.
    pub fn first_activity_tick(&self) -> u64 {
        2 * self.density_window - 1
    }

    /// First tick at which `nu_t` is defined.
    pub fn first_stability_tick(&self) -> u64 {
        self.first_activity_tick() + 2 * (self.window - 1)
    }
}

/// Activity bookkeeping for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivityRecord {
    pub tick: u64,
    pub active: usize,
    pub agents: usize,
    pub activity_factor: f64,
    pub fluctuation: Option<f64>,
    pub fluctuation_variance: Option<f64>,
}

/// `z_t = (2 n_t - N + 1) / (2 N)`.
pub fn activity_factor(active: usize, agents: usize) -> f64 {
    debug_assert!(agents >= 1 && active <= agents);
    (2.0 * active as f64 - agents as f64 + 1.0) / (2.0 * agents as f64)
}

/// KL divergence of the agent's configuration density over the current window
/// `[tick-L+1, tick]` from the one over the previous window `[tick-2L+1, tick-L]`.
///
/// Both densities use the same bandwidth, chosen from the pooled `2L` samples.
pub fn activity_divergence(
    series: &ConfigurationSeries,
    agent: AgentId,
    tick: u64,
    params: &StabilityParams,
) -> Result<f64> {
    let l = params.density_window;
    if tick < params.first_activity_tick() {
        return Err(Error::WarmUp {
            end: tick,
            length: 2 * l,
            required_from: tick as i64 - 2 * l as i64 + 1,
        });
    }
    let pooled = series.agent_window(Window::new(tick, 2 * l)?, agent)?;
    let first = pooled[0];
    if pooled.iter().all(|s| *s == first) {
        return Ok(0.0);
    }
    let (previous, current) = pooled.split_at(l as usize);
    let h = params.bandwidth.bandwidths(&pooled, series.dimension());
    let p = ParzenDensity::new(current, h.clone())?;
    let q = ParzenDensity::new(previous, h)?;
    Ok(kl_divergence(&p, &q))
}

pub fn is_active(series: &ConfigurationSeries, agent: AgentId, tick: u64, params: &StabilityParams) -> Result<bool> {
    Ok(activity_divergence(series, agent, tick, params)? > params.epsilon)
}

/// Number of active agents at `tick`.
pub fn active_count(series: &ConfigurationSeries, tick: u64, params: &StabilityParams) -> Result<usize> {
    params.validate()?;
    let flags: Result<Vec<bool>> = (0..series.agent_count())
        .into_par_iter()
        .map(|a| is_active(series, AgentId(a), tick, params))
        .collect();
    Ok(flags?.into_iter().filter(|&b| b).count())
}

/// Fluctuation `xi` and its variance `nu` at the last tick of `z`, which must hold
/// the `2M - 1` most recent activity factors in tick order.
pub fn stability_from_activity(z: &[f64], window: usize) -> Result<(f64, f64)> {
    if window < 2 {
        return Err(Error::InvalidParameter("stability window M must be >= 2".into()));
    }
    let needed = 2 * window - 1;
    if z.len() < needed {
        return Err(Error::WarmUp {
            end: z.len() as u64,
            length: needed as u64,
            required_from: z.len() as i64 - needed as i64,
        });
    }
    let z = &z[z.len() - needed..];
    let xi: Vec<f64> = (window - 1..needed)
        .map(|t| Ok(z[t] - mean_and_variance(&z[t + 1 - window..=t])?.0))
        .collect::<Result<_>>()?;
    let (_, nu) = mean_and_variance(&xi)?;
    Ok((*xi.last().unwrap(), nu))
}

/// `nu_t` computed from scratch at `tick`.
pub fn configuration_stability(series: &ConfigurationSeries, tick: u64, params: &StabilityParams) -> Result<f64> {
    params.validate()?;
    if tick < params.first_stability_tick() {
        let length = params.first_stability_tick() + 1;
        return Err(Error::WarmUp {
            end: tick,
            length,
            required_from: tick as i64 - length as i64 + 1,
        });
    }
    let n = series.agent_count();
    let from = tick + 2 - 2 * params.window;
    let z: Result<Vec<f64>> = (from..=tick)
        .map(|t| active_count(series, t, params).map(|a| activity_factor(a, n)))
        .collect();
    Ok(stability_from_activity(&z?, params.window as usize)?.1)
}

/// Incremental stability computation for a growing series: feed activity
/// factors tick by tick and get the full record once enough history exists.
#[derive(Debug, Clone)]
pub struct StabilityTracker {
    params: StabilityParams,
    z: Vec<f64>,
}

impl StabilityTracker {
    pub fn new(params: StabilityParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, z: Vec::new() })
    }

    pub fn params(&self) -> &StabilityParams {
        &self.params
    }

    /// Evaluates activity at `tick`, which must be the series horizon. Returns
    /// `None` before the density windows are full.
    pub fn observe(&mut self, series: &ConfigurationSeries, tick: u64) -> Result<Option<ActivityRecord>> {
        if tick < self.params.first_activity_tick() {
            return Ok(None);
        }
        let n = series.agent_count();
        let active = active_count(series, tick, &self.params)?;
        let z = activity_factor(active, n);
        self.z.push(z);
        let window = self.params.window as usize;
        let (fluctuation, fluctuation_variance) = if self.z.len() >= 2 * window - 1 {
            let (xi, nu) = stability_from_activity(&self.z, window)?;
            // only the trailing 2M-1 values are ever needed
            let excess = self.z.len() - (2 * window - 1);
            self.z.drain(..excess);
            (Some(xi), Some(nu))
        } else if self.z.len() >= window {
            let m = window as f64;
            let tail = &self.z[self.z.len() - window..];
            (Some(z - tail.iter().sum::<f64>() / m), None)
        } else {
            (None, None)
        };
        Ok(Some(ActivityRecord {
            tick,
            active,
            agents: n,
            activity_factor: z,
            fluctuation,
            fluctuation_variance,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ConfigurationVector;

    fn series_1d(values: &[f64]) -> ConfigurationSeries {
        let mut s = ConfigurationSeries::new(1, 1).unwrap();
        for (t, &v) in values.iter().enumerate() {
            s.record(t as u64, AgentId(0), ConfigurationVector::new(vec![v]).unwrap())
                .unwrap();
        }
        s
    }

    #[test]
    fn activity_factor_values() {
        assert_eq!(activity_factor(1, 1), 1.0);
        assert!((activity_factor(0, 50) + 0.49).abs() < 1e-15);
        assert!((activity_factor(50, 50) - 0.51).abs() < 1e-15);
    }

    #[test]
    fn constant_configuration_is_inactive() {
        let s = series_1d(&[3.0; 20]);
        let p = StabilityParams::new(2, 5, 0.1).unwrap();
        assert!(!is_active(&s, AgentId(0), 9, &p).unwrap());
        assert!(!is_active(&s, AgentId(0), 19, &p).unwrap());
    }

    #[test]
    fn step_change_is_active() {
        let mut v = vec![0.0; 5];
        v.extend([0.0, 100.0, 100.0, 100.0, 100.0]);
        let s = series_1d(&v);
        let p = StabilityParams::new(2, 5, 0.5).unwrap();
        let d = activity_divergence(&s, AgentId(0), 9, &p).unwrap();

        // Oracle: pooled Silverman bandwidth, then the log-ratio at the current
        // window's samples evaluated directly.
        let mean = 400.0 / 10.0;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 9.0;
        let h = var.sqrt() * (4.0 / 30.0f64).powf(0.2);
        let k = |x: f64, c: f64| (-(x - c) * (x - c) / (2.0 * h * h)).exp();
        let cur = &v[5..];
        let prev = &v[..5];
        let oracle: f64 = cur
            .iter()
            .map(|&x| {
                let p: f64 = cur.iter().map(|&c| k(x, c)).sum();
                let q: f64 = prev.iter().map(|&c| k(x, c)).sum();
                (p / q).ln()
            })
            .sum::<f64>()
            / 5.0;
        assert!((d - oracle).abs() < 1e-9 * oracle, "{d} vs {oracle}");
        assert!(is_active(&s, AgentId(0), 9, &p).unwrap());
    }

    #[test]
    fn infinite_threshold_never_active() {
        let mut v = vec![0.0; 5];
        v.extend([9.0; 5]);
        let s = series_1d(&v);
        let p = StabilityParams::new(2, 5, f64::INFINITY).unwrap();
        assert!(!is_active(&s, AgentId(0), 9, &p).unwrap());
    }

    #[test]
    fn activity_needs_two_full_windows() {
        let s = series_1d(&[0.0; 20]);
        let p = StabilityParams::new(2, 5, 1.0).unwrap();
        assert!(matches!(is_active(&s, AgentId(0), 8, &p), Err(Error::WarmUp { .. })));
        assert!(matches!(configuration_stability(&s, 10, &p), Err(Error::WarmUp { .. })));
        assert!(configuration_stability(&s, 11, &p).is_ok());
    }

    #[test]
    fn params_are_validated() {
        assert!(StabilityParams::new(1, 5, 1.0).is_err());
        assert!(StabilityParams::new(2, 1, 1.0).is_err());
        assert!(StabilityParams::new(2, 2, 0.0).is_err());
        assert!(StabilityParams::new(2, 2, f64::NAN).is_err());
    }

    #[test]
    fn constant_activity_has_zero_variance() {
        let (xi, nu) = stability_from_activity(&[-0.49; 9], 5).unwrap();
        assert_eq!((xi, nu), (0.0, 0.0));
        let (xi, nu) = stability_from_activity(&[0.51; 9], 5).unwrap();
        assert_eq!((xi, nu), (0.0, 0.0));
    }

    #[test]
    fn alternating_activity() {
        // z alternates between -0.49 and 0.51 (n_t = 0 / N, N = 50). With M = 2:
        // xi_t = (z_t - z_{t-1}) / 2 = +-0.5, so nu = 0.25 - 0^2.
        let z = [activity_factor(0, 50), activity_factor(50, 50), activity_factor(0, 50)];
        let (xi, nu) = stability_from_activity(&z, 2).unwrap();
        assert!((xi + 0.5).abs() < 1e-12);
        assert!((nu - 0.25).abs() < 1e-12);
    }

    #[test]
    fn stable_series_has_zero_stability() {
        let s = series_1d(&[1.0; 40]);
        let p = StabilityParams::new(3, 4, 0.5).unwrap();
        assert_eq!(configuration_stability(&s, 39, &p).unwrap(), 0.0);
    }

    #[test]
    fn tracker_matches_direct_computation() {
        let mut s = ConfigurationSeries::new(3, 1).unwrap();
        let p = StabilityParams::new(3, 3, 0.3).unwrap();
        let mut tracker = StabilityTracker::new(p).unwrap();
        for t in 0..40u64 {
            let vs = (0..3)
                .map(|a| {
                    let x = ((t * (a + 1)) % 7) as f64 + if t > 20 { 5.0 * a as f64 } else { 0.0 };
                    ConfigurationVector::new(vec![x]).unwrap()
                })
                .collect();
            s.record_tick(t, vs).unwrap();
            let rec = tracker.observe(&s, t).unwrap();
            if t >= p.first_stability_tick() {
                let nu = rec.unwrap().fluctuation_variance.unwrap();
                assert!((nu - configuration_stability(&s, t, &p).unwrap()).abs() < 1e-15);
            }
        }
    }
}
