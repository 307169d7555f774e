//! Parameter utilisation: how much of each parameter's possible range was used
//! inside a trailing window, pooled over all agents or averaged per agent.

use crate::error::{Error, Result};
use crate::series::{AgentId, ConfigurationSeries, Window};

/// Design-time possible range `[min_j, max_j]` of every configuration entry.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageBounds {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl UsageBounds {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::LengthMismatch {
                left: min.len(),
                right: max.len(),
            });
        }
        for (j, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::InvalidParameter(format!(
                    "usage bounds for parameter {j} must satisfy min < max, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { min, max })
    }

    /// Same range for every one of `dimension` parameters.
    pub fn uniform(dimension: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dimension], vec![hi; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.min.len()
    }

    pub fn range(&self, j: usize) -> (f64, f64) {
        (self.min[j], self.max[j])
    }

    /// `V_j = max_j - min_j`.
    pub fn span(&self, j: usize) -> f64 {
        self.max[j] - self.min[j]
    }
}

/// A usage value plus a flag raised when observed values fell outside the bounds
/// (the value is still reported).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Usage {
    pub value: f64,
    pub out_of_bounds: bool,
}

fn usage_window(
    series: &ConfigurationSeries,
    j: usize,
    tick: u64,
    length: u64,
    bounds: &UsageBounds,
) -> Result<Window> {
    if length == 0 {
        return Err(Error::InvalidParameter("usage window L must be positive".into()));
    }
    if bounds.dimension() != series.dimension() {
        return Err(Error::DimensionMismatch {
            expected: series.dimension(),
            actual: bounds.dimension(),
        });
    }
    if j >= series.dimension() {
        return Err(Error::InvalidParameter(format!("parameter index {j} out of range")));
    }
    // ticks tick-L ..= tick
    let w = Window::new(tick, length + 1)?;
    series.check_window(w)?;
    Ok(w)
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn outside(bounds: &UsageBounds, j: usize, lo: f64, hi: f64) -> bool {
    let (bmin, bmax) = bounds.range(j);
    lo < bmin || hi > bmax
}

/// `U_{j,g} = V_{j,t} / V_j`, with `V_{j,t}` the range of entry `j` over all
/// agents and ticks in `[tick - L, tick]`.
pub fn global_parameter_usage(
    series: &ConfigurationSeries,
    j: usize,
    tick: u64,
    length: u64,
    bounds: &UsageBounds,
) -> Result<Usage> {
    let w = usage_window(series, j, tick, length, bounds)?;
    let start = w.start().expect("checked");
    let (lo, hi) = min_max((start..=tick).flat_map(|t| series.tick_samples(t).expect("checked").map(move |s| s[j])));
    Ok(Usage {
        value: (hi - lo) / bounds.span(j),
        out_of_bounds: outside(bounds, j, lo, hi),
    })
}

/// `U_{j,a} = sum_i V_{j,t,a_i} / (V_j |A|)`: per-agent ranges, averaged.
pub fn average_parameter_usage(
    series: &ConfigurationSeries,
    j: usize,
    tick: u64,
    length: u64,
    bounds: &UsageBounds,
) -> Result<Usage> {
    let w = usage_window(series, j, tick, length, bounds)?;
    let mut total = 0.0;
    let mut out_of_bounds = false;
    for a in series.agents() {
        let (lo, hi) = min_max(series.agent_window(w, a)?.into_iter().map(|s| s[j]));
        out_of_bounds |= outside(bounds, j, lo, hi);
        total += hi - lo;
    }
    Ok(Usage {
        value: total / (bounds.span(j) * series.agent_count() as f64),
        out_of_bounds,
    })
}

/// Range of entry `j` for a single agent over the window, unnormalised.
pub fn agent_range(series: &ConfigurationSeries, agent: AgentId, j: usize, tick: u64, length: u64) -> Result<f64> {
    let w = Window::new(tick, length + 1)?;
    let (lo, hi) = min_max(series.agent_window(w, agent)?.into_iter().map(|s| s[j]));
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ConfigurationVector;
    use proptest::prelude::*;

    /// `rows[t][a]` is agent `a`'s single parameter at tick `t`.
    fn series(rows: &[Vec<f64>]) -> ConfigurationSeries {
        let mut s = ConfigurationSeries::new(rows[0].len(), 1).unwrap();
        for (t, row) in rows.iter().enumerate() {
            let vs = row
                .iter()
                .map(|&v| ConfigurationVector::new(vec![v]).unwrap())
                .collect();
            s.record_tick(t as u64, vs).unwrap();
        }
        s
    }

    fn b() -> UsageBounds {
        UsageBounds::uniform(1, 0.0, 10.0).unwrap()
    }

    #[test]
    fn constant_parameter_has_no_usage() {
        let s = series(&vec![vec![3.0, 3.0]; 6]);
        assert_eq!(global_parameter_usage(&s, 0, 5, 5, &b()).unwrap().value, 0.0);
        assert_eq!(average_parameter_usage(&s, 0, 5, 5, &b()).unwrap().value, 0.0);
    }

    #[test]
    fn full_range() {
        let s = series(&[vec![0.0, 10.0], vec![10.0, 0.0], vec![5.0, 5.0]]);
        assert_eq!(global_parameter_usage(&s, 0, 2, 2, &b()).unwrap().value, 1.0);
        assert_eq!(average_parameter_usage(&s, 0, 2, 2, &b()).unwrap().value, 1.0);
    }

    #[test]
    fn pooled_half_range() {
        let s = series(&[vec![2.0, 3.0], vec![4.0, 5.0], vec![6.0, 7.0]]);
        // (7 - 2) / 10
        assert_eq!(global_parameter_usage(&s, 0, 2, 2, &b()).unwrap().value, 0.5);
    }

    #[test]
    fn per_agent_average() {
        // agent ranges 2 and 4 -> (2 + 4) / (10 * 2)
        let s = series(&[vec![1.0, 3.0], vec![3.0, 7.0]]);
        let u = average_parameter_usage(&s, 0, 1, 1, &b()).unwrap();
        assert!((u.value - 0.3).abs() < 1e-12);
        assert!(!u.out_of_bounds);
    }

    #[test]
    fn out_of_bounds_is_flagged() {
        let s = series(&[vec![-1.0], vec![3.0]]);
        let u = global_parameter_usage(&s, 0, 1, 1, &b()).unwrap();
        assert!(u.out_of_bounds);
        assert!((u.value - 0.4).abs() < 1e-12);
    }

    #[test]
    fn window_covers_l_plus_one_ticks() {
        let s = series(&[vec![0.0], vec![1.0], vec![2.0]]);
        assert_eq!(global_parameter_usage(&s, 0, 2, 2, &b()).unwrap().value, 0.2);
        assert!(matches!(
            global_parameter_usage(&s, 0, 1, 2, &b()),
            Err(Error::WarmUp { .. })
        ));
    }

    #[test]
    fn invalid_bounds() {
        assert!(UsageBounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(UsageBounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn global_dominates_average_and_ignores_time_order(
            rows in proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, 3), 4..10)
        ) {
            let s = series(&rows);
            let t = rows.len() as u64 - 1;
            let l = t;
            let g = global_parameter_usage(&s, 0, t, l, &b()).unwrap().value;
            let a = average_parameter_usage(&s, 0, t, l, &b()).unwrap().value;
            prop_assert!(g >= a - 1e-15);
            prop_assert!((0.0..=1.0).contains(&g));

            let mut reversed = rows.clone();
            reversed.reverse();
            let r = series(&reversed);
            prop_assert_eq!(global_parameter_usage(&r, 0, t, l, &b()).unwrap().value, g);
            prop_assert_eq!(average_parameter_usage(&r, 0, t, l, &b()).unwrap().value, a);
        }
    }
}
