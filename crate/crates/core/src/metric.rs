use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Time-indexed scalar output of one metric, labelled by window end tick.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub name: String,
    pub params: Vec<(String, f64)>,
    /// First tick at which the metric can produce a value.
    pub warm_up: u64,
    points: Vec<(u64, f64)>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, params: Vec<(String, f64)>, warm_up: u64) -> Self {
        Self {
            name: name.into(),
            params,
            warm_up,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, tick: u64, value: f64) -> Result<()> {
        if tick < self.warm_up {
            return Err(Error::InvalidParameter(format!(
                "{}: tick {tick} precedes warm-up {}",
                self.name, self.warm_up
            )));
        }
        if let Some(&(last, _)) = self.points.last() {
            if tick <= last {
                return Err(Error::InvalidParameter(format!(
                    "{}: tick {tick} is not after {last}",
                    self.name
                )));
            }
        }
        if !value.is_finite() {
            return Err(Error::NonFinite("metric value"));
        }
        self.points.push((tick, value));
        Ok(())
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn value_at(&self, tick: u64) -> Option<f64> {
        self.points
            .binary_search_by_key(&tick, |&(t, _)| t)
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    /// CSV text: header `tick,value`, one newline-terminated row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 + self.points.len() * 20);
        out.push_str("tick,value\n");
        for &(tick, value) in &self.points {
            let _ = writeln!(out, "{tick},{}", format_significant(value, 9));
        }
        out
    }
}

/// Plain decimal rendering of `value` with `digits` significant digits.
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if value == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    // Round through scientific notation first so the exponent reflects rounding
    // (e.g. 9.9999999996 becomes 10.0000000).
    let sci = format!("{:.*e}", digits - 1, value);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().unwrap();
    format!("{rounded:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.812345678912, 9), "0.812345679");
        assert_eq!(format_significant(1234.5, 9), "1234.50000");
        assert_eq!(format_significant(1.0, 9), "1.00000000");
        assert_eq!(format_significant(0.0, 9), "0.00000000");
        assert_eq!(format_significant(-0.0, 9), "0.00000000");
        assert_eq!(format_significant(-0.25, 9), "-0.250000000");
        assert_eq!(format_significant(9.9999999996, 9), "10.0000000");
        assert_eq!(format_significant(1.5e-5, 9), "0.0000150000000");
    }

    #[test]
    fn csv_layout() {
        let mut s = MetricSeries::new("m", vec![], 2);
        s.push(2, 0.5).unwrap();
        s.push(3, 1.0 / 3.0).unwrap();
        assert_eq!(s.to_csv(), "tick,value\n2,0.500000000\n3,0.333333333\n");
    }

    #[test]
    fn rejects_early_or_unordered_points() {
        let mut s = MetricSeries::new("m", vec![], 2);
        assert!(s.push(1, 0.0).is_err());
        s.push(4, 0.0).unwrap();
        assert!(s.push(4, 0.0).is_err());
        assert!(s.push(3, 0.0).is_err());
        assert!(s.push(5, f64::NAN).is_err());
    }

    #[test]
    fn lookup_by_tick() {
        let mut s = MetricSeries::new("m", vec![("L".into(), 5.0)], 0);
        s.push(0, 1.0).unwrap();
        s.push(7, 2.0).unwrap();
        assert_eq!(s.value_at(7), Some(2.0));
        assert_eq!(s.value_at(3), None);
        assert_eq!(s.param("L"), Some(5.0));
    }
}
