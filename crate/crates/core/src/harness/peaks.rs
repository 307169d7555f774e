use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::metric::MetricSeries;
use crate::stats::mean_and_variance;

/// Which deviations from the baseline count as a peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// `value > mean + k * std`.
    #[default]
    Above,
    /// `value < mean - k * std`.
    Below,
    /// Either of the above.
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowVerdict {
    pub window: RangeInclusive<u64>,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub metric: String,
    pub peaks: Vec<u64>,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub multiplier: f64,
    pub polarity: Polarity,
    pub windows: Vec<WindowVerdict>,
}

impl PeakReport {
    pub fn all_detected(&self) -> bool {
        self.windows.iter().all(|w| w.detected)
    }
}

/// Flags every tick whose value leaves the band `mean +- multiplier * std` of the
/// baseline segment. A zero-spread baseline uses a `1e-9` band instead.
pub fn detect_peaks(
    series: &MetricSeries,
    baseline: RangeInclusive<u64>,
    multiplier: f64,
    polarity: Polarity,
    expected: &[RangeInclusive<u64>],
) -> Result<PeakReport> {
    if !(multiplier.is_finite() && multiplier >= 0.0) {
        return Err(Error::InvalidParameter("peak multiplier must be non-negative".into()));
    }
    let base: Vec<f64> = series
        .points()
        .iter()
        .filter(|(t, _)| baseline.contains(t))
        .map(|&(_, v)| v)
        .collect();
    if base.is_empty() {
        return Err(Error::Empty("peak baseline"));
    }
    if base.len() >= series.len() {
        return Err(Error::InvalidParameter(format!(
            "{}: series must extend beyond the baseline window",
            series.name
        )));
    }
    let (mean, var) = mean_and_variance(&base)?;
    let std = var.sqrt();
    let band = if std > 0.0 { multiplier * std } else { 1e-9 };
    let peaks: Vec<u64> = series
        .points()
        .iter()
        .filter(|&&(_, v)| match polarity {
            Polarity::Above => v > mean + band,
            Polarity::Below => v < mean - band,
            Polarity::Both => v > mean + band || v < mean - band,
        })
        .map(|&(t, _)| t)
        .collect();
    let windows = expected
        .iter()
        .map(|w| WindowVerdict {
            window: w.clone(),
            detected: peaks.iter().any(|t| w.contains(t)),
        })
        .collect();
    Ok(PeakReport {
        metric: series.name.clone(),
        peaks,
        baseline_mean: mean,
        baseline_std: std,
        multiplier,
        polarity,
        windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> MetricSeries {
        let mut s = MetricSeries::new("m", vec![], 0);
        for (t, &v) in values.iter().enumerate() {
            s.push(t as u64, v).unwrap();
        }
        s
    }

    fn noisy(n: usize) -> Vec<f64> {
        // deterministic +-1 pattern: mean 0, std 1
        (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()
    }

    #[test]
    fn constant_series_has_no_peaks() {
        let r = detect_peaks(&series(&[2.0; 50]), 0..=20, 3.0, Polarity::Above, &[30..=40]).unwrap();
        assert!(r.peaks.is_empty());
        assert!(!r.all_detected());
        assert_eq!(r.baseline_std, 0.0);
    }

    #[test]
    fn single_spike() {
        let mut v = noisy(100);
        v[60] = 10.0;
        let r = detect_peaks(&series(&v), 0..=49, 3.0, Polarity::Above, &[55..=65]).unwrap();
        assert_eq!(r.peaks, vec![60]);
        assert!(r.all_detected());
    }

    #[test]
    fn spike_on_flat_baseline_uses_absolute_band() {
        let mut v = vec![0.5; 30];
        v[25] = 0.5 + 1e-6;
        let r = detect_peaks(&series(&v), 0..=19, 3.0, Polarity::Above, &[]).unwrap();
        assert_eq!(r.peaks, vec![25]);
    }

    #[test]
    fn two_disturbances() {
        let mut v = noisy(1000);
        v[250] = 8.0;
        v[750] = 8.0;
        let r = detect_peaks(&series(&v), 0..=249, 3.0, Polarity::Above, &[250..=320, 750..=820]).unwrap();
        assert_eq!(r.peaks, vec![250, 750]);
        assert!(r.windows.iter().all(|w| w.detected));
    }

    #[test]
    fn polarity() {
        let mut v = noisy(100);
        v[70] = -9.0;
        let s = series(&v);
        assert!(detect_peaks(&s, 0..=49, 3.0, Polarity::Above, &[])
            .unwrap()
            .peaks
            .is_empty());
        assert_eq!(
            detect_peaks(&s, 0..=49, 3.0, Polarity::Below, &[]).unwrap().peaks,
            vec![70]
        );
        assert_eq!(
            detect_peaks(&s, 0..=49, 3.0, Polarity::Both, &[]).unwrap().peaks,
            vec![70]
        );
    }

    #[test]
    fn baseline_must_be_shorter_than_series() {
        assert!(detect_peaks(&series(&[1.0; 10]), 0..=9, 3.0, Polarity::Above, &[]).is_err());
        assert!(detect_peaks(&series(&[1.0; 10]), 20..=30, 3.0, Polarity::Above, &[]).is_err());
    }
}
