//! Gaussian Parzen-window densities and a sample-based Kullback-Leibler estimate.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::stats::sample_std;

/// How kernel bandwidths are chosen for a set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// Silverman's rule of thumb, applied per dimension, never below `floor`.
    Silverman { floor: f64 },
    /// The same fixed bandwidth in every dimension.
    Fixed(f64),
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule::Silverman { floor: 1e-3 }
    }
}

impl BandwidthRule {
    pub fn validate(&self) -> Result<()> {
        let h = match *self {
            BandwidthRule::Silverman { floor } => floor,
            BandwidthRule::Fixed(h) => h,
        };
        if h.is_finite() && h > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")))
        }
    }

    /// Per-dimension bandwidths for `samples` (all of dimension `dimension`).
    pub fn bandwidths(&self, samples: &[&[f64]], dimension: usize) -> Vec<f64> {
        match *self {
            BandwidthRule::Fixed(h) => vec![h; dimension],
            BandwidthRule::Silverman { floor } => silverman(samples, dimension, floor),
        }
    }
}

/// `h_d = sigma_d * (4 / ((d + 2) n))^(1 / (d + 4))`, floored.
fn silverman(samples: &[&[f64]], dimension: usize, floor: f64) -> Vec<f64> {
    let n = samples.len().max(1) as f64;
    let d = dimension as f64;
    let factor = (4.0 / ((d + 2.0) * n)).powf(1.0 / (d + 4.0));
    (0..dimension)
        .map(|j| {
            let sigma = sample_std(samples.iter().map(|s| s[j]));
            (sigma * factor).max(floor)
        })
        .collect()
}

/// A Gaussian product-kernel density `p(x) = 1/m * sum_k K_h(x - s_k)`.
///
/// Identical samples are merged into a single weighted kernel centre.
#[derive(Debug, Clone)]
pub struct ParzenDensity {
    centres: Vec<Vec<f64>>,
    weights: Vec<f64>,
    bandwidth: Vec<f64>,
    log_norm: f64,
}

impl ParzenDensity {
    pub fn new(samples: &[&[f64]], bandwidth: Vec<f64>) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("parzen_density samples"))?;
        let dim = first.len();
        if bandwidth.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bandwidth.len(),
            });
        }
        if bandwidth.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidParameter("bandwidth must be positive".into()));
        }
        let mut sorted: Vec<&[f64]> = samples.to_vec();
        for s in &sorted {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.len(),
                });
            }
        }
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        let mut centres: Vec<Vec<f64>> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for s in sorted {
            match centres.last() {
                Some(c) if c.as_slice() == s => *counts.last_mut().unwrap() += 1,
                _ => {
                    centres.push(s.to_vec());
                    counts.push(1);
                }
            }
        }
        let m = samples.len() as f64;
        let weights = counts.iter().map(|&c| c as f64 / m).collect();
        let log_norm = bandwidth.iter().map(|h| (h * (2.0 * PI).sqrt()).ln()).sum();
        Ok(Self {
            centres,
            weights,
            bandwidth,
            log_norm,
        })
    }

    /// Single shared bandwidth in every dimension.
    pub fn with_bandwidth(samples: &[&[f64]], bandwidth: f64) -> Result<Self> {
        let dim = samples.first().map_or(0, |s| s.len());
        Self::new(samples, vec![bandwidth; dim])
    }

    pub fn dimension(&self) -> usize {
        self.bandwidth.len()
    }

    pub fn bandwidth(&self) -> &[f64] {
        &self.bandwidth
    }

    /// Distinct kernel centres with their probability weights.
    pub fn centres(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.centres.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// `ln p(x)`, computed with log-sum-exp so far-away points stay finite.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let mut exponents = Vec::with_capacity(self.centres.len());
        let mut max = f64::NEG_INFINITY;
        for (c, w) in self.centres.iter().zip(&self.weights) {
            let quad: f64 = c
                .iter()
                .zip(x)
                .zip(&self.bandwidth)
                .map(|((ci, xi), h)| {
                    let u = (xi - ci) / h;
                    u * u
                })
                .sum();
            let e = w.ln() - 0.5 * quad;
            max = max.max(e);
            exponents.push(e);
        }
        let sum: f64 = exponents.iter().map(|e| (e - max).exp()).sum();
        max + sum.ln() - self.log_norm
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }
}

/// `D(p || q) ~ mean over p's samples of ln(p(s) / q(s))`, clamped at zero.
pub fn kl_divergence(p: &ParzenDensity, q: &ParzenDensity) -> f64 {
    let d: f64 = p
        .centres()
        .map(|(s, w)| w * (p.log_density(s) - q.log_density(s)))
        .sum();
    d.max(0.0)
}
