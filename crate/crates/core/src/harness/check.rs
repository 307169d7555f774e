//! The acceptance suite behind `saso check`. Each criterion runs its own checks
//! and reports one [`Outcome`].

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::oracle::{life_step_oracle, optimal_average_centroid_distance};
use super::peaks::{detect_peaks, Polarity};
use super::run::{
    run, RunOutput, ADAPTATION_METRICS, AVERAGE_USAGE, COHERENCE, GLOBAL_USAGE, STABILITY, TRANSFERABILITY, VARIABILITY,
};
use super::RunConfig;
use crate::adaptation::{
    activity_divergence, activity_factor, average_centroid_distance, average_parameter_usage, configuration_coherence,
    configuration_variability, global_parameter_usage, is_active, kl_divergence, max_cluster_count,
    stability_from_activity, BandwidthRule, ParzenDensity, StabilityParams, UsageBounds,
};
use crate::error::Result;
use crate::histogram::Histogram;
use crate::metric::MetricSeries;
use crate::scenario::flocking::{flocking_step, Bird};
use crate::scenario::life::life_step;
use crate::scenario::traffic::{Direction, Network};
use crate::scenario::{FlockParams, FlockWorld, LifeWorld, Scenario, ScenarioKind, TrafficParams, TrafficWorld};
use crate::series::{AgentId, ConfigurationSeries, ConfigurationVector, Window};
use crate::stats::mean_and_variance;
use crate::transfer::{
    complexity, emergence, pearson, transferability, Binning, ComplexitySignal, SignalSource, TransferabilityParams,
};

pub const SEEDS: RangeInclusive<u64> = 1..=10;
pub const REQUIRED_SEEDS: usize = 8;
pub const PEAK_MULTIPLIER: f64 = 3.0;
/// Length of the pre-disturbance segment used as the peak baseline.
pub const BASELINE_TICKS: u64 = 200;
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {} {}: {}", self.id, self.name, self.detail)
    }
}

/// Named boolean checks; remembers which ones failed.
#[derive(Default)]
struct Checks {
    total: usize,
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, label: &str, ok: bool) {
        self.total += 1;
        if !ok {
            self.failed.push(label.to_string());
        }
    }

    fn check_with(&mut self, label: &str, f: impl FnOnce() -> Result<bool>) {
        let ok = matches!(f(), Ok(true));
        self.check(label, ok);
    }

    fn close(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.total += 1;
        if !ok {
            self.failed.push(format!("{label} (got {got}, want {want})"));
        }
    }

    fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    fn summary(&self) -> String {
        if self.failed.is_empty() {
            format!("{}/{} checks", self.total, self.total)
        } else {
            format!(
                "{}/{} checks, failed: {}",
                self.total - self.failed.len(),
                self.total,
                self.failed.join("; ")
            )
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn vector(v: &[f64]) -> ConfigurationVector {
    ConfigurationVector::new(v.to_vec()).expect("finite")
}

/// Series of `rows[t][agent]` vectors.
fn series_of(rows: &[Vec<Vec<f64>>]) -> Result<ConfigurationSeries> {
    let mut s = ConfigurationSeries::new(rows[0].len(), rows[0][0].len())?;
    for (t, row) in rows.iter().enumerate() {
        s.record_tick(t as u64, row.iter().map(|v| vector(v)).collect())?;
    }
    Ok(s)
}

/// One agent, one parameter, `values[t]` at tick `t`.
fn scalar_series(values: &[f64]) -> Result<ConfigurationSeries> {
    let rows: Vec<Vec<Vec<f64>>> = values.iter().map(|&v| vec![vec![v]]).collect();
    series_of(&rows)
}

fn metric_of(points: &[(u64, f64)]) -> MetricSeries {
    let mut m = MetricSeries::new("synthetic", vec![], 0);
    for &(t, v) in points {
        m.push(t, v).expect("increasing ticks");
    }
    m
}

/// Binary entropy in bits.
fn binary_entropy(p: f64) -> f64 {
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}

/// Density in `(0, 1/2)` whose binary entropy is exactly half a bit.
fn half_bit_density() -> f64 {
    let (mut lo, mut hi) = (1e-12, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Hop count by breadth-first search over an undirected edge list.
fn bfs_hops(nodes: usize, edges: &[(usize, usize)], from: usize, to: usize) -> Option<u64> {
    let mut dist = vec![None; nodes];
    dist[from] = Some(0u64);
    let mut frontier = vec![from];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in frontier {
            for &(a, b) in edges {
                let n = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if dist[n].is_none() {
                    dist[n] = Some(dist[v].unwrap() + 1);
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    dist[to]
}

/// `nu` by direct evaluation of the M-window sums.
fn brute_force_nu(z: &[f64], m: usize) -> f64 {
    let n = z.len();
    let xi: Vec<f64> = (n - m..n)
        .map(|t| z[t] - z[t + 1 - m..=t].iter().sum::<f64>() / m as f64)
        .collect();
    let mean = xi.iter().sum::<f64>() / m as f64;
    xi.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / m as f64
}

fn series_examples(c: &mut Checks) {
    c.check_with("record/query round trip", || {
        let mut s = ConfigurationSeries::new(1, 1)?;
        s.record(0, AgentId(0), vector(&[1.0]))?;
        Ok(s.sample(0, AgentId(0)) == Some(&[1.0][..]))
    });
    c.check_with("dimension mismatch rejected", || {
        let mut s = ConfigurationSeries::new(1, 3)?;
        Ok(s.record(0, AgentId(0), vector(&[1.0, 2.0])).is_err())
    });
    c.check_with("duplicate sample rejected", || {
        let mut s = ConfigurationSeries::new(2, 1)?;
        s.record(0, AgentId(0), vector(&[1.0]))?;
        Ok(s.record(0, AgentId(0), vector(&[2.0])).is_err())
    });
    c.check_with("window(9, 5) covers ticks 5..=9", || {
        let s = scalar_series(&(0..10).map(f64::from).collect::<Vec<_>>())?;
        let w = s.agent_window(Window::new(9, 5)?, AgentId(0))?;
        Ok(w.iter().map(|v| v[0]).eq((5..10).map(f64::from)))
    });
    c.check_with("window(3, 5) is a warm-up error", || {
        let s = scalar_series(&(0..10).map(f64::from).collect::<Vec<_>>())?;
        Ok(s.agent_window(Window::new(3, 5)?, AgentId(0)).is_err())
    });
    c.check_with("window(0, 1) is the tick-0 vector", || {
        let s = scalar_series(&(0..10).map(f64::from).collect::<Vec<_>>())?;
        Ok(s.agent_window(Window::new(0, 1)?, AgentId(0))? == vec![&[0.0][..]])
    });
}

fn histogram_and_stats_examples(c: &mut Checks) {
    c.check_with("histogram top edge", || {
        Ok(Histogram::from_values(&[0.0, 0.5, 1.0], 2, 0.0, 1.0)?.counts() == [1, 2])
    });
    c.check_with("histogram direct binning", || {
        Ok(Histogram::from_values(&[0.25; 4], 4, 0.0, 1.0)?.counts() == [0, 4, 0, 0])
    });
    c.check_with("histogram clamping", || {
        Ok(Histogram::from_values(&[-5.0, 5.0], 2, 0.0, 1.0)?.counts() == [1, 1])
    });
    for (values, want) in [
        (&[1.0, 1.0, 1.0][..], (1.0, 0.0)),
        (&[0.0, 2.0][..], (1.0, 1.0)),
        (&[3.0][..], (3.0, 0.0)),
    ] {
        // population variance by definition
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        match mean_and_variance(values) {
            Ok((m, v)) => {
                c.close(&format!("mean of {values:?}"), m, want.0, TOL);
                c.close(&format!("variance of {values:?}"), v, want.1, TOL);
                c.close(&format!("variance oracle of {values:?}"), v, var, TOL);
            }
            Err(_) => c.check(&format!("mean_and_variance {values:?}"), false),
        }
    }
}

fn kde_examples(c: &mut Checks) {
    c.check_with("single kernel is maximal at its centre", || {
        let mut ok = true;
        for h in [0.05, 1.0, 7.0] {
            let p = ParzenDensity::with_bandwidth(&[&[0.0][..]], h)?;
            let top = p.density(&[0.0]);
            ok &= [-3.0, -0.5, -1e-3, 1e-3, 0.5, 3.0]
                .iter()
                .all(|&x| p.density(&[x]) < top);
        }
        Ok(ok)
    });
    c.check_with("two identical samples equal one", || {
        let one = ParzenDensity::with_bandwidth(&[&[1.5][..]], 0.7)?;
        let two = ParzenDensity::with_bandwidth(&[&[1.5][..], &[1.5][..]], 0.7)?;
        Ok([-2.0, 0.0, 1.5, 4.0]
            .iter()
            .all(|&x| (one.density(&[x]) - two.density(&[x])).abs() < TOL))
    });
    c.check_with("symmetric pair is symmetric about its mean", || {
        let p = ParzenDensity::with_bandwidth(&[&[1.0][..], &[5.0][..]], 0.8)?;
        Ok([0.0, 0.3, 1.0, 2.0, 4.5]
            .iter()
            .all(|&d| (p.density(&[3.0 + d]) - p.density(&[3.0 - d])).abs() < TOL))
    });
    c.check_with("KL of identical densities is zero", || {
        let s = [&[0.0][..], &[1.0][..], &[3.0][..]];
        let p = ParzenDensity::with_bandwidth(&s, 0.5)?;
        let q = ParzenDensity::with_bandwidth(&s, 0.5)?;
        Ok(kl_divergence(&p, &q).abs() < TOL)
    });
    match (
        ParzenDensity::with_bandwidth(&[&[0.0][..]; 3], 1.0),
        ParzenDensity::with_bandwidth(&[&[10.0][..]; 3], 1.0),
    ) {
        (Ok(p), Ok(q)) => {
            // ln(phi(0) / phi(10)) with unit bandwidth
            let want = 0.5 * 10.0f64.powi(2);
            c.close("KL {0,0,0} vs {10,10,10}", kl_divergence(&p, &q), want, TOL);
        }
        _ => c.check("KL {0,0,0} vs {10,10,10}", false),
    }
    c.check_with("KL grows with separation", || {
        let base = [0.0, 0.5, 1.0];
        let mut last = -1.0;
        for d in 0..=10 {
            let moved: Vec<[f64; 1]> = base.iter().map(|&x| [x + d as f64]).collect();
            let b: Vec<&[f64]> = base.iter().map(std::slice::from_ref).collect();
            let m: Vec<&[f64]> = moved.iter().map(|x| x.as_slice()).collect();
            let kl = kl_divergence(
                &ParzenDensity::with_bandwidth(&m, 0.5)?,
                &ParzenDensity::with_bandwidth(&b, 0.5)?,
            );
            if d > 0 && kl <= last {
                return Ok(false);
            }
            last = kl;
        }
        Ok(true)
    });
}

fn stability_examples(c: &mut Checks) {
    let params = |epsilon| StabilityParams {
        window: 2,
        density_window: 5,
        epsilon,
        bandwidth: BandwidthRule::default(),
    };
    c.check_with("constant configuration is inactive", || {
        let s = scalar_series(&[4.0; 10])?;
        Ok(!is_active(&s, AgentId(0), 9, &params(1e-6))?)
    });
    c.check_with("step change is active and matches the KL oracle", || {
        let values: Vec<f64> = (0..10)
            .map(|t| if t < 5 { 0.01 * t as f64 } else { 10.0 + 0.01 * t as f64 })
            .collect();
        let s = scalar_series(&values)?;
        let p = params(0.1);
        let pooled: Vec<[f64; 1]> = values.iter().map(|&v| [v]).collect();
        let refs: Vec<&[f64]> = pooled.iter().map(|v| v.as_slice()).collect();
        let h = p.bandwidth.bandwidths(&refs, 1);
        let oracle = kl_divergence(
            &ParzenDensity::new(&refs[5..], h.clone())?,
            &ParzenDensity::new(&refs[..5], h)?,
        );
        let got = activity_divergence(&s, AgentId(0), 9, &p)?;
        Ok(is_active(&s, AgentId(0), 9, &p)? && (got - oracle).abs() < TOL && oracle > 0.1)
    });
    c.check_with("infinite epsilon is never active", || {
        let values: Vec<f64> = (0..10).map(|t| if t < 5 { 0.0 } else { 1e6 }).collect();
        Ok(!is_active(
            &scalar_series(&values)?,
            AgentId(0),
            9,
            &params(f64::INFINITY),
        )?)
    });
    c.close("z(1, 1)", activity_factor(1, 1), 1.0, TOL);
    c.close("z(0, 50)", activity_factor(0, 50), -0.49, TOL);
    c.close("z(50, 50)", activity_factor(50, 50), 0.51, TOL);
    for (label, z) in [
        ("all inactive", activity_factor(0, 50)),
        ("all active", activity_factor(50, 50)),
    ] {
        match stability_from_activity(&[z; 9], 5) {
            Ok((xi, nu)) => c.check(&format!("{label}: xi = nu = 0"), xi == 0.0 && nu == 0.0),
            Err(_) => c.check(label, false),
        }
    }
    let alternating: Vec<f64> = (0..3)
        .map(|t| activity_factor(if t % 2 == 0 { 0 } else { 50 }, 50))
        .collect();
    match stability_from_activity(&alternating, 2) {
        Ok((_, nu)) => {
            c.close(
                "alternating activity nu (oracle)",
                nu,
                brute_force_nu(&alternating, 2),
                TOL,
            );
            // xi = +-0.5 about the pair mean
            c.close("alternating activity nu", nu, 0.25, TOL);
        }
        Err(_) => c.check("alternating activity nu", false),
    }
}

fn variability_and_coherence_examples(c: &mut Checks) {
    let same = vec![[2.0, -1.0]; 5];
    c.check_with("identical vectors: s_k = 0 for all k", || {
        Ok((1..=5).all(|k| matches!(average_centroid_distance(&same, k), Ok(v) if v == 0.0)))
    });
    let pair = [[0.0], [2.0]];
    c.check_with("{0, 2}: s_1 = 2", || {
        Ok((average_centroid_distance(&pair, 1)? - 2.0).abs() < TOL)
    });
    c.check_with("{0, 2}: s_2 = 0", || {
        Ok(average_centroid_distance(&pair, 2)?.abs() < TOL)
    });
    c.check_with("identical vectors: c_v = 0", || {
        Ok(configuration_variability(&same)? == 0.0)
    });
    c.check_with("four identical: k_max = 2, c_v = 0", || {
        Ok(max_cluster_count(4) == 2 && configuration_variability(&[[1.0]; 4])? == 0.0)
    });
    c.check_with("{0, 2}: c_v = 1", || {
        Ok(max_cluster_count(2) == 2 && (configuration_variability(&pair)? - 1.0).abs() < TOL)
    });
    c.check_with("{0, 2}: c_conf = 0.5", || {
        Ok((configuration_coherence(&pair)? - 0.5).abs() < TOL)
    });
    c.check_with("spreading lowers coherence", || {
        let base = [[0.0, 1.0], [1.0, -1.0], [3.0, 0.5]];
        let mut last = f64::INFINITY;
        for scale in [0.0, 0.1, 0.5, 1.0, 2.0, 10.0] {
            let v: Vec<[f64; 2]> = base.iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
            let c = configuration_coherence(&v)?;
            if c >= last {
                return Ok(false);
            }
            last = c;
        }
        Ok(true)
    });
}

fn usage_examples(c: &mut Checks) {
    let bounds = UsageBounds::uniform(1, 0.0, 10.0).expect("valid");
    c.check_with("constant parameter: global usage 0", || {
        Ok(global_parameter_usage(&scalar_series(&[3.0; 8])?, 0, 7, 5, &bounds)?.value == 0.0)
    });
    c.check_with("full span: global usage 1", || {
        let s = scalar_series(&[0.0, 4.0, 10.0, 6.0, 2.0, 5.0])?;
        Ok((global_parameter_usage(&s, 0, 5, 5, &bounds)?.value - 1.0).abs() < TOL)
    });
    c.check_with("pooled {2..7} in [0, 10]: global usage 0.5", || {
        let s = scalar_series(&[2.0, 3.0, 4.0, 5.0, 6.0, 7.0])?;
        Ok((global_parameter_usage(&s, 0, 5, 5, &bounds)?.value - 0.5).abs() < TOL)
    });
    c.check_with("constant agents: average usage 0", || {
        let rows = vec![vec![vec![1.0], vec![9.0]]; 6];
        Ok(average_parameter_usage(&series_of(&rows)?, 0, 5, 5, &bounds)?.value == 0.0)
    });
    c.check_with("every agent sweeps the range: average usage 1", || {
        let rows: Vec<Vec<Vec<f64>>> = (0..6)
            .map(|t| vec![vec![2.0 * t as f64], vec![10.0 - 2.0 * t as f64]])
            .collect();
        Ok((average_parameter_usage(&series_of(&rows)?, 0, 5, 5, &bounds)?.value - 1.0).abs() < TOL)
    });
    c.check_with("agent ranges 2 and 4: average usage 0.3", || {
        let rows: Vec<Vec<Vec<f64>>> = (0..6)
            .map(|t| {
                vec![
                    vec![1.0 + (t % 3) as f64],
                    vec![5.0 + if t % 2 == 0 { 0.0 } else { 4.0 }],
                ]
            })
            .collect();
        Ok((average_parameter_usage(&series_of(&rows)?, 0, 5, 5, &bounds)?.value - 0.3).abs() < TOL)
    });
}

/// Fraction of independent uniform pairs of length `n` with `T > 0.7`.
fn null_transferability_rate(trials: usize, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let t = match pearson(&x, &y) {
            Ok(Some(r)) => 1.0 - r.abs(),
            _ => 1.0,
        };
        if t > 0.7 {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

fn transfer_examples(c: &mut Checks) {
    for bins in [2usize, 5, 100] {
        c.check_with(&format!("uniform over {bins} bins: E = 1"), || {
            Ok((emergence(&Histogram::from_counts(vec![4; bins])?)? - 1.0).abs() < TOL)
        });
    }
    c.check_with("point mass: E = 0", || {
        Ok(emergence(&Histogram::from_counts(vec![0, 9, 0])?)? == 0.0)
    });
    c.check_with("binary {0.9, 0.1}", || {
        let e = emergence(&Histogram::from_counts(vec![9, 1])?)?;
        Ok((e - binary_entropy(0.9)).abs() < TOL && (e - 0.46900).abs() < 1e-5)
    });
    c.check_with("C(0) = 0", || Ok(complexity(0.0)? == 0.0));
    c.check_with("C(1) = 0", || Ok(complexity(1.0)? == 0.0));
    c.check_with("C(0.5) = 1", || Ok(complexity(0.5)? == 1.0));
    let ramp: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() + i as f64 * 0.01).collect();
    let negated: Vec<f64> = ramp.iter().map(|v| -v).collect();
    c.check_with("pearson(x, x) = 1", || {
        Ok(matches!(pearson(&ramp, &ramp)?, Some(r) if (r - 1.0).abs() < TOL))
    });
    c.check_with("pearson(x, -x) = -1", || {
        Ok(matches!(pearson(&ramp, &negated)?, Some(r) if (r + 1.0).abs() < TOL))
    });
    c.check_with("pearson with constant x is undefined", || {
        Ok(pearson(&[2.0; 40], &ramp)?.is_none())
    });

    let params = TransferabilityParams::default();
    let signal_of = |values: &[f64]| {
        // a two-bin histogram with the complexity carried by its split
        let mut s = ComplexitySignal::new(SignalSource::System, Binning::Discrete { lo: 0, hi: 1 }, 0);
        for &v in values {
            let ones = (v * 1000.0).round() as usize;
            let samples: Vec<f64> = (0..1000).map(|i| if i < ones { 1.0 } else { 0.0 }).collect();
            s.push_samples(&samples).expect("valid samples");
        }
        s
    };
    let wave: Vec<f64> = (0..40).map(|i| 0.05 + 0.4 * (i as f64 / 39.0)).collect();
    let sys = signal_of(&wave);
    let flat = signal_of(&[0.3; 40]);
    c.check_with("env == system: T = 0", || {
        Ok(transferability(&sys, &sys, 39, &params)?.abs() < TOL)
    });
    c.check_with("constant window: T = 1", || {
        Ok(transferability(&sys, &flat, 39, &params)? == 1.0)
    });
    let rate = null_transferability_rate(10_000, 40, 2024);
    c.check(
        &format!("independent signals: P(T > 0.7) = {rate:.4} >= 0.95"),
        rate >= 0.95,
    );

    let binning = Binning::Continuous {
        bins: 10,
        lo: 0.0,
        hi: 1.0,
    };
    c.check_with("identical samples: C = 0", || {
        let mut s = ComplexitySignal::new(SignalSource::Environment, binning, 0);
        Ok((0..5).all(|_| matches!(s.push_samples(&[0.42; 30]), Ok(v) if v == 0.0)))
    });
    c.check_with("uniformly spread samples: C = 0", || {
        let mut s = ComplexitySignal::new(SignalSource::Environment, binning, 0);
        let spread: Vec<f64> = (0..30).map(|i| (i % 10) as f64 / 10.0 + 0.05).collect();
        Ok((0..5).all(|_| matches!(s.push_samples(&spread), Ok(v) if v.abs() < TOL)))
    });
    let p = half_bit_density();
    c.close("bisection density for E = 0.5", p, 0.11, 1e-3);
    c.check_with("split with E = 0.5: C = 1", || {
        let total = 1_000_000u64;
        let ones = (p * total as f64).round() as u64;
        let h = Histogram::from_counts(vec![total - ones, ones])?;
        Ok((complexity(emergence(&h)?)? - 1.0).abs() < TOL)
    });
}

fn traffic_examples(c: &mut Checks) {
    c.check_with("empty network: even split, constant configuration, C = 0", || {
        let params = TrafficParams {
            background_cars: 0,
            rush_out_tick: None,
            rush_back_tick: None,
            ..TrafficParams::default()
        };
        let mut w = TrafficWorld::new(params, 1);
        let start = w.configurations();
        for _ in 0..50 {
            w.step();
            if w.configurations() != start {
                return Ok(false);
            }
        }
        let interior: Vec<ConfigurationVector> = [6usize, 7, 8, 21, 22, 23].iter().map(|&v| start[v].clone()).collect();
        let env = w.environment_observation()?;
        let e = emergence(&w.environment_binning().histogram(&env)?)?;
        let even = w.green_split(7).iter().all(|&g| g == 5);
        Ok(
            even && configuration_coherence(&interior)? == 1.0
                && env.iter().all(|&q| q == 0.0)
                && complexity(e)? == 0.0,
        )
    });
    c.check_with("single car arrives after the BFS hop count", || {
        let lines: [(usize, Vec<(usize, usize)>); 2] = [(2, vec![(0, 1)]), (5, vec![(0, 1), (1, 2), (2, 3), (3, 4)])];
        for (nodes, edges) in lines {
            let streets: Vec<(usize, usize, Direction)> = edges.iter().map(|&(a, b)| (a, b, Direction::East)).collect();
            let params = TrafficParams {
                background_cars: 0,
                rush_out_tick: None,
                rush_back_tick: None,
                all_green: true,
                ..TrafficParams::default()
            };
            let mut w = TrafficWorld::with_network(params, Network::from_streets(nodes, &streets), vec![], vec![], 0);
            w.spawn_car(0, nodes - 1, true);
            let mut ticks = 0u64;
            while w.commuters() > 0 && ticks < 100 {
                w.step();
                ticks += 1;
            }
            if Some(ticks) != bfs_hops(nodes, &edges, 0, nodes - 1) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    c.check_with("equal non-zero queues: C = 0", || {
        let h = Binning::Discrete { lo: 0, hi: 40 }.histogram(&[4.0; 12])?;
        Ok(complexity(emergence(&h)?)? == 0.0)
    });
    c.check_with("queues {0, 0, 1, 3}", || {
        let h = Binning::Discrete { lo: 0, hi: 3 }.histogram(&[0.0, 0.0, 1.0, 3.0])?;
        let p = [0.5, 0.25, 0.0, 0.25];
        let bits: f64 = p.iter().filter(|&&q| q > 0.0).map(|&q| -q * f64::log2(q)).sum();
        let want_e = bits / 2.0;
        let e = emergence(&h)?;
        Ok(h.probabilities() == p
            && (e - want_e).abs() < TOL
            && (complexity(e)? - 4.0 * want_e * (1.0 - want_e)).abs() < TOL)
    });
}

fn flocking_examples(c: &mut Checks) {
    let bird = |x: f64, y: f64, a: f64| Bird {
        position: [x, y],
        heading: [a.cos(), a.sin()],
    };
    c.check("lone bird keeps its heading", {
        let mut w = FlockWorld::from_birds(FlockParams::default(), vec![bird(10.0, 10.0, 0.7)]);
        flocking_step(&mut w);
        w.birds()[0].heading == [0.7f64.cos(), 0.7f64.sin()]
    });
    c.check("distant birds keep their headings", {
        let start = vec![bird(10.0, 10.0, 0.3), bird(80.0, 90.0, 2.0)];
        let mut w = FlockWorld::from_birds(FlockParams::default(), start.clone());
        flocking_step(&mut w);
        w.birds().iter().zip(&start).all(|(a, b)| a.heading == b.heading)
    });
    {
        let params = FlockParams {
            cohesion_weight: 0.0,
            avoidance_weight: 0.0,
            shot_tick: None,
            ..FlockParams::default()
        };
        let mut w = FlockWorld::from_birds(params, vec![bird(20.0, 20.0, 0.0), bird(20.0, 20.0, TAU / 4.0)]);
        flocking_step(&mut w);
        // unit(h + unit(other)) for orthogonal unit headings
        let bisector = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
        for (i, b) in w.birds().iter().enumerate() {
            c.close(&format!("bird {i} bisector x"), b.heading[0], bisector[0], TOL);
            c.close(&format!("bird {i} bisector y"), b.heading[1], bisector[1], TOL);
        }
    }
    let binning = Binning::Continuous {
        bins: 100,
        lo: 0.0,
        hi: TAU,
    };
    c.check_with("parallel flock: both C = 0", || {
        // 30 apart on a grid: nobody is anybody's neighbour
        let birds: Vec<Bird> = (0..20)
            .map(|i| bird(30.0 * (i % 5) as f64, 30.0 * (i / 5) as f64, 1.2))
            .collect();
        let params = FlockParams {
            shot_tick: None,
            ..FlockParams::default()
        };
        let mut w = FlockWorld::from_birds(params, birds);
        Scenario::step(&mut w);
        let env = complexity(emergence(&binning.histogram(&w.environment_observation()?)?)?)?;
        let sys = complexity(emergence(&binning.histogram(&w.system_observation()?)?)?)?;
        Ok(env == 0.0 && sys == 0.0)
    });
    c.check_with("headings in every bucket: E = 1, C = 0", || {
        let angles: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) * TAU / 100.0).collect();
        let e = emergence(&binning.histogram(&angles)?)?;
        Ok((e - 1.0).abs() < TOL && complexity(e)?.abs() < TOL)
    });
    c.check_with("frozen flock: T = 1", || {
        let mut config = RunConfig::defaults(ScenarioKind::Flocking, 1);
        config.ticks = 80;
        for p in ["speed=0", "alignment=0", "cohesion=0", "avoidance=0", "shot_tick=none"] {
            config.apply_param(p)?;
        }
        let out = run(&config)?;
        let t = out.metric(TRANSFERABILITY).expect("transferability series");
        Ok(!t.is_empty() && t.values().all(|v| v == 1.0))
    });
}

fn life_examples(c: &mut Checks) {
    let grid = |w: usize, h: usize, alive: &[(usize, usize)]| {
        let mut cells = vec![0u8; w * h];
        for &(x, y) in alive {
            cells[y * w + x] = 1;
        }
        cells
    };
    c.check("block is a still life", {
        let block = grid(6, 6, &[(2, 2), (3, 2), (2, 3), (3, 3)]);
        let mut w = LifeWorld::from_cells(6, 6, block.clone());
        (0..5).all(|_| {
            life_step(&mut w);
            w.cells() == block.as_slice()
        })
    });
    c.check("blinker has period two", {
        let horizontal = grid(5, 5, &[(1, 2), (2, 2), (3, 2)]);
        let vertical = grid(5, 5, &[(2, 1), (2, 2), (2, 3)]);
        let mut w = LifeWorld::from_cells(5, 5, horizontal.clone());
        life_step(&mut w);
        let first = w.cells() == vertical.as_slice();
        life_step(&mut w);
        first && w.cells() == horizontal.as_slice()
    });
    c.check("empty grid stays empty", {
        let mut w = LifeWorld::from_cells(7, 4, vec![0; 28]);
        life_step(&mut w);
        w.cells().iter().all(|&x| x == 0)
    });
    let binary = Binning::Discrete { lo: 0, hi: 1 };
    let life_c = |cells: Vec<u8>, w: usize, h: usize| -> Result<(f64, f64)> {
        let mut world = LifeWorld::from_cells(w, h, cells);
        Scenario::step(&mut world);
        let env = complexity(emergence(&binary.histogram(&world.environment_observation()?)?)?)?;
        let sys = complexity(emergence(&binary.histogram(&world.system_observation()?)?)?)?;
        Ok((env, sys))
    };
    c.check_with("all-dead grid: both C = 0", || {
        Ok(life_c(vec![0; 100], 10, 10)? == (0.0, 0.0))
    });
    c.check_with("half alive: E = 1, C = 0", || {
        let cells: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let e = emergence(&binary.histogram(&cells)?)?;
        Ok((e - 1.0).abs() < TOL && complexity(e)?.abs() < TOL)
    });
    c.check_with("density 0.11: E ~ 0.5, C ~ 1", || {
        let cells: Vec<f64> = (0..100).map(|i| if i < 11 { 1.0 } else { 0.0 }).collect();
        let e = emergence(&binary.histogram(&cells)?)?;
        Ok((e - binary_entropy(0.11)).abs() < TOL && (e - 0.5).abs() < 1e-3 && (complexity(e)? - 1.0).abs() < 1e-5)
    });
}

fn peak_examples(c: &mut Checks) {
    let flat: Vec<(u64, f64)> = (0..400).map(|t| (t, 2.5)).collect();
    c.check_with("constant series: no peaks", || {
        Ok(
            detect_peaks(&metric_of(&flat), 0..=199, PEAK_MULTIPLIER, Polarity::Above, &[])?
                .peaks
                .is_empty(),
        )
    });
    c.check_with("one spike: exactly one peak", || {
        let mut spiked = flat.clone();
        spiked[300].1 += 10.0;
        let r = detect_peaks(&metric_of(&spiked), 0..=199, PEAK_MULTIPLIER, Polarity::Above, &[])?;
        Ok(r.peaks == [300])
    });
    c.check_with("spikes at 250 and 750 detected in both windows", || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut points: Vec<(u64, f64)> = (0..1000).map(|t| (t, rng.gen::<f64>())).collect();
        // uniform noise has std 1/sqrt(12); both spikes sit far outside the 3-sigma band
        points[250].1 = 5.0;
        points[750].1 = 5.0;
        let r = detect_peaks(
            &metric_of(&points),
            0..=249,
            PEAK_MULTIPLIER,
            Polarity::Above,
            &[250..=320, 750..=820],
        )?;
        Ok(r.all_detected() && r.peaks == [250, 750])
    });
}

fn property_checks(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(1..12);
        let dim = rng.gen_range(1..4);
        let identical = rng.gen_bool(0.3);
        let first: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let v: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                if identical {
                    first.clone()
                } else {
                    (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect()
                }
            })
            .collect();
        let all_same = v.iter().all(|x| *x == v[0]);
        ok &= match configuration_coherence(&v) {
            Ok(c) => c > 0.0 && c <= 1.0 && ((c == 1.0) == all_same),
            Err(_) => false,
        };
    }
    c.check("c_conf in (0, 1], 1 iff identical", ok);

    let mut ok = true;
    for _ in 0..200 {
        let m = rng.gen_range(2..8);
        let agents = rng.gen_range(1..60);
        let z: Vec<f64> = (0..2 * m - 1)
            .map(|_| activity_factor(rng.gen_range(0..=agents), agents))
            .collect();
        ok &= matches!(stability_from_activity(&z, m), Ok((_, nu)) if nu >= 0.0);
        let constant = vec![z[0]; 2 * m - 1];
        ok &= matches!(stability_from_activity(&constant, m), Ok((_, nu)) if nu == 0.0);
    }
    c.check("nu >= 0, and 0 on constant activity", ok);

    let mut ok = true;
    for _ in 0..200 {
        let n = rng.gen_range(3..60);
        let x: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.1) { 0.5 } else { rng.gen() })
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let t = match pearson(&x, &y) {
            Ok(Some(r)) => 1.0 - r.abs(),
            Ok(None) => 1.0,
            Err(_) => f64::NAN,
        };
        ok &= (0.0..=1.0).contains(&t);
    }
    c.check("T in [0, 1]", ok);

    let mut ok = true;
    for _ in 0..100 {
        let agents = rng.gen_range(1..6);
        let ticks = rng.gen_range(2..15);
        let rows: Vec<Vec<Vec<f64>>> = (0..ticks)
            .map(|_| {
                (0..agents)
                    .map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(-1.0..1.0)])
                    .collect()
            })
            .collect();
        let bounds = UsageBounds::new(vec![0.0, -1.0], vec![10.0, 1.0]).expect("valid");
        let Ok(s) = series_of(&rows) else {
            ok = false;
            continue;
        };
        let len = rng.gen_range(1..ticks as u64);
        for tick in len..ticks as u64 {
            for j in 0..2 {
                ok &= match (
                    global_parameter_usage(&s, j, tick, len, &bounds),
                    average_parameter_usage(&s, j, tick, len, &bounds),
                ) {
                    (Ok(g), Ok(a)) => g.value >= a.value - 1e-12,
                    _ => false,
                };
            }
        }
    }
    c.check("U_g >= U_a", ok);
}

/// Unit properties and every worked example.
pub fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    series_examples(&mut c);
    histogram_and_stats_examples(&mut c);
    kde_examples(&mut c);
    stability_examples(&mut c);
    variability_and_coherence_examples(&mut c);
    usage_examples(&mut c);
    transfer_examples(&mut c);
    traffic_examples(&mut c);
    flocking_examples(&mut c);
    life_examples(&mut c);
    peak_examples(&mut c);
    property_checks(&mut c);
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(1);
    Outcome {
        id: 1,
        name: "metric unit properties",
        passed: c.passed() && fast,
        detail: format!("{} in {}", c.summary(), secs(elapsed)),
    }
}

/// Clustering and Life stepping against brute-force oracles.
pub fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut clustering_cases = 0;
    let mut clustering_failures = 0;
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let dim = rng.gen_range(1..=2);
        // a coarse grid makes duplicate points common
        let coarse = rng.gen_bool(0.3);
        let v: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        if coarse {
                            rng.gen_range(-2..=2) as f64
                        } else {
                            rng.gen_range(-5.0..5.0)
                        }
                    })
                    .collect()
            })
            .collect();
        for k in 1..=n {
            clustering_cases += 1;
            let want = optimal_average_centroid_distance(&v, k);
            match average_centroid_distance(&v, k) {
                Ok(got) if (got - want).abs() <= TOL => {}
                _ => clustering_failures += 1,
            }
        }
    }
    let mut grid_failures = 0;
    for _ in 0..100 {
        let density = rng.gen_range(0.1..0.7);
        let cells: Vec<u8> = (0..100).map(|_| u8::from(rng.gen_bool(density))).collect();
        let mut w = LifeWorld::from_cells(10, 10, cells.clone());
        life_step(&mut w);
        if w.cells() != life_step_oracle(&cells, 10, 10).as_slice() {
            grid_failures += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        id: 2,
        name: "oracle equivalence",
        passed: clustering_failures == 0 && grid_failures == 0 && elapsed < Duration::from_secs(10),
        detail: format!(
            "clustering {}/{clustering_cases} exact, life {}/100 grids exact, {}",
            clustering_cases - clustering_failures,
            100 - grid_failures,
            secs(elapsed)
        ),
    }
}

/// Seeded default runs of one scenario, in seed order.
pub fn seed_runs(kind: ScenarioKind) -> Result<Vec<RunOutput>> {
    let seeds: Vec<u64> = SEEDS.collect();
    seeds.par_iter().map(|&s| run(&RunConfig::defaults(kind, s))).collect()
}

/// Baseline for peak detection: the segment before the first disturbance.
pub fn baseline_before(out: &RunOutput) -> RangeInclusive<u64> {
    let first = out.disturbances.iter().map(|d| d.tick).min().unwrap_or(u64::MAX);
    first.saturating_sub(BASELINE_TICKS)..=first.saturating_sub(1)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Per seed, which adaptation metrics detect a peak in every expected window.
pub fn traffic_detections(out: &RunOutput) -> Result<Vec<&'static str>> {
    let windows: Vec<RangeInclusive<u64>> = out.disturbances.iter().map(|d| d.tick..=d.tick + 70).collect();
    let baseline = baseline_before(out);
    let mut hits = Vec::new();
    for name in ADAPTATION_METRICS {
        let series = out.metric(name).expect("adaptation metric");
        if detect_peaks(series, baseline.clone(), PEAK_MULTIPLIER, Polarity::Above, &windows)?.all_detected() {
            hits.push(name);
        }
    }
    Ok(hits)
}

pub fn criterion_3(runs: &[RunOutput], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut good = 0;
    let mut per_seed = Vec::new();
    for out in runs {
        match traffic_detections(out) {
            Ok(hits) => {
                if hits.len() >= 4 {
                    good += 1;
                }
                per_seed.push(format!("s{}:{}", out.seed, hits.len()));
            }
            Err(e) => per_seed.push(format!("s{}:error {e}", out.seed)),
        }
    }
    let elapsed = elapsed + start.elapsed();
    Outcome {
        id: 3,
        name: "traffic disturbances",
        passed: good >= REQUIRED_SEEDS && elapsed < Duration::from_secs(120),
        detail: format!(
            "{good}/{} seeds with >= 4/5 metrics peaking in both rush windows [{}], {}",
            runs.len(),
            per_seed.join(" "),
            secs(elapsed)
        ),
    }
}

pub fn criterion_4(runs: &[RunOutput]) -> Outcome {
    let mut good = 0;
    let mut per_seed = Vec::new();
    for out in runs {
        let t = out.metric(TRANSFERABILITY).expect("transferability series");
        let m = mean(t.values());
        let above = t.values().filter(|&v| v > 0.5).count() as f64 / t.len() as f64;
        if (0.6..=0.95).contains(&m) && above >= 0.9 {
            good += 1;
        }
        per_seed.push(format!("s{}:{m:.2}/{:.0}%", out.seed, 100.0 * above));
    }
    Outcome {
        id: 4,
        name: "traffic transferability",
        passed: good >= REQUIRED_SEEDS,
        detail: format!(
            "{good}/{} seeds with mean T in [0.6, 0.95] and >= 90% of T > 0.5 (mean/share: {})",
            runs.len(),
            per_seed.join(" ")
        ),
    }
}

pub fn criterion_5(runs: &[RunOutput]) -> Outcome {
    let mut good = 0;
    let mut per_seed = Vec::new();
    for out in runs {
        let baseline = baseline_before(out);
        let windows: Vec<RangeInclusive<u64>> = out.disturbances.iter().map(|d| d.tick..=d.tick + 40).collect();
        let detected = |name: &str| {
            detect_peaks(
                out.metric(name).expect("metric"),
                baseline.clone(),
                PEAK_MULTIPLIER,
                Polarity::Above,
                &windows,
            )
            .map(|r| r.all_detected())
            .unwrap_or(false)
        };
        let (stab, usage) = (detected(STABILITY), detected(AVERAGE_USAGE));
        let t = mean(out.metric(TRANSFERABILITY).expect("transferability series").values());
        let in_band = (0.25..=0.60).contains(&t);
        if stab && usage && in_band {
            good += 1;
        }
        per_seed.push(format!("s{}:{}{}/{t:.2}", out.seed, u8::from(stab), u8::from(usage)));
    }
    Outcome {
        id: 5,
        name: "flocking disturbance",
        passed: good >= REQUIRED_SEEDS,
        detail: format!(
            "{good}/{} seeds with stability and average-usage peaks in [500, 540] and mean T in [0.25, 0.60] \
             (stab,usage/T: {})",
            runs.len(),
            per_seed.join(" ")
        ),
    }
}

pub fn criterion_6(runs: &[RunOutput], elapsed: Duration) -> Outcome {
    let mut good = 0;
    let mut per_seed = Vec::new();
    for out in runs {
        let at = |name: &str, tick| out.metric(name).and_then(|s| s.value_at(tick));
        let global = out.metric(GLOBAL_USAGE).expect("global usage");
        let coherence = out.metric(COHERENCE).expect("coherence");
        let checks = [
            !global.is_empty() && global.values().all(|v| v == 1.0),
            matches!((at(COHERENCE, 900), at(COHERENCE, 50)), (Some(a), Some(b)) if a > b),
            coherence.values().all(|v| v < 1.0),
            matches!((at(VARIABILITY, 900), at(VARIABILITY, 50)), (Some(a), Some(b)) if a < b),
            matches!((at(AVERAGE_USAGE, 900), at(AVERAGE_USAGE, 50)), (Some(a), Some(b)) if a < b),
            (0.25..=0.60).contains(&mean(out.metric(TRANSFERABILITY).expect("transferability").values())),
        ];
        if checks.iter().all(|&b| b) {
            good += 1;
        }
        let flags: String = checks.iter().map(|&b| if b { '1' } else { '0' }).collect();
        per_seed.push(format!("s{}:{flags}", out.seed));
    }
    Outcome {
        id: 6,
        name: "game of life",
        passed: good >= REQUIRED_SEEDS && elapsed < Duration::from_secs(60),
        detail: format!(
            "{good}/{} seeds pass [U_g=1, coh up, coh<1, c_v down, U_a down, T band] ({}), {}",
            runs.len(),
            per_seed.join(" "),
            secs(elapsed)
        ),
    }
}

fn scratch_dir(tag: &str) -> PathBuf {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    std::env::temp_dir().join(format!("saso-check-{}-{nanos}-{tag}", std::process::id()))
}

fn read_all(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)?
        .map(|e| {
            let e = e?;
            Ok((e.file_name().to_string_lossy().into_owned(), fs::read(e.path())?))
        })
        .collect::<Result<_>>()?;
    files.sort();
    Ok(files)
}

/// Runs `kind` twice with seed 1 and compares the written files byte for byte.
pub fn rerun_matches(kind: ScenarioKind) -> Result<bool> {
    let config = RunConfig::defaults(kind, 1);
    let mut written = Vec::new();
    for tag in ["a", "b"] {
        let dir = scratch_dir(&format!("{kind}-{tag}"));
        run(&config)?.write_to(&dir)?;
        let files = read_all(&dir);
        let _ = fs::remove_dir_all(&dir);
        written.push(files?);
    }
    Ok(!written[0].is_empty() && written[0] == written[1])
}

pub fn criterion_7() -> Outcome {
    let start = Instant::now();
    let verdicts: Vec<(ScenarioKind, Result<bool>)> =
        ScenarioKind::ALL.par_iter().map(|&k| (k, rerun_matches(k))).collect();
    let passed = verdicts.iter().all(|(_, v)| matches!(v, Ok(true)));
    let detail: Vec<String> = verdicts
        .iter()
        .map(|(k, v)| match v {
            Ok(true) => format!("{k}: identical"),
            Ok(false) => format!("{k}: differs"),
            Err(e) => format!("{k}: error {e}"),
        })
        .collect();
    Outcome {
        id: 7,
        name: "determinism",
        passed,
        detail: format!("{}, {}", detail.join(", "), secs(start.elapsed())),
    }
}

fn failed_run(id: u32, name: &'static str, e: &crate::Error) -> Outcome {
    Outcome {
        id,
        name,
        passed: false,
        detail: format!("scenario run failed: {e}"),
    }
}

/// Every criterion, in order.
pub fn run_all() -> Vec<Outcome> {
    let mut outcomes = vec![criterion_1(), criterion_2()];

    let start = Instant::now();
    match seed_runs(ScenarioKind::Traffic) {
        Ok(runs) => {
            let elapsed = start.elapsed();
            outcomes.push(criterion_3(&runs, elapsed));
            outcomes.push(criterion_4(&runs));
        }
        Err(e) => {
            outcomes.push(failed_run(3, "traffic disturbances", &e));
            outcomes.push(failed_run(4, "traffic transferability", &e));
        }
    }
    match seed_runs(ScenarioKind::Flocking) {
        Ok(runs) => outcomes.push(criterion_5(&runs)),
        Err(e) => outcomes.push(failed_run(5, "flocking disturbance", &e)),
    }
    let start = Instant::now();
    match seed_runs(ScenarioKind::Life) {
        Ok(runs) => outcomes.push(criterion_6(&runs, start.elapsed())),
        Err(e) => outcomes.push(failed_run(6, "game of life", &e)),
    }
    outcomes.push(criterion_7());
    outcomes
}
