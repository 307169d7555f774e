//! Emergence, complexity and transferability.
//!
//! Emergence is the Shannon entropy of a discretised observable normalised by
//! `ln(bin_count)`, complexity is `4 E (1 - E)`, and transferability is one minus
//! the absolute Pearson correlation between the system's and the environment's
//! complexity over a trailing window.

use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// Normalised entropy in `[0, 1]`. A single-bin histogram has emergence 0.
pub fn emergence(h: &Histogram) -> Result<f64> {
    if h.total() == 0 {
        return Err(Error::Empty("emergence histogram"));
    }
    if h.bin_count() == 1 {
        return Ok(0.0);
    }
    let entropy: f64 = h
        .probabilities()
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok((entropy / (h.bin_count() as f64).ln()).clamp(0.0, 1.0))
}

/// `C = 4 E (1 - E)`.
pub fn complexity(e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::InvalidParameter(format!("emergence {e} outside [0, 1]")));
    }
    Ok(4.0 * e * (1.0 - e))
}

/// Pearson correlation; `None` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter("correlation needs at least two points".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Ok(None);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)))
}

/// Which observable a complexity signal was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSource {
    System,
    Environment,
}

/// How per-tick samples are discretised before computing emergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// `bins` equal-width buckets over `[lo, hi]`.
    Continuous { bins: usize, lo: f64, hi: f64 },
    /// One bucket per integer in `lo..=hi`.
    Discrete { lo: i64, hi: i64 },
}

impl Binning {
    pub fn histogram(&self, values: &[f64]) -> Result<Histogram> {
        match *self {
            Binning::Continuous { bins, lo, hi } => Histogram::from_values(values, bins, lo, hi),
            Binning::Discrete { lo, hi } => Histogram::integer(values, lo, hi),
        }
    }

    pub fn bin_count(&self) -> usize {
        match *self {
            Binning::Continuous { bins, .. } => bins,
            Binning::Discrete { lo, hi } => (hi - lo + 1).max(0) as usize,
        }
    }
}

/// Complexity of one observable over consecutive ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexitySignal {
    pub source: SignalSource,
    pub binning: Binning,
    first_tick: u64,
    values: Vec<f64>,
}

impl ComplexitySignal {
    pub fn new(source: SignalSource, binning: Binning, first_tick: u64) -> Self {
        Self {
            source,
            binning,
            first_tick,
            values: Vec::new(),
        }
    }

    /// Appends the complexity of the next tick's samples and returns it.
    pub fn push_samples(&mut self, samples: &[f64]) -> Result<f64> {
        let c = complexity(emergence(&self.binning.histogram(samples)?)?)?;
        self.values.push(c);
        Ok(c)
    }

    pub fn first_tick(&self) -> u64 {
        self.first_tick
    }

    /// Tick after the last value, i.e. the next tick to be pushed.
    pub fn end_tick(&self) -> u64 {
        self.first_tick + self.values.len() as u64
    }

    pub fn value_at(&self, tick: u64) -> Option<f64> {
        tick.checked_sub(self.first_tick)
            .and_then(|i| self.values.get(i as usize))
            .copied()
    }

    pub fn points(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.first_tick + i as u64, v))
    }

    /// Values for ticks `[end - length + 1, end]`, if all are present.
    pub fn window(&self, end: u64, length: u64) -> Option<&[f64]> {
        let start = (end + 1).checked_sub(length)?;
        let i = start.checked_sub(self.first_tick)? as usize;
        let j = (end + 1).checked_sub(self.first_tick)? as usize;
        self.values.get(i..j)
    }
}

/// Builds a complexity signal from per-tick samples starting at `first_tick`.
pub fn complexity_signal(
    observable: &[Vec<f64>],
    source: SignalSource,
    binning: Binning,
    first_tick: u64,
) -> Result<ComplexitySignal> {
    let mut signal = ComplexitySignal::new(source, binning, first_tick);
    for samples in observable {
        signal.push_samples(samples)?;
    }
    Ok(signal)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferabilityParams {
    /// Correlation window length.
    pub window: u64,
    /// Buckets used for continuous observables.
    pub bin_count: usize,
}

impl Default for TransferabilityParams {
    fn default() -> Self {
        Self {
            window: 40,
            bin_count: 100,
        }
    }
}

impl TransferabilityParams {
    pub fn validate(&self) -> Result<()> {
        if self.window < 3 {
            return Err(Error::InvalidParameter("transferability window must be >= 3".into()));
        }
        if self.bin_count < 2 {
            return Err(Error::InvalidParameter("bin_count must be >= 2".into()));
        }
        Ok(())
    }
}

/// `T = 1 - |corr|` over the trailing window ending at `tick`; 1 when the
/// correlation is undefined because one window is constant.
pub fn transferability(
    system: &ComplexitySignal,
    environment: &ComplexitySignal,
    tick: u64,
    params: &TransferabilityParams,
) -> Result<f64> {
    params.validate()?;
    let warm_up = || Error::WarmUp {
        end: tick,
        length: params.window,
        required_from: tick as i64 - params.window as i64 + 1,
    };
    let x = system.window(tick, params.window).ok_or_else(warm_up)?;
    let y = environment.window(tick, params.window).ok_or_else(warm_up)?;
    Ok(match pearson(x, y)? {
        Some(c) => 1.0 - c.abs(),
        None => 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn binary_entropy(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn uniform_histograms_have_full_emergence() {
        for bins in 2..20 {
            let h = Histogram::from_counts(vec![3; bins]).unwrap();
            assert!((emergence(&h).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_has_zero_emergence() {
        let h = Histogram::from_counts(vec![0, 7, 0, 0]).unwrap();
        assert_eq!(emergence(&h).unwrap(), 0.0);
        let h = Histogram::from_counts(vec![5]).unwrap();
        assert_eq!(emergence(&h).unwrap(), 0.0);
    }

    #[test]
    fn binary_ninety_ten() {
        let h = Histogram::from_counts(vec![9, 1]).unwrap();
        let e = emergence(&h).unwrap();
        // -(0.9 log2 0.9 + 0.1 log2 0.1)
        assert!((e - binary_entropy(0.9)).abs() < 1e-12);
        assert!((e - 0.46900).abs() < 1e-5);
    }

    #[test]
    fn empty_histogram_is_rejected() {
        assert!(emergence(&Histogram::from_counts(vec![0, 0]).unwrap()).is_err());
    }

    #[test]
    fn complexity_values() {
        assert_eq!(complexity(0.0).unwrap(), 0.0);
        assert_eq!(complexity(1.0).unwrap(), 0.0);
        assert_eq!(complexity(0.5).unwrap(), 1.0);
        assert!(complexity(1.1).is_err());
        assert!(complexity(-0.1).is_err());
    }

    #[test]
    fn pearson_values() {
        let x = [1.0, 2.0, 4.0, 3.5];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &neg).unwrap().unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&[2.0; 4], &x).unwrap(), None);
        assert!(pearson(&x, &x[..3]).is_err());
    }

    fn signal(values: &[f64]) -> ComplexitySignal {
        ComplexitySignal {
            source: SignalSource::System,
            binning: Binning::Discrete { lo: 0, hi: 1 },
            first_tick: 0,
            values: values.to_vec(),
        }
    }

    #[test]
    fn identical_signals_are_not_transferable() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let p = TransferabilityParams {
            window: 5,
            bin_count: 2,
        };
        assert!(transferability(&signal(&v), &signal(&v), 9, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_window_is_fully_transferable() {
        let v: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let p = TransferabilityParams {
            window: 5,
            bin_count: 2,
        };
        assert_eq!(transferability(&signal(&[0.3; 10]), &signal(&v), 9, &p).unwrap(), 1.0);
    }

    #[test]
    fn transferability_warm_up() {
        let p = TransferabilityParams {
            window: 5,
            bin_count: 2,
        };
        let s = signal(&[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!(transferability(&s, &s, 4, &p).is_ok());
        assert!(matches!(transferability(&s, &s, 3, &p), Err(Error::WarmUp { .. })));
        assert!(matches!(transferability(&s, &s, 5, &p), Err(Error::WarmUp { .. })));
    }

    /// `P(|r| < x)` for the Pearson coefficient of `n` independent normal pairs,
    /// from its null density `(1 - r^2)^((n - 4) / 2)` by Simpson's rule.
    fn null_pearson_mass_below(x: f64, n: usize) -> f64 {
        let f = |r: f64| (1.0 - r * r).powf((n as f64 - 4.0) / 2.0);
        let simpson = |a: f64, b: f64| {
            let steps = 20_000;
            let h = (b - a) / steps as f64;
            let mut acc = f(a) + f(b);
            for i in 1..steps {
                acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        simpson(-x, x) / simpson(-1.0, 1.0)
    }

    #[test]
    fn independent_random_signals_match_null_correlation_law() {
        // T > 0.7 iff |r| < 0.3; for 40 independent pairs that has probability ~0.940
        let exact = null_pearson_mass_below(0.3, 40);
        assert!((exact - 0.94).abs() < 1e-3, "{exact}");
        let p = TransferabilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 10_000;
        let mut above = 0;
        for _ in 0..trials {
            let a: Vec<f64> = (0..40).map(|_| rng.gen()).collect();
            let b: Vec<f64> = (0..40).map(|_| rng.gen()).collect();
            if transferability(&signal(&a), &signal(&b), 39, &p).unwrap() > 0.7 {
                above += 1;
            }
        }
        let freq = above as f64 / trials as f64;
        let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((freq - exact).abs() < 4.0 * sd, "{above}/{trials} vs {exact}");
    }

    #[test]
    fn signal_pipeline() {
        let b = Binning::Continuous {
            bins: 4,
            lo: 0.0,
            hi: 1.0,
        };
        // identical samples -> E = 0 -> C = 0
        let s = complexity_signal(&[vec![0.3; 8], vec![0.9; 8]], SignalSource::System, b, 0).unwrap();
        assert_eq!(s.points().collect::<Vec<_>>(), vec![(0, 0.0), (1, 0.0)]);
        // one sample per bin -> E = 1 -> C = 0
        let s = complexity_signal(&[vec![0.1, 0.3, 0.6, 0.8]], SignalSource::System, b, 3).unwrap();
        assert!(s.value_at(3).unwrap().abs() < 1e-12);
        assert!(complexity_signal(&[vec![]], SignalSource::System, b, 0).is_err());
    }

    /// Probability p < 1/2 at which the binary entropy equals 1/2, by bisection.
    fn half_entropy_probability() -> f64 {
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

    #[test]
    fn half_emergence_gives_full_complexity() {
        let p = half_entropy_probability();
        assert!((p - 0.110028).abs() < 1e-6);
        // 110028 ones among 10^6 samples
        let ones = (p * 1e6).round() as usize;
        let samples: Vec<f64> = (0..1_000_000).map(|i| if i < ones { 1.0 } else { 0.0 }).collect();
        let s = complexity_signal(&[samples], SignalSource::System, Binning::Discrete { lo: 0, hi: 1 }, 0).unwrap();
        assert!((s.value_at(0).unwrap() - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn complexity_is_symmetric(e in 0.0f64..=1.0) {
            prop_assert!((complexity(e).unwrap() - complexity(1.0 - e).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn emergence_is_permutation_invariant(mut counts in proptest::collection::vec(0u64..50, 2..30), seed in 0u64..1000) {
            counts[0] += 1;
            let e = emergence(&Histogram::from_counts(counts.clone()).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            use rand::seq::SliceRandom;
            counts.shuffle(&mut rng);
            let f = emergence(&Histogram::from_counts(counts).unwrap()).unwrap();
            prop_assert!((e - f).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&e));
        }

        #[test]
        fn transferability_bounded_and_affine_invariant(
            a in proptest::collection::vec(0.0f64..1.0, 6),
            b in proptest::collection::vec(0.0f64..1.0, 6),
            scale in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let p = TransferabilityParams { window: 6, bin_count: 2 };
            let t = transferability(&signal(&a), &signal(&b), 5, &p).unwrap();
            prop_assert!((0.0..=1.0).contains(&t));
            let a2: Vec<f64> = a.iter().map(|v| v * scale + shift).collect();
            let b2: Vec<f64> = b.iter().map(|v| v * scale + shift).collect();
            let t2 = transferability(&signal(&a2), &signal(&b2), 5, &p).unwrap();
            prop_assert!((t - t2).abs() < 1e-9);
        }
    }
}
