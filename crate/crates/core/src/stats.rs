//! Small descriptive statistics shared by the metrics.

use crate::error::{Error, Result};

/// Mean and population variance (divisor `N`).
pub fn mean_and_variance(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Empty("mean_and_variance"));
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok((first, 0.0));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var))
}

/// Sample standard deviation (divisor `N - 1`); zero for fewer than two values.
pub fn sample_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n < 2 {
        return 0.0;
    }
    let mean = sum / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Component-wise mean of equally sized vectors.
pub fn centroid<'a>(vectors: impl IntoIterator<Item = &'a [f64]>, dimension: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dimension];
    let mut n = 0usize;
    for v in vectors {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
        n += 1;
    }
    if n > 0 {
        for a in acc.iter_mut() {
            *a /= n as f64;
        }
    }
    acc
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_input() {
        assert_eq!(mean_and_variance(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn two_points() {
        // ((0-1)^2 + (2-1)^2) / 2
        assert_eq!(mean_and_variance(&[0.0, 2.0]).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn singleton() {
        assert_eq!(mean_and_variance(&[3.0]).unwrap(), (3.0, 0.0));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(mean_and_variance(&[]).is_err());
    }

    #[test]
    fn sample_std_uses_bessel() {
        let s = sample_std([0.0, 2.0].into_iter());
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn constant_sequences_have_zero_variance(v in -1e6f64..1e6, n in 1usize..100) {
            let (_, var) = mean_and_variance(&vec![v; n]).unwrap();
            prop_assert_eq!(var, 0.0);
        }
    }
}
