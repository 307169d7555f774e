#![no_main]

use libfuzzer_sys::fuzz_target;
use saso_metrics::adaptation::{configuration_coherence, configuration_variability};

// first byte picks the dimension, the rest are coordinates
fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else {
        return;
    };
    let dim = 1 + d as usize % 3;
    let vectors: Vec<Vec<f64>> = rest
        .chunks_exact(dim)
        .take(36)
        .map(|c| c.iter().map(|&b| f64::from(b as i8) / 8.0).collect())
        .collect();
    if vectors.is_empty() {
        return;
    }
    let c = configuration_coherence(&vectors).unwrap();
    assert!(c > 0.0 && c <= 1.0);
    let v = configuration_variability(&vectors).unwrap();
    assert!(v.is_finite() && v >= 0.0);
    if vectors.iter().all(|x| *x == vectors[0]) {
        assert_eq!((c, v), (1.0, 0.0));
    }
});
