#![no_main]

use libfuzzer_sys::fuzz_target;
use saso_metrics::transfer::{complexity, emergence};
use saso_metrics::Histogram;

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let bins = 1 + data[0] as usize % 64;
    let values: Vec<f64> = data[1..]
        .chunks(2)
        .map(|c| f64::from(i16::from_le_bytes([c[0], *c.get(1).unwrap_or(&0)])) / 256.0)
        .collect();
    let Ok(h) = Histogram::from_values(&values, bins, -4.0, 4.0) else {
        return;
    };
    assert_eq!(h.counts().iter().sum::<u64>(), values.len() as u64);
    if let Ok(e) = emergence(&h) {
        assert!((0.0..=1.0).contains(&e));
        let c = complexity(e).unwrap();
        assert!((0.0..=1.0).contains(&c));
    }
});
