use crate::error::{Error, Result};
use crate::stats::{centroid, squared_distance};

/// Population variance of a set of vectors: mean squared distance to their centroid.
pub fn configuration_variance<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    let first = vectors.first().ok_or(Error::Empty("configuration_variance"))?.as_ref();
    let dim = first.len();
    if let Some(v) = vectors.iter().find(|v| v.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: v.as_ref().len(),
        });
    }
    if vectors.iter().all(|v| v.as_ref() == first) {
        return Ok(0.0);
    }
    let c = centroid(vectors.iter().map(AsRef::as_ref), dim);
    let n = vectors.len() as f64;
    Ok(vectors.iter().map(|v| squared_distance(v.as_ref(), &c)).sum::<f64>() / n)
}

/// `c_conf = 1 / (1 + v_S)`; exactly 1 iff all vectors are identical.
pub fn configuration_coherence<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    let v = configuration_variance(vectors)?;
    if v == 0.0 {
        // covers identical vectors as well as variances that underflow to zero
        let first = vectors[0].as_ref();
        if vectors.iter().all(|x| x.as_ref() == first) {
            return Ok(1.0);
        }
    }
    let c = 1.0 / (1.0 + v);
    // Distinct vectors with a variance below f64 resolution would round to 1.
    if c >= 1.0 {
        return Ok(1.0 - f64::EPSILON / 2.0);
    }
    Ok(c)
}
