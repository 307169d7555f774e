//! Configuration variability: average centroid distance of k-means clusterings
//! for `k = 1..=ceil(sqrt(|S|))`.

use super::kmeans::{check_input, cluster_distinct, dedup, kmeans, Deduped, KMeansConfig};
use crate::error::{Error, Result};
use crate::stats::distance;

/// `s_k`: summed point-to-centroid distances of a k-clustering, divided by `k`.
pub fn average_centroid_distance<V: AsRef<[f64]>>(vectors: &[V], k: usize) -> Result<f64> {
    average_centroid_distance_with(vectors, k, &KMeansConfig::default())
}

pub fn average_centroid_distance_with<V: AsRef<[f64]>>(vectors: &[V], k: usize, config: &KMeansConfig) -> Result<f64> {
    let refs: Vec<&[f64]> = vectors.iter().map(AsRef::as_ref).collect();
    let clustering = kmeans(&refs, k, config)?;
    Ok(clustering.total_distance(&refs) / k as f64)
}

/// `ceil(sqrt(n))` in exact integer arithmetic.
pub fn max_cluster_count(n: usize) -> usize {
    let mut k = (n as f64).sqrt() as usize;
    while k * k < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k
}

/// `c_v`: mean of `s_k` over `k = 1..=k_max`.
pub fn configuration_variability<V: AsRef<[f64]>>(vectors: &[V]) -> Result<f64> {
    configuration_variability_with(vectors, &KMeansConfig::default())
}

pub fn configuration_variability_with<V: AsRef<[f64]>>(vectors: &[V], config: &KMeansConfig) -> Result<f64> {
    if vectors.is_empty() {
        return Err(Error::Empty("configuration_variability"));
    }
    let refs: Vec<&[f64]> = vectors.iter().map(AsRef::as_ref).collect();
    let k_max = max_cluster_count(refs.len());
    check_input(&refs, k_max)?;
    let data = dedup(&refs);
    let mut total = 0.0;
    // with a cluster per distinct point every distance is zero
    for k in 1..=k_max.min(data.points.len() - 1) {
        total += distinct_total_distance(&data, k, config) / k as f64;
    }
    Ok(total / k_max as f64)
}

fn distinct_total_distance(data: &Deduped, k: usize, config: &KMeansConfig) -> f64 {
    let (centroids, assignment, _) = cluster_distinct(data, k, config);
    data.points
        .iter()
        .zip(&data.weights)
        .zip(&assignment)
        .map(|((p, w), &c)| w * distance(p, &centroids[c]))
        .sum()
}
