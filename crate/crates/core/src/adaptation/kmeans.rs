//! Deterministic multi-start Lloyd k-means over Euclidean space.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stats::{distance, squared_distance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub max_iterations: usize,
    /// Farthest-point initialisations, each from a different seeded start point.
    pub farthest_point_starts: usize,
    /// Additional seeded k-means++ initialisations.
    pub plus_plus_starts: usize,
    /// When the distinct points admit at most this many k-subsets, every subset
    /// is also tried as an initialisation.
    pub exhaustive_subset_limit: usize,
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            farthest_point_starts: 8,
            plus_plus_starts: 4,
            exhaustive_subset_limit: 256,
            seed: 0x5A50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index of every input point, in input order.
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

impl Clustering {
    /// Sum over all points of the distance to their cluster centroid.
    pub fn total_distance(&self, points: &[&[f64]]) -> f64 {
        points
            .iter()
            .zip(&self.assignments)
            .map(|(p, &c)| distance(p, &self.centroids[c]))
            .sum()
    }
}

/// Distinct points with multiplicities, plus the map from input to distinct index.
pub(crate) struct Deduped {
    pub(crate) points: Vec<Vec<f64>>,
    pub(crate) weights: Vec<f64>,
    index_of: Vec<usize>,
}

pub(crate) fn dedup(points: &[&[f64]]) -> Deduped {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].partial_cmp(points[b]).expect("finite points"));
    let mut out = Deduped {
        points: Vec::new(),
        weights: Vec::new(),
        index_of: vec![0; points.len()],
    };
    for i in order {
        match out.points.last() {
            Some(last) if last.as_slice() == points[i] => *out.weights.last_mut().unwrap() += 1.0,
            _ => {
                out.points.push(points[i].to_vec());
                out.weights.push(1.0);
            }
        }
        out.index_of[i] = out.points.len() - 1;
    }
    out
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(p, c);
        // strict: ties go to the lowest cluster index
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn farthest_point_init(data: &Deduped, k: usize, start: usize) -> Vec<Vec<f64>> {
    let mut centroids = vec![data.points[start].clone()];
    let mut min_d: Vec<f64> = data.points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let mut pick = 0;
        for (i, &d) in min_d.iter().enumerate() {
            if d > min_d[pick] {
                pick = i;
            }
        }
        let c = data.points[pick].clone();
        for (m, p) in min_d.iter_mut().zip(&data.points) {
            *m = m.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn binomial_at_most(n: usize, k: usize, limit: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut c: usize = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
        if c > limit {
            return None;
        }
    }
    Some(c)
}

fn subset_inits(data: &Deduped, k: usize) -> Vec<Vec<Vec<f64>>> {
    let n = data.points.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| data.points[i].clone()).collect());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn plus_plus_init(data: &Deduped, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let total_w: f64 = data.weights.iter().sum();
    let pick_weighted = |scores: &[f64], total: f64, rng: &mut ChaCha8Rng| {
        let mut r = rng.gen::<f64>() * total;
        for (i, &s) in scores.iter().enumerate() {
            if r < s {
                return i;
            }
            r -= s;
        }
        scores.iter().rposition(|&s| s > 0.0).unwrap_or(0)
    };
    let first = pick_weighted(&data.weights, total_w, rng);
    let mut centroids = vec![data.points[first].clone()];
    let mut min_d: Vec<f64> = data.points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let scores: Vec<f64> = min_d.iter().zip(&data.weights).map(|(d, w)| d * w).collect();
        let total: f64 = scores.iter().sum();
        let pick = if total > 0.0 {
            pick_weighted(&scores, total, rng)
        } else {
            0
        };
        let c = data.points[pick].clone();
        for (m, p) in min_d.iter_mut().zip(&data.points) {
            *m = m.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Lloyd iterations from `centroids`; returns assignments of the distinct points
/// and the weighted inertia.
fn lloyd(data: &Deduped, centroids: &mut [Vec<f64>], max_iterations: usize) -> (Vec<usize>, f64) {
    let dim = data.points[0].len();
    let mut assignment: Vec<usize> = data.points.iter().map(|p| nearest(p, centroids).0).collect();
    for _ in 0..max_iterations {
        let mut sums = vec![vec![0.0; dim]; centroids.len()];
        let mut mass = vec![0.0; centroids.len()];
        for ((p, &w), &c) in data.points.iter().zip(&data.weights).zip(&assignment) {
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += w * x;
            }
            mass[c] += w;
        }
        for ((c, s), m) in centroids.iter_mut().zip(sums).zip(mass) {
            // an empty cluster keeps its previous centroid
            if m > 0.0 {
                *c = s.into_iter().map(|x| x / m).collect();
            }
        }
        let next: Vec<usize> = data.points.iter().map(|p| nearest(p, centroids).0).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    let inertia = data
        .points
        .iter()
        .zip(&data.weights)
        .zip(&assignment)
        .map(|((p, w), &c)| w * squared_distance(p, &centroids[c]))
        .sum();
    (assignment, inertia)
}

pub(crate) fn check_input(points: &[&[f64]], k: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty("kmeans points"));
    }
    if k == 0 || k > points.len() {
        return Err(Error::InvalidParameter(format!(
            "cluster count {k} must be in 1..={}",
            points.len()
        )));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: p.len(),
        });
    }
    Ok(())
}

/// Best clustering of the distinct points: centroids, assignment per distinct
/// point and weighted inertia. Ties in inertia go to the smaller total distance.
pub(crate) fn cluster_distinct(data: &Deduped, k: usize, config: &KMeansConfig) -> (Vec<Vec<f64>>, Vec<usize>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut starts: Vec<usize> = (0..data.points.len()).collect();
    starts.shuffle(&mut rng);
    starts.truncate(config.farthest_point_starts.max(1));

    let mut inits: Vec<Vec<Vec<f64>>> = starts.iter().map(|&s| farthest_point_init(data, k, s)).collect();
    if data.points.len() > k {
        for _ in 0..config.plus_plus_starts {
            inits.push(plus_plus_init(data, k, &mut rng));
        }
        if binomial_at_most(data.points.len(), k, config.exhaustive_subset_limit).is_some() {
            inits.extend(subset_inits(data, k));
        }
    }

    let mut best = None;
    // (inertia, total distance) of `best`
    let mut score = (f64::INFINITY, f64::INFINITY);
    for mut centroids in inits {
        let (assignment, inertia) = lloyd(data, &mut centroids, config.max_iterations);
        let spread = weighted_distance(data, &centroids, &assignment);
        let better = if best.is_some() && ties(inertia, score.0) {
            spread < score.1 && !ties(spread, score.1)
        } else {
            inertia < score.0
        };
        if better {
            score = (inertia, spread);
            best = Some((centroids, assignment));
        }
    }
    let (centroids, assignment) = best.expect("at least one initialisation");
    (centroids, assignment, score.0)
}

/// Equal up to rounding.
fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn weighted_distance(data: &Deduped, centroids: &[Vec<f64>], assignment: &[usize]) -> f64 {
    data.points
        .iter()
        .zip(&data.weights)
        .zip(assignment)
        .map(|((p, w), &c)| w * distance(p, &centroids[c]))
        .sum()
}

/// Clusters `points` into `k` groups, keeping the lowest-inertia result over all
/// configured initialisations. Among equal-inertia results the one with the
/// smallest summed point-to-centroid distance wins, then the earliest.
pub fn kmeans(points: &[&[f64]], k: usize, config: &KMeansConfig) -> Result<Clustering> {
    check_input(points, k)?;
    let data = dedup(points);
    let (centroids, unique_assignment, inertia) = cluster_distinct(&data, k, config);
    Ok(Clustering {
        assignments: data.index_of.iter().map(|&u| unique_assignment[u]).collect(),
        centroids,
        inertia,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_obvious_clusters() {
        let pts = [[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.0, 10.2]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let c = kmeans(&refs, 2, &KMeansConfig::default()).unwrap();
        assert_eq!(c.assignments[0], c.assignments[1]);
        assert_eq!(c.assignments[2], c.assignments[3]);
        assert_ne!(c.assignments[0], c.assignments[2]);
    }

    #[test]
    fn duplicates_share_a_cluster() {
        let pts = [[1.0], [1.0], [1.0], [4.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let c = kmeans(&refs, 3, &KMeansConfig::default()).unwrap();
        assert_eq!(c.inertia, 0.0);
        assert_eq!(c.total_distance(&refs), 0.0);
    }

    #[test]
    fn rejects_bad_k() {
        let pts = [[1.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        assert!(kmeans(&refs, 2, &KMeansConfig::default()).is_err());
        assert!(kmeans(&refs, 0, &KMeansConfig::default()).is_err());
        assert!(kmeans(&[], 1, &KMeansConfig::default()).is_err());
    }

    #[test]
    fn deterministic() {
        let pts: Vec<[f64; 2]> = (0..30).map(|i| [(i * 7 % 11) as f64, (i * 3 % 5) as f64]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let a = kmeans(&refs, 4, &KMeansConfig::default()).unwrap();
        let b = kmeans(&refs, 4, &KMeansConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
