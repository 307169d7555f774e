//! Brute-force reference computations used to cross-check the fast paths.

/// Exact `s_k` of the partition of `points` into `k` non-empty clusters with the
/// smallest within-cluster sum of squares, found by enumerating every partition.
/// Among partitions tied on that sum the smallest total distance counts.
/// Only meant for a handful of points.
pub fn optimal_average_centroid_distance<V: AsRef<[f64]>>(points: &[V], k: usize) -> f64 {
    let n = points.len();
    assert!(k >= 1 && k <= n && n <= 10, "exhaustive oracle is for tiny inputs");
    let mut labels = vec![0usize; n];
    let mut best = (f64::INFINITY, f64::INFINITY);
    enumerate(points, k, 0, 0, &mut labels, &mut best);
    best.1 / k as f64
}

/// Restricted-growth enumeration of set partitions into exactly `k` blocks.
fn enumerate<V: AsRef<[f64]>>(
    points: &[V],
    k: usize,
    i: usize,
    used: usize,
    labels: &mut Vec<usize>,
    best: &mut (f64, f64),
) {
    let n = points.len();
    if n - i < k - used {
        return;
    }
    if i == n {
        let (sse, dist) = score(points, labels, k);
        let tol = 1e-9 * sse.max(best.0).max(1.0);
        if sse < best.0 - tol || ((sse - best.0).abs() <= tol && dist < best.1) {
            *best = (sse, dist);
        }
        return;
    }
    for label in 0..=used.min(k - 1) {
        labels[i] = label;
        enumerate(points, k, i + 1, used.max(label + 1), labels, best);
    }
}

fn score<V: AsRef<[f64]>>(points: &[V], labels: &[usize], k: usize) -> (f64, f64) {
    let dim = points[0].as_ref().len();
    let mut sse = 0.0;
    let mut dist = 0.0;
    for c in 0..k {
        let members: Vec<&[f64]> = points
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(p, _)| p.as_ref())
            .collect();
        let centre: Vec<f64> = (0..dim)
            .map(|d| members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64)
            .collect();
        for m in members {
            let sq: f64 = m.iter().zip(&centre).map(|(a, b)| (a - b).powi(2)).sum();
            sse += sq;
            dist += sq.sqrt();
        }
    }
    (sse, dist)
}

/// Game of Life update by explicit neighbour counting with signed offsets.
pub fn life_step_oracle(cells: &[u8], width: usize, height: usize) -> Vec<u8> {
    let (w, h) = (width as i64, height as i64);
    let at = |x: i64, y: i64| cells[(y.rem_euclid(h) * w + x.rem_euclid(w)) as usize];
    let mut next = vec![0u8; cells.len()];
    for y in 0..h {
        for x in 0..w {
            let mut count = 0;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if (dx, dy) != (0, 0) && at(x + dx, y + dy) == 1 {
                        count += 1;
                    }
                }
            }
            let alive = at(x, y) == 1;
            let survives = alive && (count == 2 || count == 3);
            let born = !alive && count == 3;
            next[(y * w + x) as usize] = u8::from(survives || born);
        }
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_hand_cases() {
        // {0, 2}: one cluster -> distances 1 + 1
        assert_eq!(optimal_average_centroid_distance(&[[0.0], [2.0]], 1), 2.0);
        assert_eq!(optimal_average_centroid_distance(&[[0.0], [2.0]], 2), 0.0);
        // {0, 1, 10}, k = 2: best split {0,1} {10} -> (0.5 + 0.5) / 2
        assert_eq!(optimal_average_centroid_distance(&[[0.0], [1.0], [10.0]], 2), 0.5);
    }

    #[test]
    fn blinker() {
        let mut cells = vec![0u8; 25];
        for x in 1..4 {
            cells[2 * 5 + x] = 1;
        }
        let next = life_step_oracle(&cells, 5, 5);
        let alive: Vec<usize> = (0..25).filter(|&i| next[i] == 1).collect();
        assert_eq!(alive, vec![7, 12, 17]);
    }
}
