use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterResult {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squared distances at termination.
    pub wcss: f64,
    /// WCSS after each assignment step.
    pub wcss_history: Vec<f64>,
    pub iterations: usize,
    /// True when the assignment reached a fixpoint before `max_iters`.
    pub converged: bool,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = dist2(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Lloyd's k-means with farthest-point seeding. The first centre is drawn from
/// `seed`; each further centre is the point farthest from those already chosen.
/// A cluster that empties is re-seeded with the point farthest from its centre.
pub fn kmeans(rows: &[Vec<f64>], k: usize, seed: u64, max_iters: usize) -> Result<ClusterResult> {
    let n = rows.len();
    if k == 0 {
        return Err(invalid("stats", "k must be positive"));
    }
    if k > n {
        return Err(Error::TooShort {
            context: "stats",
            needed: k,
            got: n,
        });
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(invalid("stats", "rows differ in dimension"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = (rng.next_u64() % n as u64) as usize;
    let mut centroids = vec![rows[first].clone()];
    let mut closest: Vec<f64> = rows.iter().map(|r| dist2(r, &rows[first])).collect();
    while centroids.len() < k {
        let far = (0..n).fold(0, |best, i| if closest[i] > closest[best] { i } else { best });
        centroids.push(rows[far].clone());
        for (i, r) in rows.iter().enumerate() {
            closest[i] = closest[i].min(dist2(r, &rows[far]));
        }
    }

    let mut assignments = vec![usize::MAX; n];
    let mut wcss_history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        let mut changed = false;
        let mut wcss = 0.0;
        for (i, r) in rows.iter().enumerate() {
            let (j, d) = nearest(r, &centroids);
            wcss += d;
            if assignments[i] != j {
                assignments[i] = j;
                changed = true;
            }
        }
        wcss_history.push(wcss);
        if !changed {
            converged = true;
            break;
        }
        update_centroids(rows, &assignments, &mut centroids);
    }

    let wcss = rows
        .iter()
        .zip(&assignments)
        .map(|(r, &j)| dist2(r, &centroids[j]))
        .sum();
    Ok(ClusterResult {
        centroids,
        assignments,
        wcss,
        wcss_history,
        iterations,
        converged,
    })
}

fn update_centroids(rows: &[Vec<f64>], assignments: &[usize], centroids: &mut [Vec<f64>]) {
    let dim = rows[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (r, &j) in rows.iter().zip(assignments) {
        counts[j] += 1;
        for (s, x) in sums[j].iter_mut().zip(r) {
            *s += x;
        }
    }
    for (j, c) in centroids.iter_mut().enumerate() {
        if counts[j] > 0 {
            for (cx, s) in c.iter_mut().zip(&sums[j]) {
                *cx = s / counts[j] as f64;
            }
        }
    }
    for j in 0..centroids.len() {
        if counts[j] == 0 {
            let far = (0..rows.len())
                .filter(|&i| counts[assignments[i]] > 1)
                .map(|i| (i, dist2(&rows[i], &centroids[assignments[i]])))
                .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                    Some((_, bd)) if bd >= d => best,
                    _ => Some((i, d)),
                });
            if let Some((i, _)) = far {
                counts[assignments[i]] -= 1;
                counts[j] = 1;
                centroids[j] = rows[i].clone();
            }
        }
    }
}
