use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use super::ShapError;
use crate::seed::rng_from_seed;

pub const MAX_ITERATIONS: usize = 300;
pub const SHIFT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub centroids: Array2<f64>,
    /// Cluster of each input row.
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squares after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(rows: ArrayView2<'_, f64>, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = rows.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(rows.row(i), rows.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 {
                    pick = Some(i);
                    if target < d {
                        break;
                    }
                    target -= d;
                }
            }
            pick.expect("some row has positive distance")
        } else {
            // every row coincides with a chosen centroid
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(rows.row(i), rows.row(next)));
        }
    }
    chosen
}

fn assign(rows: ArrayView2<'_, f64>, centroids: &Array2<f64>) -> (Vec<usize>, f64) {
    let mut total = 0.0;
    let labels = rows
        .outer_iter()
        .map(|r| {
            let (best, d) = centroids
                .outer_iter()
                .enumerate()
                .map(|(c, m)| (c, sq_dist(r, m)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            total += d;
            best
        })
        .collect();
    (labels, total)
}

/// Lloyd's algorithm from k-means++ seeds. A cluster that loses all its
/// rows keeps its previous centroid.
pub fn kmeans(rows: ArrayView2<'_, f64>, k: usize, seed: u64) -> Result<KMeans, ShapError> {
    let n = rows.nrows();
    if k == 0 || k > n {
        return Err(ShapError::KTooLarge { k, rows: n });
    }
    let mut rng = rng_from_seed(seed);
    let seeds = plus_plus(rows, k, &mut rng);
    let mut centroids = rows.select(Axis(0), &seeds);
    let mut objective = Vec::new();
    let mut iterations = 0;
    let assignment = loop {
        let (labels, wcss) = assign(rows, &centroids);
        objective.push(wcss);
        if iterations == MAX_ITERATIONS {
            break labels;
        }
        iterations += 1;
        let mut sums = Array2::<f64>::zeros(centroids.raw_dim());
        let mut counts = vec![0usize; k];
        for (r, &c) in rows.outer_iter().zip(&labels) {
            let mut s = sums.row_mut(c);
            s += &r;
            counts[c] += 1;
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mean: Array1<f64> = sums.row(c).mapv(|v| v / counts[c] as f64);
            shift = shift.max(sq_dist(mean.view(), centroids.row(c)).sqrt());
            centroids.row_mut(c).assign(&mean);
        }
        if shift < SHIFT_TOLERANCE {
            let (labels, wcss) = assign(rows, &centroids);
            objective.push(wcss);
            break labels;
        }
    };
    Ok(KMeans {
        centroids,
        assignment,
        objective,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_blobs;
    use ndarray::array;

    #[test]
    fn k_equal_to_rows_returns_the_rows() {
        let rows = array![[0.0, 1.0], [5.0, 5.0], [-3.0, 2.0], [9.0, -1.0]];
        let km = kmeans(rows.view(), 4, 3).unwrap();
        let mut got: Vec<Vec<f64>> = km.centroids.outer_iter().map(|r| r.to_vec()).collect();
        let mut want: Vec<Vec<f64>> = rows.outer_iter().map(|r| r.to_vec()).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn blobs_are_recovered() {
        let blobs = two_blobs(400, 9);
        let km = kmeans(blobs.rows.view(), 2, 1).unwrap();
        for m in blobs.means {
            let close = km
                .centroids
                .outer_iter()
                .any(|c| (c[0] - m[0]).abs() < 0.1 && (c[1] - m[1]).abs() < 0.1);
            assert!(close, "no centroid near {m:?}: {:?}", km.centroids);
        }
    }

    #[test]
    fn objective_never_increases() {
        let blobs = two_blobs(300, 2);
        for k in 1..6 {
            let km = kmeans(blobs.rows.view(), k, k as u64).unwrap();
            assert!(km.objective.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{:?}", km.objective);
        }
    }

    #[test]
    fn k_out_of_range() {
        let rows = array![[0.0], [1.0]];
        assert!(matches!(kmeans(rows.view(), 3, 0), Err(ShapError::KTooLarge { .. })));
        assert!(matches!(kmeans(rows.view(), 0, 0), Err(ShapError::KTooLarge { .. })));
    }

    #[test]
    fn same_seed_same_centroids() {
        let blobs = two_blobs(100, 4);
        assert_eq!(kmeans(blobs.rows.view(), 3, 8).unwrap(), kmeans(blobs.rows.view(), 3, 8).unwrap());
    }
}
