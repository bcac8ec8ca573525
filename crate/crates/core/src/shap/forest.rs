use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::ShapError;
use crate::evaluation::Scorer;
use crate::seed::{derive_seed, rng_from_seed};

pub const TREE_COUNT: usize = 100;
pub const MIN_SPLIT_SIZE: usize = 5;
pub const MIN_FOREST_ROWS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART regression tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

/// Mean that returns the common value exactly when all inputs agree.
fn stable_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut it = values;
    let first = it.next().expect("non-empty");
    let (mut acc, mut n) = (0.0, 1usize);
    for v in it {
        acc += v - first;
        n += 1;
    }
    first + acc / n as f64
}

struct Grower<'a, R: Rng> {
    rows: ArrayView2<'a, f64>,
    targets: &'a [f64],
    mtry: usize,
    rng: R,
    nodes: Vec<Node>,
}

impl<R: Rng> Grower<'_, R> {
    fn grow(&mut self, idx: &mut [usize]) -> usize {
        let at = self.nodes.len();
        let first = self.targets[idx[0]];
        let pure = idx.iter().all(|&i| self.targets[i] == first);
        if idx.len() < MIN_SPLIT_SIZE || pure {
            self.nodes.push(Node::Leaf(stable_mean(idx.iter().map(|&i| self.targets[i]))));
            return at;
        }
        let Some((feature, threshold)) = self.best_split(idx) else {
            self.nodes.push(Node::Leaf(stable_mean(idx.iter().map(|&i| self.targets[i]))));
            return at;
        };
        self.nodes.push(Node::Leaf(0.0));
        let mut cut = 0;
        for k in 0..idx.len() {
            if self.rows[[idx[k], feature]] <= threshold {
                idx.swap(k, cut);
                cut += 1;
            }
        }
        let (l, r) = idx.split_at_mut(cut);
        let left = self.grow(l);
        let right = self.grow(r);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }

    /// Largest drop in squared error over `mtry` random features, at
    /// midpoints between distinct sorted values.
    fn best_split(&mut self, idx: &[usize]) -> Option<(usize, f64)> {
        let p = self.rows.ncols();
        let n = idx.len() as f64;
        let total: f64 = idx.iter().map(|&i| self.targets[i]).sum();
        let mut best: Option<(f64, usize, f64)> = None;
        let features = sample(&mut self.rng, p, self.mtry).into_vec();
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
        for feature in features {
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.rows[[i, feature]], self.targets[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_sum = 0.0;
            for k in 0..pairs.len() - 1 {
                left_sum += pairs[k].1;
                if pairs[k].0 == pairs[k + 1].0 {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let right_sum = total - left_sum;
                // reduction in SSE up to a constant
                let gain = left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / n;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, feature, (pairs[k].0 + pairs[k + 1].0) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

impl RegressionTree {
    fn fit(rows: ArrayView2<'_, f64>, targets: &[f64], seed: u64) -> Self {
        let n = rows.nrows();
        let mut rng = rng_from_seed(seed);
        let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let mut g = Grower {
            rows,
            targets,
            mtry: rows.ncols().div_ceil(3).max(1),
            rng,
            nodes: Vec::new(),
        };
        g.grow(&mut idx);
        RegressionTree { nodes: g.nodes }
    }

    pub fn predict(&self, row: ArrayView1<'_, f64>) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Bagged regression trees.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateForest {
    pub trees: Vec<RegressionTree>,
    pub seeds: Vec<u64>,
}

impl SurrogateForest {
    pub fn predict(&self, row: ArrayView1<'_, f64>) -> f64 {
        stable_mean(self.trees.iter().map(|t| t.predict(row)))
    }
}

impl Scorer for SurrogateForest {
    fn score(&self, rows: ArrayView2<'_, f64>) -> Vec<f64> {
        rows.outer_iter().map(|r| self.predict(r)).collect()
    }
}

/// 100 trees, each on a bootstrap resample with `⌈p/3⌉` candidate
/// features per node, grown until nodes hold fewer than five rows or a
/// single target value.
pub fn rf_train(rows: ArrayView2<'_, f64>, targets: &[f64], seed: u64) -> Result<SurrogateForest, ShapError> {
    if rows.nrows() < MIN_FOREST_ROWS {
        return Err(ShapError::TooFewRows {
            rows: rows.nrows(),
            min: MIN_FOREST_ROWS,
        });
    }
    if targets.len() != rows.nrows() {
        return Err(ShapError::FeatureMismatch {
            expected: rows.nrows(),
            found: targets.len(),
        });
    }
    let seeds: Vec<u64> = (0..TREE_COUNT as u64).map(|t| derive_seed(seed, &["tree".into(), t.into()])).collect();
    let trees = seeds.par_iter().map(|&s| RegressionTree::fit(rows, targets, s)).collect();
    Ok(SurrogateForest { trees, seeds })
}
