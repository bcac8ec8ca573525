use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;

use super::exact::{binomial, coalition_values};
use super::ShapError;
use crate::evaluation::Scorer;
use crate::seed::rng_from_seed;

/// Kernel weight of a coalition of size `s` (0 < s < f):
/// `(f − 1) / (C(f, s) · s · (f − s))`.
pub fn kernel_weight(f: usize, s: usize) -> f64 {
    (f - 1) as f64 / (binomial(f, s) as f64 * s as f64 * (f - s) as f64)
}

/// Coalitions with their regression weights. Every proper non-empty
/// coalition is enumerated when `n_samples` reaches their count;
/// otherwise sizes are drawn in proportion to their total kernel weight,
/// members uniformly, each draw paired with its complement.
fn coalitions(f: usize, n_samples: usize, seed: u64) -> BTreeMap<u64, f64> {
    let proper = (1u64 << f) - 2;
    let mut out = BTreeMap::new();
    if n_samples as u64 >= proper {
        for m in 1..=proper {
            out.insert(m, kernel_weight(f, m.count_ones() as usize));
        }
        return out;
    }
    let size_mass: Vec<f64> = (1..f).map(|s| (f - 1) as f64 / (s * (f - s)) as f64).collect();
    let total: f64 = size_mass.iter().sum();
    let mut rng = rng_from_seed(seed);
    let full = (1u64 << f) - 1;
    let pairs = n_samples / 2;
    for _ in 0..pairs {
        let mut u = rng.random::<f64>() * total;
        let mut s = f - 1;
        for (k, &m) in size_mass.iter().enumerate() {
            if u < m {
                s = k + 1;
                break;
            }
            u -= m;
        }
        let mask = sample(&mut rng, f, s).iter().fold(0u64, |acc, j| acc | 1 << j);
        for m in [mask, full ^ mask] {
            *out.entry(m).or_insert(0.0) += 1.0 / (2 * pairs) as f64;
        }
    }
    out
}

/// Kernel SHAP: weighted least squares on coalition indicators with the
/// attributions constrained to sum to `model(case) − model(background)`.
///
/// With `n_samples ≥ 2^|F| − 2` every coalition is used and the result
/// equals the exact Shapley values up to rounding.
pub fn kernel_shap<S: Scorer + ?Sized>(
    model: &S,
    case: ArrayView1<'_, f64>,
    background: ArrayView2<'_, f64>,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64), ShapError> {
    let f = case.len();
    let min = 2 * f + 2;
    if n_samples < min {
        return Err(ShapError::TooFewSamples { n: n_samples, min });
    }
    if f >= 63 {
        return Err(ShapError::TooManyFeatures { features: f, max: 62 });
    }
    if background.ncols() != f {
        return Err(ShapError::FeatureMismatch {
            expected: f,
            found: background.ncols(),
        });
    }
    let full = (1u64 << f) - 1;
    let ends = coalition_values(model, case, background, &[0, full]);
    let (base, fx) = (ends[0], ends[1]);
    if f == 1 {
        return Ok((vec![fx - base], base));
    }
    let weighted: Vec<(u64, f64)> = coalitions(f, n_samples, seed).into_iter().collect();
    let masks: Vec<u64> = weighted.iter().map(|&(m, _)| m).collect();
    let values = coalition_values(model, case, background, &masks);

    // eliminate the last attribution through the sum constraint
    let last = f - 1;
    let mut xtwx = DMatrix::<f64>::zeros(last, last);
    let mut xtwy = DVector::<f64>::zeros(last);
    let mut x = vec![0.0; last];
    for (&(mask, w), &v) in weighted.iter().zip(&values) {
        let z_last = (mask >> last & 1) as f64;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = (mask >> j & 1) as f64 - z_last;
        }
        let y = v - base - z_last * (fx - base);
        for a in 0..last {
            if x[a] == 0.0 {
                continue;
            }
            xtwy[a] += w * x[a] * y;
            for b in 0..last {
                xtwx[(a, b)] += w * x[a] * x[b];
            }
        }
    }
    let beta = xtwx
        .clone()
        .cholesky()
        .map(|c| c.solve(&xtwy))
        .or_else(|| xtwx.clone().lu().solve(&xtwy))
        .unwrap_or_else(|| xtwx.pseudo_inverse(1e-12).expect("pseudo-inverse exists") * &xtwy);
    let mut phi: Vec<f64> = beta.iter().copied().collect();
    phi.push(fx - base - phi.iter().sum::<f64>());
    Ok((phi, base))
}
