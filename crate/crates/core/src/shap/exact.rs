use ndarray::{Array2, ArrayView1, ArrayView2};

use super::ShapError;
use crate::evaluation::Scorer;

pub const MAX_EXACT_FEATURES: usize = 20;

const CHUNK_ROWS: usize = 8192;

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Weight of a coalition of size `s` in the Shapley sum over `f` features:
/// `s! (f − s − 1)! / f!`.
pub fn shapley_weight(f: usize, s: usize) -> f64 {
    assert!(s < f);
    1.0 / (f as f64 * binomial(f - 1, s) as f64)
}

/// Value of each coalition mask: the case's values on the mask's features,
/// background values elsewhere, averaged over the background rows.
pub fn coalition_values<S: Scorer + ?Sized>(
    model: &S,
    case: ArrayView1<'_, f64>,
    background: ArrayView2<'_, f64>,
    masks: &[u64],
) -> Vec<f64> {
    let f = case.len();
    let b = background.nrows();
    let per_chunk = (CHUNK_ROWS / b).max(1);
    let mut values = Vec::with_capacity(masks.len());
    for chunk in masks.chunks(per_chunk) {
        let mut rows = Array2::<f64>::zeros((chunk.len() * b, f));
        for (m, &mask) in chunk.iter().enumerate() {
            for (k, bg) in background.outer_iter().enumerate() {
                let mut row = rows.row_mut(m * b + k);
                for j in 0..f {
                    row[j] = if mask >> j & 1 == 1 { case[j] } else { bg[j] };
                }
            }
        }
        let out = model.score(rows.view());
        values.extend(out.chunks(b).map(|c| c.iter().sum::<f64>() / b as f64));
    }
    values
}

/// Shapley values by enumerating all `2^|F|` coalitions.
///
/// Returns the attributions and the value of the empty coalition.
pub fn exact_shap<S: Scorer + ?Sized>(
    model: &S,
    case: ArrayView1<'_, f64>,
    background: ArrayView2<'_, f64>,
) -> Result<(Vec<f64>, f64), ShapError> {
    let f = case.len();
    if f > MAX_EXACT_FEATURES {
        return Err(ShapError::TooManyFeatures {
            features: f,
            max: MAX_EXACT_FEATURES,
        });
    }
    if background.ncols() != f {
        return Err(ShapError::FeatureMismatch {
            expected: f,
            found: background.ncols(),
        });
    }
    let masks: Vec<u64> = (0..1u64 << f).collect();
    let v = coalition_values(model, case, background, &masks);
    let weights: Vec<f64> = (0..f).map(|s| shapley_weight(f, s)).collect();
    let mut phi = vec![0.0; f];
    for (i, p) in phi.iter_mut().enumerate() {
        let bit = 1u64 << i;
        *p = masks
            .iter()
            .filter(|&&m| m & bit == 0)
            .map(|&m| weights[m.count_ones() as usize] * (v[(m | bit) as usize] - v[m as usize]))
            .sum();
    }
    Ok((phi, v[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shap::FnScorer;
    use ndarray::{array, Array1};

    #[test]
    fn two_feature_weights() {
        assert_eq!(shapley_weight(2, 0), 0.5);
        assert_eq!(shapley_weight(2, 1), 0.5);
        assert_eq!(shapley_weight(3, 1), 1.0 / 6.0);
    }

    #[test]
    fn weights_sum_to_one() {
        for f in 1..=10 {
            let total: f64 = (0..f).map(|s| binomial(f - 1, s) as f64 * shapley_weight(f, s)).sum();
            assert!((total - 1.0).abs() < 1e-12, "f = {f}: {total}");
        }
    }

    #[test]
    fn interaction_splits_evenly() {
        let model = FnScorer(|x: &[f64]| x[0] * x[1]);
        let (phi, base) = exact_shap(&model, array![2.0, 3.0].view(), array![[0.0, 0.0]].view()).unwrap();
        assert_eq!(base, 0.0);
        assert_eq!(phi, vec![3.0, 3.0]);
    }

    #[test]
    fn centroid_background_averages_outputs() {
        let model = FnScorer(|x: &[f64]| x[0].max(x[1]));
        let bg = array![[0.0, 0.0], [4.0, 4.0]];
        let case = Array1::from(vec![2.0, 1.0]);
        let (phi, base) = exact_shap(&model, case.view(), bg.view()).unwrap();
        assert_eq!(base, 2.0);
        assert!((base + phi.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_many_features() {
        let model = FnScorer(|_: &[f64]| 0.0);
        let case = Array1::zeros(21);
        let bg = Array2::zeros((1, 21));
        assert!(matches!(exact_shap(&model, case.view(), bg.view()), Err(ShapError::TooManyFeatures { .. })));
    }
}
