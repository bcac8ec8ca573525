use ndarray::{Array1, Array2, ArrayView2, Axis};
use rayon::prelude::*;

use super::{exact_shap, kernel_shap, kmeans, ShapError, ShapMatrix};
use crate::dataset::{SplitPlan, TabularDataset};
use crate::evaluation::Scorer;
use crate::seed::derive_seed;

/// Largest feature count explained exactly under [`ExplainMode::Auto`].
pub const EXACT_CROSSOVER: usize = 12;
/// Coalition samples per case in kernel mode under [`ExplainMode::Auto`].
pub const KERNEL_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExplainMode {
    /// Exact up to [`EXACT_CROSSOVER`] features, kernel beyond.
    #[default]
    Auto,
    Exact,
    Kernel { n_samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackgroundMode {
    /// One row: the per-feature mean of the centroids.
    #[default]
    Composite,
    /// Average the model over every centroid.
    Centroids,
}

/// k-means summary of the reference rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    pub centroids: Array2<f64>,
    pub composite_row: Array1<f64>,
}

impl Background {
    /// `k` centroids of `rows`, `k` = column count (capped at the row count).
    pub fn from_rows(rows: ArrayView2<'_, f64>, seed: u64) -> Result<Self, ShapError> {
        let k = rows.ncols().min(rows.nrows());
        let centroids = kmeans(rows, k, seed)?.centroids;
        let composite_row = centroids.mean_axis(Axis(0)).expect("at least one centroid");
        Ok(Background {
            centroids,
            composite_row,
        })
    }

    pub fn rows(&self, mode: BackgroundMode) -> Array2<f64> {
        match mode {
            BackgroundMode::Composite => self.composite_row.clone().insert_axis(Axis(0)),
            BackgroundMode::Centroids => self.centroids.clone(),
        }
    }
}

/// Attributions for each row of `cases` against `background`, computed in
/// parallel and collected in row order.
pub(crate) fn explain_rows<S: Scorer + Sync + ?Sized>(
    model: &S,
    feature_names: Vec<String>,
    case_ids: Vec<usize>,
    cases: ArrayView2<'_, f64>,
    background: ArrayView2<'_, f64>,
    mode: ExplainMode,
    seed: u64,
) -> Result<ShapMatrix, ShapError> {
    let f = cases.ncols();
    if feature_names.len() != f {
        return Err(ShapError::FeatureMismatch {
            expected: feature_names.len(),
            found: f,
        });
    }
    let kernel_n = match mode {
        ExplainMode::Exact => None,
        ExplainMode::Auto if f <= EXACT_CROSSOVER => None,
        ExplainMode::Auto => Some(KERNEL_SAMPLES),
        ExplainMode::Kernel { n_samples } => Some(n_samples),
    };
    let results: Vec<(Vec<f64>, f64)> = (0..cases.nrows())
        .into_par_iter()
        .map(|i| match kernel_n {
            None => exact_shap(model, cases.row(i), background),
            Some(n) => kernel_shap(
                model,
                cases.row(i),
                background,
                n,
                derive_seed(seed, &["kernel".into(), (case_ids[i] as u64).into()]),
            ),
        })
        .collect::<Result<_, _>>()?;
    let base_value = match results.first() {
        Some(r) => r.1,
        None => return Err(ShapError::NoCases),
    };
    let mut values = Array2::zeros((cases.nrows(), f));
    for (i, (phi, _)) in results.iter().enumerate() {
        values.row_mut(i).assign(&Array1::from(phi.clone()));
    }
    Ok(ShapMatrix {
        outputs: model.score(cases),
        case_ids,
        feature_names,
        values,
        base_value,
    })
}

/// Explain a trained model on the validation rows, with a background
/// drawn from the train-test rows.
pub fn explain_model<S: Scorer + Sync + ?Sized>(
    model: &S,
    data: &TabularDataset,
    plan: &SplitPlan,
    mode: ExplainMode,
    background_mode: BackgroundMode,
    seed: u64,
) -> Result<ShapMatrix, ShapError> {
    if plan.validation_indices.is_empty() {
        return Err(ShapError::NoCases);
    }
    let (train, _) = data.subset(&plan.train_test_indices);
    let background = Background::from_rows(train.view(), derive_seed(seed, &["background".into()]))?;
    let (cases, _) = data.subset(&plan.validation_indices);
    explain_rows(
        model,
        data.schema.feature_names(),
        plan.validation_indices.clone(),
        cases.view(),
        background.rows(background_mode).view(),
        mode,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_blobs;

    #[test]
    fn composite_row_is_centroid_mean() {
        let blobs = two_blobs(100, 3);
        let bg = Background::from_rows(blobs.rows.view(), 1).unwrap();
        assert_eq!(bg.centroids.nrows(), 2);
        for j in 0..2 {
            let m = (bg.centroids[[0, j]] + bg.centroids[[1, j]]) / 2.0;
            assert!((bg.composite_row[j] - m).abs() < 1e-12);
        }
    }
}
