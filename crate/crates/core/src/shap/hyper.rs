use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;

use super::explain::{explain_rows, Background};
use super::{importance, rf_train, BackgroundMode, ExplainMode, ShapError, ShapMatrix, SurrogateForest};
use crate::campaign::LedgerRow;
use crate::dfnn::DfnnHyperparameters;
use crate::seed::{derive_seed, rng_from_seed};

pub const MIN_LEDGER_ROWS: usize = 50;

/// Surrogate input columns. `mstruct` is the total hidden node count.
pub const HYPER_FEATURES: [&str; 12] = [
    "mstruct",
    "af",
    "ki",
    "opt",
    "lr",
    "mom",
    "decay",
    "dropout",
    "epochs",
    "batch_size",
    "l1",
    "l2",
];

fn encode(hp: &DfnnHyperparameters) -> [f64; 12] {
    [
        hp.nodes.iter().map(|&n| f64::from(n)).sum(),
        hp.af.ordinal() as f64,
        hp.ki.ordinal() as f64,
        hp.opt.ordinal() as f64,
        hp.lr,
        hp.mom,
        hp.decay,
        hp.dropout,
        f64::from(hp.epochs),
        f64::from(hp.batch_size),
        hp.l1,
        hp.l2,
    ]
}

/// Numeric feature rows and `mean_test_auc` targets. Categorical axes
/// take their ordinal in declaration order.
pub fn encode_ledger(rows: &[LedgerRow]) -> (Array2<f64>, Vec<f64>) {
    let mut x = Array2::zeros((rows.len(), HYPER_FEATURES.len()));
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in encode(&r.setting.hp).into_iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    (x, rows.iter().map(|r| r.cv.mean_test_auc).collect())
}

#[derive(Debug, Clone)]
pub struct HyperShap {
    /// Attributions on the held-out rows; case ids index the input rows.
    pub matrix: ShapMatrix,
    pub importance: Vec<(String, f64)>,
    pub surrogate: SurrogateForest,
    /// Encoded held-out rows, aligned with `matrix`.
    pub holdout: Array2<f64>,
}

/// Which hyperparameters drive `mean_test_auc` across a ledger.
///
/// Encodes every row, fits a 100-tree forest on a seeded 80% of them,
/// builds a k-means background (k = feature count) from the same 80% and
/// explains the surrogate exactly on the remaining 20%.
pub fn hyperparameter_shap(rows: &[LedgerRow], seed: u64) -> Result<HyperShap, ShapError> {
    if rows.len() < MIN_LEDGER_ROWS {
        return Err(ShapError::LedgerTooSmall {
            rows: rows.len(),
            min: MIN_LEDGER_ROWS,
        });
    }
    let (x, y) = encode_ledger(rows);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(seed, &["holdout".into()])));
    let held = (rows.len() as f64 * 0.2).round() as usize;
    let (test_idx, train_idx) = order.split_at(held);
    let mut test_idx = test_idx.to_vec();
    test_idx.sort_unstable();

    let train_x = x.select(Axis(0), train_idx);
    let train_y: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
    let surrogate = rf_train(train_x.view(), &train_y, derive_seed(seed, &["forest".into()]))?;
    let background = Background::from_rows(train_x.view(), derive_seed(seed, &["background".into()]))?;
    let holdout = x.select(Axis(0), &test_idx);
    let matrix = explain_rows(
        &surrogate,
        HYPER_FEATURES.iter().map(|s| s.to_string()).collect(),
        test_idx,
        holdout.view(),
        background.rows(BackgroundMode::Composite).view(),
        ExplainMode::Exact,
        seed,
    )?;
    Ok(HyperShap {
        importance: importance(&matrix)?,
        matrix,
        surrogate,
        holdout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfnn::Initializer;
    use crate::fixtures::lr_ledger;

    #[test]
    fn initializer_codes() {
        let codes: Vec<usize> = Initializer::ALL.iter().map(|i| i.ordinal()).collect();
        assert_eq!(codes, vec![0, 1, 2, 3, 4]);
        assert_eq!(Initializer::HeUniform.ordinal(), 4);
        assert_eq!(Initializer::Constant.ordinal(), 0);
    }

    #[test]
    fn constant_scores_give_zero_importance() {
        let mut l = lr_ledger(60, 3);
        for r in &mut l.rows {
            r.cv.mean_test_auc = 0.7;
        }
        let h = hyperparameter_shap(&l.rows, 1).unwrap();
        assert!(h.importance.iter().all(|(_, v)| *v == 0.0), "{:?}", h.importance);
    }

    #[test]
    fn lr_drives_the_lr_ledger() {
        let l = lr_ledger(500, 11);
        let h = hyperparameter_shap(&l.rows, 2).unwrap();
        assert_eq!(h.importance[0].0, "lr");
        assert!(h.importance[1..].iter().all(|(_, v)| *v < 0.25 * h.importance[0].1));
    }

    #[test]
    fn small_ledger_rejected() {
        let l = lr_ledger(49, 3);
        assert!(matches!(hyperparameter_shap(&l.rows, 1), Err(ShapError::LedgerTooSmall { rows: 49, .. })));
    }
}
