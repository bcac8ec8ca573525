//! ROC AUC, five-fold cross-validation and the final refit.

use std::time::Instant;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetError, SplitPlan, TabularDataset, FOLDS};
use crate::dfnn::{self, DfnnError, DfnnHyperparameters, DfnnModel};
use crate::searchspace::SettingId;
use crate::seed::derive_seed;

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("AUC needs both classes ({positives} positive, {negatives} negative)")]
    DegenerateLabels { positives: usize, negatives: usize },
    #[error("{scores} scores for {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Dfnn(#[from] DfnnError),
}

/// Cross-validated performance of one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub setting_id: SettingId,
    pub fold_aucs: [f64; 5],
    pub mean_test_auc: f64,
    /// Wall time of the whole five-fold loop.
    pub train_seconds: f64,
    pub diverged: bool,
}

/// Area under the ROC curve with half credit for ties.
///
/// Computed from mid-ranks in doubled integer form, so the result equals
/// `(2·wins + ties) / (2·P·N)` bit for bit.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64, EvaluationError> {
    if scores.len() != labels.len() {
        return Err(EvaluationError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvaluationError::DegenerateLabels { positives, negatives });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum over positives of doubled 1-based mid-ranks
    let mut rank_sum2: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]].total_cmp(&scores[order[start]]).is_eq() {
            end += 1;
        }
        let doubled_mid = (start + 1 + end) as u128;
        let tied_pos = order[start..end].iter().filter(|&&i| labels[i] == 1).count() as u128;
        rank_sum2 += doubled_mid * tied_pos;
        start = end;
    }
    let p = positives as u128;
    let u2 = rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * negatives as u128) as f64)
}

/// Scores rows with a trained model.
pub trait Scorer {
    fn score(&self, rows: ArrayView2<'_, f64>) -> Vec<f64>;
}

/// Fits a scorer to training rows.
pub trait Learner: Sync {
    type Model: Scorer;

    /// Returns the fitted model and whether training diverged.
    fn fit(
        &self,
        hp: &DfnnHyperparameters,
        rows: ArrayView2<'_, f64>,
        labels: &[u8],
        seed: u64,
    ) -> Result<(Self::Model, bool), EvaluationError>;
}

impl Scorer for DfnnModel {
    fn score(&self, rows: ArrayView2<'_, f64>) -> Vec<f64> {
        self.predict_risk(rows).expect("rows match the model input width")
    }
}

/// The network learner. A diverged run still yields its last finite
/// weights.
#[derive(Debug, Clone, Copy, Default)]
pub struct DfnnLearner;

impl Learner for DfnnLearner {
    type Model = DfnnModel;

    fn fit(
        &self,
        hp: &DfnnHyperparameters,
        rows: ArrayView2<'_, f64>,
        labels: &[u8],
        seed: u64,
    ) -> Result<(DfnnModel, bool), EvaluationError> {
        match dfnn::train(hp, rows, labels, seed) {
            Ok((model, _)) => Ok((model, false)),
            Err(DfnnError::NonFiniteLoss { model, .. }) => Ok((*model, true)),
            Err(e) => Err(e.into()),
        }
    }
}

/// AUC of a fold, or 0.5 when the fold holds a single class.
fn fold_auc(scores: &[f64], labels: &[u8]) -> Result<f64, EvaluationError> {
    match auc(scores, labels) {
        Err(EvaluationError::DegenerateLabels { .. }) => Ok(0.5),
        other => other,
    }
}

pub fn fold_seed(seed: u64, setting_id: &SettingId, fold: u8) -> u64 {
    derive_seed(seed, &["cv".into(), setting_id.to_string().as_str().into(), u64::from(fold).into()])
}

/// Five-fold cross-validation of one setting with a custom learner.
pub fn run_cv_with<L: Learner>(
    learner: &L,
    hp: &DfnnHyperparameters,
    data: &TabularDataset,
    plan: &SplitPlan,
    setting_id: &SettingId,
    seed: u64,
) -> Result<CvResult, EvaluationError> {
    plan.check(data)?;
    let started = Instant::now();
    let mut fold_aucs = [0.0; 5];
    let mut diverged = false;
    for fold in 1..=FOLDS {
        let (train_rows, train_labels) = data.subset(&plan.training_indices(fold));
        let (test_rows, test_labels) = data.subset(&plan.fold_indices(fold));
        let (model, fold_diverged) = learner.fit(
            hp,
            train_rows.view(),
            &train_labels,
            fold_seed(seed, setting_id, fold),
        )?;
        diverged |= fold_diverged;
        fold_aucs[fold as usize - 1] = fold_auc(&model.score(test_rows.view()), &test_labels)?;
    }
    Ok(CvResult {
        setting_id: setting_id.clone(),
        fold_aucs,
        mean_test_auc: fold_aucs.iter().sum::<f64>() / f64::from(FOLDS),
        train_seconds: started.elapsed().as_secs_f64(),
        diverged,
    })
}

/// Five-fold cross-validation of one setting with the network learner.
pub fn run_cv(
    hp: &DfnnHyperparameters,
    data: &TabularDataset,
    plan: &SplitPlan,
    setting_id: &SettingId,
    seed: u64,
) -> Result<CvResult, EvaluationError> {
    run_cv_with(&DfnnLearner, hp, data, plan, setting_id, seed)
}

/// Train one model on every train-test row.
pub fn refit_top(
    hp: &DfnnHyperparameters,
    data: &TabularDataset,
    plan: &SplitPlan,
    seed: u64,
) -> Result<DfnnModel, EvaluationError> {
    plan.check(data)?;
    let (rows, labels) = data.subset(&plan.train_test_indices);
    let (model, _) = dfnn::train(hp, rows.view(), &labels, derive_seed(seed, &["refit".into()]))?;
    Ok(model)
}

/// AUC of a scorer on the held-out validation rows.
pub fn validation_auc<S: Scorer>(model: &S, data: &TabularDataset, plan: &SplitPlan) -> Result<f64, EvaluationError> {
    let (rows, labels) = data.subset(&plan.validation_indices);
    auc(&model.score(rows.view()), &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{split, synth_gen, SynthSpec};
    use crate::fixtures::{base_hyperparameters, label_echo_dataset, ConstantLearner, LabelEchoLearner};

    fn pair_count(scores: &[f64], labels: &[u8]) -> f64 {
        let mut twice = 0u64;
        let (mut p, mut n) = (0u64, 0u64);
        for (i, &yi) in labels.iter().enumerate() {
            if yi == 1 {
                p += 1;
            } else {
                n += 1;
            }
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    twice += match scores[i].partial_cmp(&scores[j]).unwrap() {
                        std::cmp::Ordering::Greater => 2,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Less => 0,
                    };
                }
            }
        }
        twice as f64 / (2 * p * n) as f64
    }

    #[test]
    fn perfect_and_tied_scores() {
        assert_eq!(auc(&[0.9, 0.8, 0.1, 0.2], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(auc(&[0.3; 6], &[1, 0, 1, 0, 0, 1]).unwrap(), 0.5);
        assert_eq!(auc(&[0.1, 0.2, 0.9, 0.8], &[1, 1, 0, 0]).unwrap(), 0.0);
        assert!(matches!(auc(&[0.1, 0.2], &[1, 1]), Err(EvaluationError::DegenerateLabels { .. })));
    }

    #[test]
    fn matches_pair_counting_on_a_tied_instance() {
        let scores = [0.5, 0.2, 0.5, 0.7, 0.2, 0.9, 0.5, 0.1];
        let labels = [1, 0, 0, 1, 1, 0, 1, 0];
        assert_eq!(auc(&scores, &labels).unwrap(), pair_count(&scores, &labels));
    }

    #[test]
    fn stub_learners_give_known_fold_aucs() {
        let data = label_echo_dataset(200, 40);
        let plan = split(&data, 5).unwrap();
        let hp = base_hyperparameters();
        let echo = run_cv_with(&LabelEchoLearner, &hp, &data, &plan, &SettingId::from(0), 1).unwrap();
        assert_eq!(echo.fold_aucs, [1.0; 5]);
        assert_eq!(echo.mean_test_auc, 1.0);
        let flat = run_cv_with(&ConstantLearner(0.3), &hp, &data, &plan, &SettingId::from(0), 1).unwrap();
        assert_eq!(flat.mean_test_auc, 0.5);
    }

    #[test]
    fn cross_validation_is_reproducible_and_refit_separates() {
        let data = synth_gen(
            &SynthSpec {
                case_count: 300,
                predictor_count: 6,
                signal_strength: 1.0,
            },
            11,
        )
        .unwrap();
        let plan = split(&data, 11).unwrap();
        let hp = base_hyperparameters();
        let a = run_cv(&hp, &data, &plan, &SettingId::from(4), 2).unwrap();
        let b = run_cv(&hp, &data, &plan, &SettingId::from(4), 2).unwrap();
        assert_eq!(a.fold_aucs, b.fold_aucs);
        assert!((a.mean_test_auc - a.fold_aucs.iter().sum::<f64>() / 5.0).abs() < 1e-12);
        let m1 = refit_top(&hp, &data, &plan, 2).unwrap();
        let m2 = refit_top(&hp, &data, &plan, 2).unwrap();
        assert_eq!(m1.to_json(), m2.to_json());
        assert!(validation_auc(&m1, &data, &plan).unwrap() > 0.7);
    }
}
