//! Deterministic fixtures with analytically known properties.

use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::campaign::{CampaignLedger, LedgerRow};
use crate::dataset::{DatasetSchema, FeatureSpec, TabularDataset};
use crate::dfnn::{Activation, DfnnHyperparameters, Initializer, Optimizer};
use crate::evaluation::{CvResult, EvaluationError, Learner, Scorer};
use crate::searchspace::{sample_rgs, GridSpec};
use crate::seed::rng_from_seed;

/// A mid-sized, fast-training setting used as a default baseline.
pub fn base_hyperparameters() -> DfnnHyperparameters {
    DfnnHyperparameters {
        nodes: vec![10],
        af: Activation::Relu,
        ki: Initializer::HeUniform,
        opt: Optimizer::Adam,
        lr: 0.01,
        mom: 0.0,
        decay: 0.0,
        dropout: 0.0,
        epochs: 20,
        batch_size: 30,
        l1: 0.0,
        l2: 0.0,
    }
}

/// Example grid with 4, 22, 4, 5, 5, 10, 4, 11, 3, 12, 11, 10 and 10
/// values on the thirteen axes.
pub fn table1_grid() -> GridSpec {
    GridSpec {
        nhl: vec![1, 2, 3, 4],
        layer_nodes: vec![
            vec![2, 5, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100, 150, 200, 300, 400, 500, 600, 800, 1000];
            4
        ],
        af: Activation::ALL.to_vec(),
        ki: Initializer::ALL.to_vec(),
        opt: Optimizer::ALL.to_vec(),
        lr: vec![0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
        mom: vec![0.0, 0.3, 0.6, 0.9],
        decay: vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1],
        dropout: vec![0.0, 0.25, 0.5],
        epochs: vec![5, 10, 20, 50, 100, 200, 300, 500, 800, 1000, 1500, 2000],
        batch_size: vec![1, 5, 10, 20, 30, 50, 100, 200, 300, 500, 1000],
        l1: vec![0.0, 0.001, 0.002, 0.005, 0.008, 0.01, 0.015, 0.02, 0.025, 0.03],
        l2: vec![0.0, 0.001, 0.005, 0.01, 0.02, 0.05, 0.08, 0.1, 0.15, 0.2],
    }
}

/// Closed-form scoring rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StubModel {
    /// Returns feature 0, which equals the label in [`label_echo_dataset`].
    LabelEcho,
    Constant(f64),
    /// Sum of all features.
    Additive,
    SingleFeature(usize),
    /// `w · row[0] + (1 − w) · row[last]`.
    Blend(f64),
}

impl StubModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match *self {
            StubModel::LabelEcho => row[0],
            StubModel::Constant(c) => c,
            StubModel::Additive => row.iter().sum(),
            StubModel::SingleFeature(j) => row[j],
            StubModel::Blend(w) => w * row[0] + (1.0 - w) * row[row.len() - 1],
        }
    }
}

impl Scorer for StubModel {
    fn score(&self, rows: ArrayView2<'_, f64>) -> Vec<f64> {
        rows.outer_iter()
            .map(|r| self.predict_row(r.as_slice().expect("standard layout rows")))
            .collect()
    }
}

/// Learner that ignores its data and returns [`StubModel::LabelEcho`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LabelEchoLearner;

impl Learner for LabelEchoLearner {
    type Model = StubModel;

    fn fit(
        &self,
        _: &DfnnHyperparameters,
        _: ArrayView2<'_, f64>,
        _: &[u8],
        _: u64,
    ) -> Result<(StubModel, bool), EvaluationError> {
        Ok((StubModel::LabelEcho, false))
    }
}

/// Learner that returns a constant scorer.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLearner(pub f64);

impl Learner for ConstantLearner {
    type Model = StubModel;

    fn fit(
        &self,
        _: &DfnnHyperparameters,
        _: ArrayView2<'_, f64>,
        _: &[u8],
        _: u64,
    ) -> Result<(StubModel, bool), EvaluationError> {
        Ok((StubModel::Constant(self.0), false))
    }
}

/// Dataset whose first predictor is the label itself and whose second
/// cycles through three levels. The first `positives` cases are positive.
pub fn label_echo_dataset(case_count: usize, positives: usize) -> TabularDataset {
    assert!(positives <= case_count);
    let schema = DatasetSchema::new(
        vec![FeatureSpec::new("echo", &["no", "yes"]), FeatureSpec::new("noise", &["a", "b", "c"])],
        "outcome",
    )
    .expect("valid schema");
    let labels: Vec<u8> = (0..case_count).map(|i| u8::from(i < positives)).collect();
    let rows = Array2::from_shape_fn((case_count, 2), |(i, j)| {
        if j == 0 {
            f64::from(labels[i])
        } else {
            schema.features[1].encode_index(i % 3)
        }
    });
    TabularDataset { schema, rows, labels }
}

/// Fast learner whose quality depends on the hyperparameters: it blends
/// the first and last predictors with a weight that peaks at learning
/// rate 0.01 and shrinks with dropout and regularization.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlendLearner;

impl BlendLearner {
    pub fn weight(hp: &DfnnHyperparameters) -> f64 {
        let lr_fit = 1.0 - ((hp.lr / 0.01).ln().abs() / 4.0).min(1.0);
        let shrink = (1.0 - hp.dropout) * (1.0 - 10.0 * (hp.l1 + hp.l2)).max(0.0);
        lr_fit * shrink
    }
}

impl Learner for BlendLearner {
    type Model = StubModel;

    fn fit(
        &self,
        hp: &DfnnHyperparameters,
        _: ArrayView2<'_, f64>,
        _: &[u8],
        _: u64,
    ) -> Result<(StubModel, bool), EvaluationError> {
        Ok((StubModel::Blend(Self::weight(hp)), false))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown fixture `{0}`")]
pub struct UnknownFixture(pub String);

/// Named fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureName {
    Table1Grid,
    AdditiveModel,
    LrLedger,
    TwoBlobs,
    TableArithmetic,
    LabelEcho,
    Lsm5Shaped,
}

impl FixtureName {
    pub const ALL: [FixtureName; 7] = [
        FixtureName::Table1Grid,
        FixtureName::AdditiveModel,
        FixtureName::LrLedger,
        FixtureName::TwoBlobs,
        FixtureName::TableArithmetic,
        FixtureName::LabelEcho,
        FixtureName::Lsm5Shaped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureName::Table1Grid => "table1-grid",
            FixtureName::AdditiveModel => "additive-model",
            FixtureName::LrLedger => "lr-ledger",
            FixtureName::TwoBlobs => "two-blobs",
            FixtureName::TableArithmetic => "table-arithmetic",
            FixtureName::LabelEcho => "label-echo",
            FixtureName::Lsm5Shaped => "lsm5-shaped",
        }
    }
}

impl FromStr for FixtureName {
    type Err = UnknownFixture;

    fn from_str(s: &str) -> Result<Self, UnknownFixture> {
        FixtureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| UnknownFixture(s.to_string()))
    }
}

/// An additive scorer with a case and the zero background.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveFixture {
    pub model: StubModel,
    pub case: Vec<f64>,
    pub background: Vec<f64>,
}

/// Two Gaussian blobs with known means.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlobs {
    pub rows: Array2<f64>,
    pub means: [[f64; 2]; 2],
}

/// Published table figures with the inputs that reproduce them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableArithmetic {
    pub best_mean: f64,
    pub mid_point: f64,
    pub chs: usize,
    pub tns: usize,
    pub ratio: f64,
    pub rtps: f64,
    pub trt_hours: f64,
    pub pool_rtps: f64,
    pub pool_years: f64,
}

pub const TABLE_ARITHMETIC: TableArithmetic = TableArithmetic {
    best_mean: 0.75825,
    mid_point: 0.629125,
    chs: 39_112,
    tns: 52_042,
    ratio: 0.75155,
    rtps: 42.42,
    trt_hours: 613.23,
    pool_rtps: 117.0,
    pool_years: 1_586_424_369.0,
};

#[derive(Debug, Clone)]
pub enum Fixture {
    Grid(GridSpec),
    Additive(AdditiveFixture),
    Ledger(CampaignLedger),
    Blobs(TwoBlobs),
    Arithmetic(TableArithmetic),
    Dataset(TabularDataset),
}

pub fn make_fixture(name: &str) -> Result<Fixture, UnknownFixture> {
    Ok(match name.parse::<FixtureName>()? {
        FixtureName::Table1Grid => Fixture::Grid(table1_grid()),
        FixtureName::AdditiveModel => Fixture::Additive(additive_model()),
        FixtureName::LrLedger => Fixture::Ledger(lr_ledger(500, 11)),
        FixtureName::TwoBlobs => Fixture::Blobs(two_blobs(200, 5)),
        FixtureName::TableArithmetic => Fixture::Arithmetic(TABLE_ARITHMETIC),
        FixtureName::LabelEcho => Fixture::Dataset(label_echo_dataset(100, 30)),
        FixtureName::Lsm5Shaped => Fixture::Dataset(lsm5_shaped(3)),
    })
}

pub fn additive_model() -> AdditiveFixture {
    let case = vec![0.5, -1.25, 2.0, 3.5, -0.75];
    let fx = AdditiveFixture {
        model: StubModel::Additive,
        background: vec![0.0; case.len()],
        case,
    };
    assert_eq!(fx.model.predict_row(&fx.background), 0.0);
    fx
}

/// `n` rows in two unit-variance-0.25 blobs around (0, 0) and (10, 10).
pub fn two_blobs(n: usize, seed: u64) -> TwoBlobs {
    let means: [[f64; 2]; 2] = [[0.0, 0.0], [10.0, 10.0]];
    let noise = Normal::new(0.0, 0.5).expect("valid normal");
    let mut rng = rng_from_seed(seed);
    let rows = Array2::from_shape_fn((n, 2), |(i, j)| means[i % 2][j] + noise.sample(&mut rng));
    for (i, r) in rows.outer_iter().enumerate() {
        let m = means[i % 2];
        assert!((r[0] - m[0]).abs() < 4.0 && (r[1] - m[1]).abs() < 4.0);
    }
    TwoBlobs { rows, means }
}

/// Score of a setting in [`lr_ledger`]: `0.5 + 0.3 · (lr − min) / (max − min)`
/// over the reference grid's learning rates.
pub fn lr_score(lr: f64) -> f64 {
    let g = table1_grid();
    let (lo, hi) = (g.lr[0], g.lr[g.lr.len() - 1]);
    0.5 + 0.3 * (lr - lo) / (hi - lo)
}

/// `n` distinct reference-grid settings whose score depends on the learning
/// rate alone.
pub fn lr_ledger(n: usize, seed: u64) -> CampaignLedger {
    let grid = table1_grid();
    let mut rng = rng_from_seed(seed);
    let rows = sample_rgs(&grid, n, seed)
        .expect("pool exceeds n")
        .into_iter()
        .map(|setting| {
            let score = lr_score(setting.hp.lr);
            LedgerRow {
                cycle_label: "lr-fixture".into(),
                cv: CvResult {
                    setting_id: setting.id.clone(),
                    fold_aucs: [score; 5],
                    mean_test_auc: score,
                    train_seconds: rng.random_range(1.0..5.0),
                    diverged: false,
                },
                setting,
            }
        })
        .collect();
    let ledger = CampaignLedger::new("lr-fixture", seed, "fixture", rows).expect("distinct settings");
    assert!(ledger.rows.iter().all(|r| r.cv.mean_test_auc == lr_score(r.setting.hp.lr)));
    ledger
}

/// Schema with 20 categorical predictors and a binary `metastasis` target.
pub fn lsm5_schema() -> DatasetSchema {
    let f = FeatureSpec::new;
    let features = vec![
        f(
            "race",
            &[
                "white",
                "black",
                "Asian",
                "American Indian or Alaskan native",
                "native Hawaiian or other Pacific islander",
            ],
        ),
        f("smoking", &["ex smoker", "non smoker", "cigarettes", "chewing tobacco", "cigar"]),
        f(
            "family history",
            &["cancer", "no cancer", "breast cancer", "other cancer", "cancer but nos"],
        ),
        f("age_at_diagnosis", &["0-49", "50-69", ">69"]),
        f("TNEG", &["yes", "no"]),
        f("ER", &["neg", "pos", "low pos"]),
        f("ER_percent", &["0-20", "20-90", "90-100"]),
        f("PR", &["neg", "pos", "low pos"]),
        f("PR_percent", &["0-20", "20-90", "90-100"]),
        f("P53", &["no", "yes"]),
        f("HER2", &["neg", "pos"]),
        f("t_tnm_stage", &["0", "1", "2", "3", "4", "IS", "1mic", "X"]),
        f("n_tnm_stage", &["0", "1", "2", "3", "4", "X"]),
        f("stage", &["0", "1", "2", "3"]),
        f("lymph_nodes_positive", &["0", "1-8", ">8"]),
        f("histology", &["lobular", "duct"]),
        f("size", &["0-32", "32-70", ">70"]),
        f("invasive_tumor_location", &["mixed duct and lobular", "duct", "lobular", "none"]),
        f(
            "DCIS_level",
            &["solid", "apocrine", "cribriform", "dcis", "comedo", "papillary", "micropapillary"],
        ),
        f("surgical_margins", &["res. tumor", "no res. tumor", "no primary site surgery"]),
    ];
    DatasetSchema::new(features, "metastasis").expect("valid schema")
}

/// Random values over [`lsm5_schema`] with 4189 cases, 437 positive.
pub fn lsm5_shaped(seed: u64) -> TabularDataset {
    let schema = lsm5_schema();
    let (n, positives) = (4189, 437);
    let mut rng = rng_from_seed(seed);
    let labels: Vec<u8> = (0..n).map(|i| u8::from((i + 1) * positives / n != i * positives / n)).collect();
    let rows = Array2::from_shape_fn((n, schema.features.len()), |(_, j)| {
        let spec = &schema.features[j];
        spec.encode_index(rng.random_range(0..spec.values.len()))
    });
    let data = TabularDataset { schema, rows, labels };
    assert_eq!((data.case_count(), data.positives(), data.predictor_count()), (4189, 437, 20));
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn every_name_resolves() {
        for name in FixtureName::ALL {
            assert!(make_fixture(name.as_str()).is_ok(), "{}", name.as_str());
        }
        assert!(make_fixture("no-such-fixture").is_err());
    }

    #[test]
    fn reference_grid_pool() {
        let Fixture::Grid(g) = make_fixture("table1-grid").unwrap() else { panic!() };
        assert_eq!(g.pool_size(), BigUint::from(427_602_384_000_000u64));
    }

    #[test]
    fn lr_ledger_shape() {
        let l = lr_ledger(500, 11);
        assert_eq!(l.len(), 500);
        let lrs: std::collections::BTreeSet<u64> = l.rows.iter().map(|r| r.setting.hp.lr.to_bits()).collect();
        assert!(lrs.len() > 5);
        assert_eq!(lr_score(0.001), 0.5);
        assert!((lr_score(0.3) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn blend_weight_peaks_at_reference_rate() {
        let mut hp = base_hyperparameters();
        assert_eq!(BlendLearner::weight(&hp), 1.0);
        hp.lr = 0.3;
        assert!(BlendLearner::weight(&hp) < 0.5);
    }
}
