//! Tabular binary-outcome datasets: schema, CSV ingestion, ordinal encoding,
//! stratified train-test/validation splitting and the synthetic generator
//! used for desk-scale runs.
//!
//! Every predictor is categorical. A cell holding the `i`-th entry of a
//! feature's value dictionary (of size `d`) is encoded as `i / (d - 1)`, so
//! the network sees one input node per feature with values in `[0, 1]`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::{derive_seed, rng_from_seed, sha256_hex};

/// Number of cross-validation folds in a split plan.
pub const FOLDS: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("column `{0}` is not part of the schema")]
    UnknownColumn(String),
    #[error("schema feature `{0}` has no column in the file")]
    MissingColumn(String),
    #[error("final column must be the target `{expected}`, found `{found}`")]
    TargetNotLast { expected: String, found: String },
    #[error("row {row}, column `{column}`: value `{value}` is not in the feature's dictionary")]
    UnknownCategoryValue { row: usize, column: String, value: String },
    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },
    #[error("row {row}: expected {expected} cells, found {found}")]
    MalformedRow { row: usize, expected: usize, found: usize },
    #[error("dataset has no cases")]
    EmptyDataset,
    #[error("too few cases to split: {positives} positive and {negatives} negative (need at least {min} of each)")]
    TooFewCases { positives: usize, negatives: usize, min: usize },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("split plan does not match dataset: {0}")]
    PlanMismatch(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// A categorical predictor and its ordered value dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub values: Vec<String>,
}

impl FeatureSpec {
    pub fn new(name: impl Into<String>, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn encode_index(&self, index: usize) -> f64 {
        if self.values.len() <= 1 {
            0.0
        } else {
            index as f64 / (self.values.len() - 1) as f64
        }
    }

    pub fn encode(&self, label: &str) -> Option<f64> {
        self.values
            .iter()
            .position(|v| v == label)
            .map(|i| self.encode_index(i))
    }

    /// Inverse of [`encode`](Self::encode); returns `None` when `value` is
    /// not on the encoding lattice.
    pub fn decode(&self, value: f64) -> Option<&str> {
        let d = self.values.len();
        let idx = if d <= 1 {
            0.0
        } else {
            value * (d - 1) as f64
        };
        let rounded = idx.round();
        if (idx - rounded).abs() > 1e-9 || rounded < 0.0 || rounded as usize >= d {
            return None;
        }
        self.values.get(rounded as usize).map(String::as_str)
    }
}

fn default_target_labels() -> [String; 2] {
    ["0".to_string(), "1".to_string()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub features: Vec<FeatureSpec>,
    /// Name of the binary outcome column.
    pub target: String,
    /// Cell labels of the outcome, `[negative, positive]`.
    #[serde(default = "default_target_labels")]
    pub target_labels: [String; 2],
}

impl DatasetSchema {
    pub fn new(features: Vec<FeatureSpec>, target: impl Into<String>) -> Result<Self, DatasetError> {
        let schema = Self {
            features,
            target: target.into(),
            target_labels: default_target_labels(),
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.features.is_empty() {
            return Err(DatasetError::InvalidSchema("no predictors".into()));
        }
        let mut seen = HashSet::new();
        for f in &self.features {
            if !seen.insert(f.name.as_str()) {
                return Err(DatasetError::InvalidSchema(format!("duplicate feature `{}`", f.name)));
            }
            if f.values.is_empty() {
                return Err(DatasetError::InvalidSchema(format!("feature `{}` has an empty dictionary", f.name)));
            }
            let distinct: HashSet<_> = f.values.iter().collect();
            if distinct.len() != f.values.len() {
                return Err(DatasetError::InvalidSchema(format!("feature `{}` repeats a value", f.name)));
            }
            if f.values.iter().any(|v| v.contains(',') || v.is_empty()) {
                return Err(DatasetError::InvalidSchema(format!(
                    "feature `{}` has an empty label or a label containing a comma",
                    f.name
                )));
            }
        }
        if seen.contains(self.target.as_str()) {
            return Err(DatasetError::InvalidSchema(format!("target `{}` is also a predictor", self.target)));
        }
        if self.target_labels[0] == self.target_labels[1] {
            return Err(DatasetError::InvalidSchema("target labels must differ".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self, DatasetError> {
        let text = read_to_string(path)?;
        let schema: Self = serde_json::from_str(&text).map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    pub schema: DatasetSchema,
    /// `case_count x predictor_count`, encoded to `[0, 1]`.
    pub rows: Array2<f64>,
    pub labels: Vec<u8>,
}

impl TabularDataset {
    pub fn case_count(&self) -> usize {
        self.labels.len()
    }

    pub fn predictor_count(&self) -> usize {
        self.rows.ncols()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn negatives(&self) -> usize {
        self.case_count() - self.positives()
    }

    /// Rows and labels at the given case indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> (Array2<f64>, Vec<u8>) {
        let rows = self.rows.select(ndarray::Axis(0), indices);
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        (rows, labels)
    }

    /// Serialize back to the CSV layout accepted by [`load_csv`].
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for f in &self.schema.features {
            out.push_str(&f.name);
            out.push(',');
        }
        out.push_str(&self.schema.target);
        out.push('\n');
        for (row, &label) in self.rows.outer_iter().zip(&self.labels) {
            for (f, &v) in self.schema.features.iter().zip(row.iter()) {
                out.push_str(f.decode(v).expect("encoded values stay on the lattice"));
                out.push(',');
            }
            out.push_str(&self.schema.target_labels[label as usize]);
            out.push('\n');
        }
        out
    }

    /// Content hash of the canonical CSV form.
    pub fn fingerprint(&self) -> String {
        sha256_hex(self.to_csv_string().as_bytes())
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} cases, {} positive, {} negative, {} predictors",
            self.case_count(),
            self.positives(),
            self.negatives(),
            self.predictor_count()
        )
    }
}

fn read_to_string(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<TabularDataset, DatasetError> {
    parse_csv(&read_to_string(path)?, schema)
}

/// Parse CSV text (header row, one case per row, target last).
pub fn parse_csv(text: &str, schema: &DatasetSchema) -> Result<TabularDataset, DatasetError> {
    schema.validate()?;
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = match lines.next() {
        Some(h) => h.split(',').map(str::trim).collect(),
        None => return Err(DatasetError::EmptyDataset),
    };
    let (target_col, predictor_cols) = header.split_last().expect("split always yields one field");
    if *target_col != schema.target {
        return Err(DatasetError::TargetNotLast {
            expected: schema.target.clone(),
            found: target_col.to_string(),
        });
    }
    let by_name: HashMap<&str, usize> = schema
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| (f.name.as_str(), i))
        .collect();
    // column position in file -> feature index in schema
    let mut column_feature = Vec::with_capacity(predictor_cols.len());
    let mut covered = HashSet::new();
    for &name in predictor_cols {
        let idx = *by_name
            .get(name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))?;
        if !covered.insert(idx) {
            return Err(DatasetError::InvalidSchema(format!("column `{name}` appears twice")));
        }
        column_feature.push(idx);
    }
    if let Some(missing) = schema.features.iter().enumerate().find(|(i, _)| !covered.contains(i)) {
        return Err(DatasetError::MissingColumn(missing.1.name.clone()));
    }

    let p = schema.features.len();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (line_no, line) in lines.enumerate() {
        let row_no = line_no + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(DatasetError::MalformedRow {
                row: row_no,
                expected: header.len(),
                found: cells.len(),
            });
        }
        let mut encoded = vec![0.0; p];
        for (cell, &fi) in cells.iter().zip(&column_feature) {
            let feature = &schema.features[fi];
            if cell.is_empty() {
                return Err(DatasetError::MissingValue {
                    row: row_no,
                    column: feature.name.clone(),
                });
            }
            encoded[fi] = feature.encode(cell).ok_or_else(|| DatasetError::UnknownCategoryValue {
                row: row_no,
                column: feature.name.clone(),
                value: cell.to_string(),
            })?;
        }
        let target_cell = cells[cells.len() - 1];
        let label = if target_cell == schema.target_labels[0] {
            0
        } else if target_cell == schema.target_labels[1] {
            1
        } else if target_cell.is_empty() {
            return Err(DatasetError::MissingValue {
                row: row_no,
                column: schema.target.clone(),
            });
        } else {
            return Err(DatasetError::UnknownCategoryValue {
                row: row_no,
                column: schema.target.clone(),
                value: target_cell.to_string(),
            });
        };
        values.extend(encoded);
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let rows = Array2::from_shape_vec((labels.len(), p), values).expect("row-major fill");
    Ok(TabularDataset {
        schema: schema.clone(),
        rows,
        labels,
    })
}

/// An 80/20 train-test/validation partition with stratified fold labels on
/// the train-test part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "SplitPlanFile", into = "SplitPlanFile")]
pub struct SplitPlan {
    pub seed: u64,
    /// Ascending.
    pub train_test_indices: Vec<usize>,
    /// Ascending.
    pub validation_indices: Vec<usize>,
    /// Fold id in `1..=5` for every train-test index.
    pub fold_of: BTreeMap<usize, u8>,
}

#[derive(Serialize, Deserialize)]
struct SplitPlanFile {
    seed: u64,
    validation_indices: Vec<usize>,
    fold_of: BTreeMap<usize, u8>,
}

impl From<SplitPlanFile> for SplitPlan {
    fn from(f: SplitPlanFile) -> Self {
        Self {
            seed: f.seed,
            train_test_indices: f.fold_of.keys().copied().collect(),
            validation_indices: f.validation_indices,
            fold_of: f.fold_of,
        }
    }
}

impl From<SplitPlan> for SplitPlanFile {
    fn from(p: SplitPlan) -> Self {
        Self {
            seed: p.seed,
            validation_indices: p.validation_indices,
            fold_of: p.fold_of,
        }
    }
}

impl SplitPlan {
    /// Train-test indices assigned to `fold` (1-based), ascending.
    pub fn fold_indices(&self, fold: u8) -> Vec<usize> {
        self.fold_of
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(&i, _)| i)
            .collect()
    }

    /// Train-test indices outside `fold`, ascending.
    pub fn training_indices(&self, fold: u8) -> Vec<usize> {
        self.fold_of
            .iter()
            .filter(|(_, &f)| f != fold)
            .map(|(&i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, DatasetError> {
        let text = read_to_string(path)?;
        Self::from_json(&text).map_err(|source| DatasetError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    /// Check the partition and stratification invariants against `data`.
    pub fn check(&self, data: &TabularDataset) -> Result<(), DatasetError> {
        let n = data.case_count();
        let mismatch = |m: String| Err(DatasetError::PlanMismatch(m));
        let mut seen = vec![false; n];
        for &i in self.train_test_indices.iter().chain(&self.validation_indices) {
            if i >= n {
                return mismatch(format!("index {i} out of range for {n} cases"));
            }
            if seen[i] {
                return mismatch(format!("index {i} appears twice"));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return mismatch("partition does not cover every case".into());
        }
        if self.validation_indices.len() != validation_size(n) {
            return mismatch(format!(
                "validation size {} != round(0.2 * {n})",
                self.validation_indices.len()
            ));
        }
        let tt_pos = self.train_test_indices.iter().filter(|&&i| data.labels[i] == 1).count();
        let tt_neg = self.train_test_indices.len() - tt_pos;
        for fold in 1..=FOLDS {
            let members = self.fold_indices(fold);
            let pos = members.iter().filter(|&&i| data.labels[i] == 1).count();
            let neg = members.len() - pos;
            for (count, total, class) in [(pos, tt_pos, "positive"), (neg, tt_neg, "negative")] {
                let mean = total as f64 / FOLDS as f64;
                if (count as f64 - mean).abs() > 1.0 {
                    return mismatch(format!("fold {fold} holds {count} {class} cases, class mean {mean}"));
                }
            }
        }
        Ok(())
    }
}

/// `round(0.2 * n)`; `n / 5` never lands on a half, so no tie rule is needed.
pub fn validation_size(n: usize) -> usize {
    (2 * n + 5) / 10
}

/// Minimum cases per class accepted by [`split`].
pub const MIN_CASES_PER_CLASS: usize = 10;

/// Stratified 80/20 split followed by round-robin assignment of the
/// train-test cases to five folds, shuffling each class with a generator
/// derived from `seed`.
pub fn split(data: &TabularDataset, seed: u64) -> Result<SplitPlan, DatasetError> {
    let mut pos: Vec<usize> = (0..data.case_count()).filter(|&i| data.labels[i] == 1).collect();
    let mut neg: Vec<usize> = (0..data.case_count()).filter(|&i| data.labels[i] == 0).collect();
    if pos.len() < MIN_CASES_PER_CLASS || neg.len() < MIN_CASES_PER_CLASS {
        return Err(DatasetError::TooFewCases {
            positives: pos.len(),
            negatives: neg.len(),
            min: MIN_CASES_PER_CLASS,
        });
    }
    let n = data.case_count();
    let v_total = validation_size(n);
    // round(v_total * P / N), integer form
    let v_pos = ((2 * v_total * pos.len() + n) / (2 * n)).min(pos.len());
    let v_neg = (v_total - v_pos).min(neg.len());

    let mut rng = rng_from_seed(derive_seed(seed, &["split".into()]));
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let mut validation: Vec<usize> = pos[..v_pos].iter().chain(&neg[..v_neg]).copied().collect();
    validation.sort_unstable();

    let mut fold_of = BTreeMap::new();
    // continue the round-robin counter across classes so fold sizes balance
    let mut counter = 0usize;
    for &i in pos[v_pos..].iter().chain(&neg[v_neg..]) {
        fold_of.insert(i, (counter % FOLDS as usize) as u8 + 1);
        counter += 1;
    }
    Ok(SplitPlan {
        seed,
        train_test_indices: fold_of.keys().copied().collect(),
        validation_indices: validation,
        fold_of,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub case_count: usize,
    pub predictor_count: usize,
    pub signal_strength: f64,
}

impl SynthSpec {
    /// Predictors that carry signal: the first `ceil(p / 2)`.
    pub fn informative_count(&self) -> usize {
        self.predictor_count.div_ceil(2)
    }

    /// Log-odds weight on each informative predictor's centred level.
    pub fn weight(&self) -> f64 {
        self.signal_strength * 4.0 / (self.informative_count() as f64).sqrt()
    }
}

/// Three-level categorical predictors, drawn uniformly; the positive-label
/// log-odds is `weight * sum(level - 1)` over the informative predictors.
pub fn synth_gen(spec: &SynthSpec, seed: u64) -> Result<TabularDataset, DatasetError> {
    if spec.case_count < 20 {
        return Err(DatasetError::InvalidSpec(format!("case_count {} < 20", spec.case_count)));
    }
    if spec.predictor_count < 2 {
        return Err(DatasetError::InvalidSpec(format!("predictor_count {} < 2", spec.predictor_count)));
    }
    if !(0.0..=1.0).contains(&spec.signal_strength) {
        return Err(DatasetError::InvalidSpec(format!(
            "signal_strength {} outside [0, 1]",
            spec.signal_strength
        )));
    }
    let features = (1..=spec.predictor_count)
        .map(|j| FeatureSpec::new(format!("x{j}"), &["low", "mid", "high"]))
        .collect();
    let schema = DatasetSchema::new(features, "outcome")?;
    let p = spec.predictor_count;
    let m = spec.informative_count();
    let w = spec.weight();
    let mut rng = rng_from_seed(derive_seed(seed, &["synth".into()]));
    let mut values = Vec::with_capacity(spec.case_count * p);
    let mut labels = Vec::with_capacity(spec.case_count);
    for _ in 0..spec.case_count {
        let mut logit = 0.0;
        for j in 0..p {
            let level: usize = rng.random_range(0..3);
            if j < m {
                logit += w * (level as f64 - 1.0);
            }
            values.push(schema.features[j].encode_index(level));
        }
        let prob = 1.0 / (1.0 + (-logit).exp());
        labels.push(u8::from(rng.random::<f64>() < prob));
    }
    Ok(TabularDataset {
        schema,
        rows: Array2::from_shape_vec((spec.case_count, p), values).expect("row-major fill"),
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_schema() -> DatasetSchema {
        DatasetSchema::new(
            vec![
                FeatureSpec::new("ER", &["neg", "pos", "low pos"]),
                FeatureSpec::new("HER2", &["neg", "pos"]),
            ],
            "metastasis",
        )
        .unwrap()
    }

    #[test]
    fn three_value_feature_second_entry_encodes_to_half() {
        let f = FeatureSpec::new("ER", &["neg", "pos", "low pos"]);
        assert_eq!(f.encode("pos"), Some(0.5));
        assert_eq!(f.decode(0.5), Some("pos"));
    }

    #[test]
    fn encoding_round_trips_every_dictionary_entry() {
        for d in 1..12 {
            let labels: Vec<String> = (0..d).map(|i| format!("v{i}")).collect();
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let f = FeatureSpec::new("f", &refs);
            for l in &refs {
                let v = f.encode(l).unwrap();
                assert!((0.0..=1.0).contains(&v));
                assert_eq!(f.decode(v), Some(*l));
            }
        }
    }

    #[test]
    fn unknown_value_reports_location() {
        let text = "ER,HER2,metastasis\npos,neg,0\npurple,pos,1\n";
        match parse_csv(text, &tiny_schema()) {
            Err(DatasetError::UnknownCategoryValue { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "ER", "purple"));
            }
            other => panic!("expected UnknownCategoryValue, got {other:?}"),
        }
    }

    #[test]
    fn header_errors() {
        let s = tiny_schema();
        assert!(matches!(
            parse_csv("ER,PR,metastasis\npos,neg,0\n", &s),
            Err(DatasetError::UnknownColumn(c)) if c == "PR"
        ));
        assert!(matches!(
            parse_csv("ER,metastasis\npos,0\n", &s),
            Err(DatasetError::MissingColumn(c)) if c == "HER2"
        ));
        assert!(matches!(parse_csv("ER,HER2,metastasis\n", &s), Err(DatasetError::EmptyDataset)));
        assert!(matches!(
            parse_csv("ER,HER2,metastasis\n,neg,0\n", &s),
            Err(DatasetError::MissingValue { row: 1, .. })
        ));
    }

    #[test]
    fn columns_may_be_reordered() {
        let d = parse_csv("HER2,ER,metastasis\npos,low pos,1\n", &tiny_schema()).unwrap();
        assert_eq!(d.rows.row(0).to_vec(), vec![1.0, 1.0]);
        assert_eq!(d.labels, vec![1]);
    }

    #[test]
    fn schema_rejects_target_as_predictor_and_duplicates() {
        assert!(DatasetSchema::new(vec![FeatureSpec::new("y", &["a"])], "y").is_err());
        assert!(DatasetSchema::new(
            vec![FeatureSpec::new("a", &["x"]), FeatureSpec::new("a", &["x"])],
            "y"
        )
        .is_err());
        assert!(DatasetSchema::new(vec![FeatureSpec::new("a", &[])], "y").is_err());
    }

    fn labelled(pos: usize, neg: usize) -> TabularDataset {
        let n = pos + neg;
        let schema = DatasetSchema::new(vec![FeatureSpec::new("a", &["0", "1"])], "y").unwrap();
        TabularDataset {
            schema,
            rows: Array2::zeros((n, 1)),
            labels: (0..n).map(|i| u8::from(i < pos)).collect(),
        }
    }

    #[test]
    fn split_of_table2_sized_dataset() {
        let d = labelled(437, 4189 - 437);
        let plan = split(&d, 11).unwrap();
        plan.check(&d).unwrap();
        assert_eq!(plan.validation_indices.len(), 838);
        let tt_pos = plan.train_test_indices.iter().filter(|&&i| d.labels[i] == 1).count();
        assert!(tt_pos == 349 || tt_pos == 350, "{tt_pos}");
        for fold in 1..=5 {
            let p = plan.fold_indices(fold).iter().filter(|&&i| d.labels[i] == 1).count();
            assert!((69..=70).contains(&p), "fold {fold}: {p}");
        }
    }

    #[test]
    fn split_rejects_tiny_classes() {
        assert!(matches!(split(&labelled(5, 5), 1), Err(DatasetError::TooFewCases { .. })));
        assert!(split(&labelled(10, 10), 1).is_ok());
    }

    #[test]
    fn split_is_deterministic_and_serializes() {
        let d = labelled(40, 70);
        let a = split(&d, 3).unwrap();
        let b = split(&d, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = SplitPlan::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_ne!(split(&d, 4).unwrap(), a);
    }

    #[test]
    fn synth_rejects_bad_specs_and_is_deterministic() {
        let bad = SynthSpec { case_count: 19, predictor_count: 4, signal_strength: 1.0 };
        assert!(synth_gen(&bad, 1).is_err());
        let bad = SynthSpec { case_count: 40, predictor_count: 1, signal_strength: 1.0 };
        assert!(synth_gen(&bad, 1).is_err());
        let bad = SynthSpec { case_count: 40, predictor_count: 3, signal_strength: 1.5 };
        assert!(synth_gen(&bad, 1).is_err());
        let ok = SynthSpec { case_count: 200, predictor_count: 5, signal_strength: 0.7 };
        assert_eq!(synth_gen(&ok, 9).unwrap(), synth_gen(&ok, 9).unwrap());
        let d = synth_gen(&ok, 9).unwrap();
        let text = d.to_csv_string();
        assert_eq!(parse_csv(&text, &d.schema).unwrap(), d);
    }
}
