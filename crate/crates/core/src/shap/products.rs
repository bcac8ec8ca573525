use std::fmt::Write as _;

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use super::ShapError;

/// Attributions for a set of cases.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapMatrix {
    pub case_ids: Vec<usize>,
    pub feature_names: Vec<String>,
    /// cases × features
    pub values: Array2<f64>,
    /// Model output on the background.
    pub base_value: f64,
    /// Model output on each case.
    pub outputs: Vec<f64>,
}

impl ShapMatrix {
    pub fn case_count(&self) -> usize {
        self.values.nrows()
    }

    /// Largest `|base + Σφ − output|` over the cases.
    pub fn max_local_accuracy_gap(&self) -> f64 {
        self.values
            .outer_iter()
            .zip(&self.outputs)
            .map(|(row, out)| (self.base_value + row.sum() - out).abs())
            .fold(0.0, f64::max)
    }

    /// `case_id, <features…>, base_value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("case_id");
        for f in &self.feature_names {
            s.push(',');
            s.push_str(f);
        }
        s.push_str(",base_value\n");
        for (id, row) in self.case_ids.iter().zip(self.values.outer_iter()) {
            let _ = write!(s, "{id}");
            for v in row {
                let _ = write!(s, ",{v}");
            }
            let _ = writeln!(s, ",{}", self.base_value);
        }
        s
    }
}

/// Features by mean absolute attribution, largest first; ties keep input
/// order.
pub fn importance(shap: &ShapMatrix) -> Result<Vec<(String, f64)>, ShapError> {
    if shap.case_count() == 0 {
        return Err(ShapError::EmptyMatrix);
    }
    let n = shap.case_count() as f64;
    let mut out: Vec<(String, f64)> = shap
        .feature_names
        .iter()
        .zip(shap.values.columns())
        .map(|(name, col)| (name.clone(), col.iter().map(|v| v.abs()).sum::<f64>() / n))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(out)
}

pub fn importance_csv(ranking: &[(String, f64)]) -> String {
    let mut s = String::from("rank,feature,mean_abs_shap\n");
    for (i, (f, v)) in ranking.iter().enumerate() {
        let _ = writeln!(s, "{},{f},{v}", i + 1);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapOrder {
    /// Case ids in dendrogram leaf order.
    pub case_order: Vec<usize>,
    pub feature_order: Vec<String>,
    /// Model outputs in `case_order`.
    pub outputs: Vec<f64>,
}

impl HeatmapOrder {
    pub fn to_csv(&self, shap: &ShapMatrix) -> String {
        let mut s = String::from("case_id,f_x");
        for f in &self.feature_order {
            s.push(',');
            s.push_str(f);
        }
        s.push('\n');
        let cols: Vec<usize> = self
            .feature_order
            .iter()
            .map(|f| shap.feature_names.iter().position(|g| g == f).expect("known feature"))
            .collect();
        for (&id, out) in self.case_order.iter().zip(&self.outputs) {
            let row = shap.case_ids.iter().position(|&c| c == id).expect("known case");
            let _ = write!(s, "{id},{out}");
            for &c in &cols {
                let _ = write!(s, ",{}", shap.values[[row, c]]);
            }
            s.push('\n');
        }
        s
    }
}

fn euclid(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Leaf order of complete-linkage agglomerative clustering of the rows
/// under Euclidean distance. Each merge joins the closest pair of live
/// clusters (ties to the lowest cluster ids) and places the lower id's
/// leaves first; merged clusters take fresh ids.
pub fn complete_linkage_order(rows: ArrayView2<'_, f64>) -> Vec<usize> {
    let n = rows.nrows();
    if n == 0 {
        return vec![];
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclid(rows.row(i), rows.row(j));
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    // slot -> (cluster id, leaves); merged clusters reuse the first slot
    let mut live: Vec<Option<(usize, Vec<usize>)>> = (0..n).map(|i| Some((i, vec![i]))).collect();
    let mut next_id = n;
    for _ in 1..n {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..n {
            let Some((ida, _)) = &live[a] else { continue };
            for b in a + 1..n {
                let Some((idb, _)) = &live[b] else { continue };
                let (lo, hi) = ((*ida).min(*idb), (*ida).max(*idb));
                let d = dist[a][b];
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, a, b));
                }
            }
        }
        let (_, _, _, a, b) = best.expect("two live clusters");
        let (ida, la) = live[a].take().expect("live");
        let (idb, lb) = live[b].take().expect("live");
        let leaves = if ida < idb { [la, lb].concat() } else { [lb, la].concat() };
        for c in 0..n {
            if c != a && live[c].is_some() {
                let d = dist[a][c].max(dist[b][c]);
                dist[a][c] = d;
                dist[c][a] = d;
            }
        }
        live[a] = Some((next_id, leaves));
        next_id += 1;
    }
    live.into_iter().flatten().next().expect("root").1
}

pub fn heatmap_order(shap: &ShapMatrix) -> Result<HeatmapOrder, ShapError> {
    if shap.case_count() < 2 {
        return Err(ShapError::EmptyMatrix);
    }
    let order = complete_linkage_order(shap.values.view());
    Ok(HeatmapOrder {
        case_order: order.iter().map(|&i| shap.case_ids[i]).collect(),
        feature_order: importance(shap)?.into_iter().map(|(f, _)| f).collect(),
        outputs: order.iter().map(|&i| shap.outputs[i]).collect(),
    })
}

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dependence {
    pub top_feature: String,
    /// Other features by `|r|` against the top feature's attributions.
    pub ranking: Vec<(String, f64)>,
    /// Feature most correlated with the top feature's attributions.
    pub partner: Option<String>,
    /// Per case: top feature value, its attribution, partner value.
    pub interaction: Vec<(f64, f64, f64)>,
}

impl Dependence {
    pub fn ranking_csv(&self) -> String {
        let mut s = String::from("rank,feature,pearson_r\n");
        for (i, (f, r)) in self.ranking.iter().enumerate() {
            let _ = writeln!(s, "{},{f},{r}", i + 1);
        }
        s
    }

    pub fn interaction_csv(&self) -> String {
        let partner = self.partner.as_deref().unwrap_or("none");
        let mut s = format!("{0},shap_{0},{partner}\n", self.top_feature);
        for (v, p, w) in &self.interaction {
            let _ = writeln!(s, "{v},{p},{w}");
        }
        s
    }
}

/// Association of every feature with the top feature's attributions.
/// `data` holds the explained cases' feature values, row for row.
pub fn dependence(shap: &ShapMatrix, data: ArrayView2<'_, f64>) -> Result<Dependence, ShapError> {
    if shap.case_count() < 3 {
        return Err(ShapError::EmptyMatrix);
    }
    if data.ncols() != shap.feature_names.len() || data.nrows() != shap.case_count() {
        return Err(ShapError::FeatureMismatch {
            expected: shap.feature_names.len(),
            found: data.ncols(),
        });
    }
    let top_name = importance(shap)?[0].0.clone();
    let top = shap.feature_names.iter().position(|f| *f == top_name).expect("known feature");
    let phi_top = shap.values.column(top).to_vec();
    let mut ranking: Vec<(usize, f64)> = (0..data.ncols())
        .filter(|&j| j != top)
        .map(|j| (j, pearson(&data.column(j).to_vec(), &phi_top)))
        .collect();
    ranking.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    let partner = ranking.first().map(|&(j, _)| j);
    let interaction = (0..data.nrows())
        .map(|i| (data[[i, top]], phi_top[i], partner.map_or(f64::NAN, |j| data[[i, j]])))
        .collect();
    Ok(Dependence {
        top_feature: top_name,
        ranking: ranking
            .into_iter()
            .map(|(j, r)| (shap.feature_names[j].clone(), r))
            .collect(),
        partner: partner.map(|j| shap.feature_names[j].clone()),
        interaction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn matrix(values: Array2<f64>) -> ShapMatrix {
        let n = values.nrows();
        ShapMatrix {
            case_ids: (0..n).collect(),
            feature_names: (1..=values.ncols()).map(|j| format!("f{j}")).collect(),
            outputs: values.outer_iter().map(|r| r.sum()).collect(),
            values,
            base_value: 0.0,
        }
    }

    #[test]
    fn single_case_ranking() {
        let r = importance(&matrix(array![[0.3, -0.5]])).unwrap();
        assert_eq!(r, vec![("f2".to_string(), 0.5), ("f1".to_string(), 0.3)]);
    }

    #[test]
    fn zero_matrix_keeps_order() {
        let r = importance(&matrix(Array2::zeros((4, 3)))).unwrap();
        assert_eq!(r.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["f1", "f2", "f3"]);
        assert!(r.iter().all(|x| x.1 == 0.0));
    }

    #[test]
    fn identical_rows_are_adjacent() {
        let m = matrix(array![[0.0, 5.0], [3.0, 1.0], [9.0, 9.0], [3.0, 1.0], [0.5, 4.0]]);
        let h = heatmap_order(&m).unwrap();
        let p1 = h.case_order.iter().position(|&c| c == 1).unwrap();
        let p3 = h.case_order.iter().position(|&c| c == 3).unwrap();
        assert_eq!(p1.abs_diff(p3), 1);
        let mut sorted = h.case_order.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn constant_column_has_zero_correlation() {
        let m = matrix(array![[1.0, 0.0, 0.1], [2.0, 0.0, 0.2], [3.0, 0.0, 0.4], [4.0, 0.0, 0.3]]);
        let data = array![[1.0, 7.0, 1.0], [2.0, 7.0, 2.0], [3.0, 7.0, 4.0], [4.0, 7.0, 3.0]];
        let d = dependence(&m, data.view()).unwrap();
        assert_eq!(d.top_feature, "f1");
        let r2 = d.ranking.iter().find(|x| x.0 == "f2").unwrap().1;
        assert_eq!(r2, 0.0);
        assert_eq!(d.partner.as_deref(), Some("f3"));
    }

    #[test]
    fn empty_matrix_errors() {
        assert!(matches!(importance(&matrix(Array2::zeros((0, 2)))), Err(ShapError::EmptyMatrix)));
        assert!(matches!(heatmap_order(&matrix(Array2::zeros((1, 2)))), Err(ShapError::EmptyMatrix)));
    }
}
