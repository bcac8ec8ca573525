use std::collections::BTreeMap;

use super::{AxisName, GridSpec, SearchError, SettingId};
use crate::dfnn::DfnnHyperparameters;

/// Index radius per axis. Missing axes have radius 0.
pub type Radius = BTreeMap<AxisName, u32>;

/// A recorded, scored setting.
pub trait Scored {
    fn setting_id(&self) -> &SettingId;
    fn hyperparameters(&self) -> &DfnnHyperparameters;
    fn score(&self) -> f64;
}

fn window<T: Clone>(values: &[T], center: usize, radius: u32) -> Vec<T> {
    let r = radius as usize;
    let lo = center.saturating_sub(r);
    let hi = (center + r).min(values.len() - 1);
    values[lo..=hi].to_vec()
}

fn keep_axis<T: Clone>(values: &[T], center: usize, radius: u32, categorical: bool) -> Vec<T> {
    if categorical {
        if radius == 0 {
            vec![values[center].clone()]
        } else {
            values.to_vec()
        }
    } else {
        window(values, center, radius)
    }
}

fn nearest(values: &[u32], target: u32) -> usize {
    (0..values.len())
        .min_by_key(|&i| (values[i].abs_diff(target), i))
        .expect("node list is non-empty")
}

/// Restrict `grid` to the index-space neighborhood of `center`.
///
/// Numeric axes keep values within `radius[axis]` index steps of the
/// center value. Categorical axes collapse to the center value at radius 0
/// and stay whole otherwise. Depth moves by at most one layer. Node lists
/// use the `nodes` radius; layers deeper than the center are windowed
/// around the center's last width.
pub fn neighborhood(grid: &GridSpec, center: &DfnnHyperparameters, radius: &Radius) -> Result<GridSpec, SearchError> {
    let index = grid
        .index_of(center)
        .ok_or_else(|| SearchError::CenterNotOnGrid(format!("{center:?}")))?;
    let r = |a: AxisName| radius.get(&a).copied().unwrap_or(0);
    let depth = center.nhl();
    let depth_step = r(AxisName::Nhl).min(1) as usize;
    let nhl: Vec<usize> = grid.nhl.iter().copied().filter(|&d| d.abs_diff(depth) <= depth_step).collect();
    let max_depth = *nhl.last().expect("center depth is kept");
    let last_width = *center.nodes.last().expect("at least one hidden layer");
    let layer_nodes = (0..max_depth)
        .map(|l| {
            let list = &grid.layer_nodes[l];
            let c = if l < depth { index.nodes[l] } else { nearest(list, last_width) };
            window(list, c, r(AxisName::Nodes))
        })
        .collect();
    let a = &index.axes;
    let out = GridSpec {
        nhl,
        layer_nodes,
        af: keep_axis(&grid.af, a[0], r(AxisName::Af), true),
        ki: keep_axis(&grid.ki, a[1], r(AxisName::Ki), true),
        opt: keep_axis(&grid.opt, a[2], r(AxisName::Opt), true),
        lr: keep_axis(&grid.lr, a[3], r(AxisName::Lr), false),
        mom: keep_axis(&grid.mom, a[4], r(AxisName::Mom), false),
        decay: keep_axis(&grid.decay, a[5], r(AxisName::Decay), false),
        dropout: keep_axis(&grid.dropout, a[6], r(AxisName::Dropout), false),
        epochs: keep_axis(&grid.epochs, a[7], r(AxisName::Epochs), false),
        batch_size: keep_axis(&grid.batch_size, a[8], r(AxisName::BatchSize), false),
        l1: keep_axis(&grid.l1, a[9], r(AxisName::L1), false),
        l2: keep_axis(&grid.l2, a[10], r(AxisName::L2), false),
    };
    out.validate()?;
    Ok(out)
}

/// L1 distance between two settings in index space of `grid`.
///
/// A hidden layer present in only one of the two settings contributes 1.
/// Returns `None` if either setting is off the grid.
pub fn index_distance(grid: &GridSpec, a: &DfnnHyperparameters, b: &DfnnHyperparameters) -> Option<u64> {
    let ia = grid.index_of(a)?;
    let ib = grid.index_of(b)?;
    let mut d = ia.nhl_pos.abs_diff(ib.nhl_pos) as u64;
    for l in 0..ia.nodes.len().max(ib.nodes.len()) {
        d += match (ia.nodes.get(l), ib.nodes.get(l)) {
            (Some(x), Some(y)) => x.abs_diff(*y) as u64,
            _ => 1,
        };
    }
    d += ia.axes.iter().zip(&ib.axes).map(|(x, y)| x.abs_diff(*y) as u64).sum::<u64>();
    Some(d)
}

fn better<R: Scored>(candidate: &R, incumbent: &R) -> bool {
    let (c, i) = (candidate.score(), incumbent.score());
    c > i || (c == i && candidate.setting_id() < incumbent.setting_id()) || (i.is_nan() && !c.is_nan())
}

/// Best-scoring row; ties go to the lower setting id.
pub fn derive_sweet_spot<R: Scored>(rows: &[R]) -> Result<&R, SearchError> {
    let mut best = rows.first().ok_or(SearchError::EmptyLedger)?;
    for row in &rows[1..] {
        if better(row, best) {
            best = row;
        }
    }
    Ok(best)
}

/// Best-scoring row at index distance at least `min_distance` from
/// `prev_center`. Rows that are not on `grid` are skipped.
pub fn olo_jump<'a, R: Scored>(
    rows: &'a [R],
    grid: &GridSpec,
    prev_center: &DfnnHyperparameters,
    min_distance: u64,
) -> Result<&'a R, SearchError> {
    if rows.is_empty() {
        return Err(SearchError::EmptyLedger);
    }
    let mut best: Option<&R> = None;
    for row in rows {
        match index_distance(grid, row.hyperparameters(), prev_center) {
            Some(d) if d >= min_distance => {
                if best.is_none_or(|b| better(row, b)) {
                    best = Some(row);
                }
            }
            _ => {}
        }
    }
    best.ok_or(SearchError::NoCandidateOutsideNeighborhood { min_distance })
}
