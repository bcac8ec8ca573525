use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{AxisName, HyperparameterSetting, SearchError, SettingId};
use crate::dfnn::{Activation, Bounds, DfnnHyperparameters, Initializer, Optimizer};

/// Admissible values for every hyperparameter.
///
/// The structural block allows a separate node-count list per hidden layer;
/// `layer_nodes.len()` equals the largest entry of `nhl`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nhl: Vec<usize>,
    pub layer_nodes: Vec<Vec<u32>>,
    pub af: Vec<Activation>,
    pub ki: Vec<Initializer>,
    pub opt: Vec<Optimizer>,
    pub lr: Vec<f64>,
    pub mom: Vec<f64>,
    pub decay: Vec<f64>,
    pub dropout: Vec<f64>,
    pub epochs: Vec<u32>,
    pub batch_size: Vec<u32>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
}

/// Position of a setting on each axis of a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingIndex {
    /// Index into `GridSpec::nhl`.
    pub nhl_pos: usize,
    /// One index per hidden layer into that layer's node list.
    pub nodes: Vec<usize>,
    /// Indices for the eleven nonstructural axes, `af` first.
    pub axes: [usize; 11],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructuralFile {
    nhl: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layer_nodes: Option<Vec<Vec<u32>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    structural: StructuralFile,
    af: Vec<Activation>,
    ki: Vec<Initializer>,
    opt: Vec<Optimizer>,
    lr: Vec<f64>,
    mom: Vec<f64>,
    decay: Vec<f64>,
    dropout: Vec<f64>,
    epochs: Vec<u32>,
    batch_size: Vec<u32>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

fn position_f64(values: &[f64], v: f64) -> Option<usize> {
    values.iter().position(|&x| x == v)
}

fn position<T: PartialEq>(values: &[T], v: &T) -> Option<usize> {
    values.iter().position(|x| x == v)
}

fn ascending<T: PartialOrd>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

fn distinct<T: PartialEq>(values: &[T]) -> bool {
    values.iter().enumerate().all(|(i, v)| !values[..i].contains(v))
}

impl GridSpec {
    /// Grid whose only setting is `hp`.
    pub fn single(hp: &DfnnHyperparameters) -> Self {
        Self {
            nhl: vec![hp.nhl()],
            layer_nodes: hp.nodes.iter().map(|&n| vec![n]).collect(),
            af: vec![hp.af],
            ki: vec![hp.ki],
            opt: vec![hp.opt],
            lr: vec![hp.lr],
            mom: vec![hp.mom],
            decay: vec![hp.decay],
            dropout: vec![hp.dropout],
            epochs: vec![hp.epochs],
            batch_size: vec![hp.batch_size],
            l1: vec![hp.l1],
            l2: vec![hp.l2],
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidGrid(m));
        if self.nhl.is_empty() || !ascending(&self.nhl) || self.nhl[0] < 1 || *self.nhl.last().unwrap() > 4 {
            return bad("nhl must be a non-empty ascending subset of 1..=4".into());
        }
        let depth = *self.nhl.last().unwrap();
        if self.layer_nodes.len() != depth {
            return bad(format!(
                "{} node lists given for up to {depth} hidden layers",
                self.layer_nodes.len()
            ));
        }
        for (l, list) in self.layer_nodes.iter().enumerate() {
            if list.is_empty() || !ascending(list) || list[0] == 0 {
                return bad(format!("node list for layer {} must be non-empty, ascending and positive", l + 1));
            }
        }
        for axis in AxisName::NONSTRUCTURAL {
            if self.axis_len(axis) == 0 {
                return bad(format!("axis {axis} has no values"));
            }
        }
        if !(distinct(&self.af) && distinct(&self.ki) && distinct(&self.opt)) {
            return bad("categorical axes must not repeat values".into());
        }
        let numeric = [
            (AxisName::Lr, &self.lr),
            (AxisName::Mom, &self.mom),
            (AxisName::Decay, &self.decay),
            (AxisName::Dropout, &self.dropout),
            (AxisName::L1, &self.l1),
            (AxisName::L2, &self.l2),
        ];
        for (axis, values) in numeric {
            if values.iter().any(|v| !v.is_finite()) || !ascending(values) {
                return bad(format!("axis {axis} must be finite and strictly ascending"));
            }
        }
        if !ascending(&self.epochs) || !ascending(&self.batch_size) {
            return bad("epochs and batch_size must be strictly ascending".into());
        }
        Ok(())
    }

    /// Check every grid value against campaign bounds.
    pub fn check_bounds(&self, bounds: &Bounds, case_count: Option<usize>) -> Result<(), SearchError> {
        fn within<T: PartialOrd + std::fmt::Display + Copy>(
            axis: AxisName,
            values: &[T],
            (lo, hi): (T, T),
        ) -> Result<(), SearchError> {
            match values.iter().find(|&&v| v < lo || v > hi) {
                Some(v) => Err(SearchError::InvalidGrid(format!("{axis} value {v} outside [{lo}, {hi}]"))),
                None => Ok(()),
            }
        }
        within(AxisName::Nhl, &self.nhl, bounds.nhl)?;
        for list in &self.layer_nodes {
            within(AxisName::Nodes, list, bounds.nodes)?;
        }
        within(AxisName::Lr, &self.lr, bounds.lr)?;
        within(AxisName::Mom, &self.mom, bounds.mom)?;
        within(AxisName::Decay, &self.decay, bounds.decay)?;
        within(AxisName::Dropout, &self.dropout, bounds.dropout)?;
        within(AxisName::Epochs, &self.epochs, bounds.epochs)?;
        let cap = case_count.map_or(bounds.batch_size.1, |c| bounds.batch_size.1.min(c as u32));
        within(AxisName::BatchSize, &self.batch_size, (bounds.batch_size.0, cap))?;
        within(AxisName::L1, &self.l1, bounds.l1)?;
        within(AxisName::L2, &self.l2, bounds.l2)?;
        Ok(())
    }

    /// Number of values on an axis. For `Nodes` this is the first layer's
    /// list length.
    pub fn axis_len(&self, axis: AxisName) -> usize {
        match axis {
            AxisName::Nhl => self.nhl.len(),
            AxisName::Nodes => self.layer_nodes.first().map_or(0, Vec::len),
            AxisName::Af => self.af.len(),
            AxisName::Ki => self.ki.len(),
            AxisName::Opt => self.opt.len(),
            AxisName::Lr => self.lr.len(),
            AxisName::Mom => self.mom.len(),
            AxisName::Decay => self.decay.len(),
            AxisName::Dropout => self.dropout.len(),
            AxisName::Epochs => self.epochs.len(),
            AxisName::BatchSize => self.batch_size.len(),
            AxisName::L1 => self.l1.len(),
            AxisName::L2 => self.l2.len(),
        }
    }

    /// Value labels of an axis as they appear in ledgers.
    pub fn axis_labels(&self, axis: AxisName) -> Vec<String> {
        fn labels<T: ToString>(v: &[T]) -> Vec<String> {
            v.iter().map(T::to_string).collect()
        }
        match axis {
            AxisName::Nhl => labels(&self.nhl),
            AxisName::Nodes => self.layer_nodes.first().map_or_else(Vec::new, |l| labels(l)),
            AxisName::Af => labels(&self.af),
            AxisName::Ki => labels(&self.ki),
            AxisName::Opt => labels(&self.opt),
            AxisName::Lr => labels(&self.lr),
            AxisName::Mom => labels(&self.mom),
            AxisName::Decay => labels(&self.decay),
            AxisName::Dropout => labels(&self.dropout),
            AxisName::Epochs => labels(&self.epochs),
            AxisName::BatchSize => labels(&self.batch_size),
            AxisName::L1 => labels(&self.l1),
            AxisName::L2 => labels(&self.l2),
        }
    }

    /// Index of `hp`'s value on a nonstructural axis.
    pub fn axis_index(&self, axis: AxisName, hp: &DfnnHyperparameters) -> Option<usize> {
        match axis {
            AxisName::Nhl => position(&self.nhl, &hp.nhl()),
            AxisName::Nodes => None,
            AxisName::Af => position(&self.af, &hp.af),
            AxisName::Ki => position(&self.ki, &hp.ki),
            AxisName::Opt => position(&self.opt, &hp.opt),
            AxisName::Lr => position_f64(&self.lr, hp.lr),
            AxisName::Mom => position_f64(&self.mom, hp.mom),
            AxisName::Decay => position_f64(&self.decay, hp.decay),
            AxisName::Dropout => position_f64(&self.dropout, hp.dropout),
            AxisName::Epochs => position(&self.epochs, &hp.epochs),
            AxisName::BatchSize => position(&self.batch_size, &hp.batch_size),
            AxisName::L1 => position_f64(&self.l1, hp.l1),
            AxisName::L2 => position_f64(&self.l2, hp.l2),
        }
    }

    /// Replace `hp`'s value on `axis` with the grid value at `index`.
    ///
    /// `Nodes` sets every hidden layer to the first layer's value at
    /// `index`; `Nhl` truncates the layer list or extends it by repeating
    /// the last width.
    pub fn assign(&self, axis: AxisName, index: usize, hp: &mut DfnnHyperparameters) {
        match axis {
            AxisName::Nhl => {
                let depth = self.nhl[index];
                let last = *hp.nodes.last().expect("at least one hidden layer");
                hp.nodes.resize(depth, last);
            }
            AxisName::Nodes => {
                let width = self.layer_nodes[0][index];
                hp.nodes.iter_mut().for_each(|n| *n = width);
            }
            AxisName::Af => hp.af = self.af[index],
            AxisName::Ki => hp.ki = self.ki[index],
            AxisName::Opt => hp.opt = self.opt[index],
            AxisName::Lr => hp.lr = self.lr[index],
            AxisName::Mom => hp.mom = self.mom[index],
            AxisName::Decay => hp.decay = self.decay[index],
            AxisName::Dropout => hp.dropout = self.dropout[index],
            AxisName::Epochs => hp.epochs = self.epochs[index],
            AxisName::BatchSize => hp.batch_size = self.batch_size[index],
            AxisName::L1 => hp.l1 = self.l1[index],
            AxisName::L2 => hp.l2 = self.l2[index],
        }
    }

    /// Keep only the listed value indices of one axis, in their original
    /// order. For `Nodes` the kept first-layer values are filtered out of
    /// every layer's list.
    pub fn restrict(&self, axis: AxisName, keep: &[usize]) -> Result<GridSpec, SearchError> {
        fn pick<T: Clone>(values: &[T], keep: &[usize]) -> Vec<T> {
            values.iter().enumerate().filter(|(i, _)| keep.contains(i)).map(|(_, v)| v.clone()).collect()
        }
        let mut g = self.clone();
        match axis {
            AxisName::Nhl => {
                g.nhl = pick(&self.nhl, keep);
                if let Some(&depth) = g.nhl.last() {
                    g.layer_nodes.truncate(depth);
                }
            }
            AxisName::Nodes => {
                let values = pick(&self.layer_nodes[0], keep);
                for list in &mut g.layer_nodes {
                    list.retain(|v| values.contains(v));
                }
            }
            AxisName::Af => g.af = pick(&self.af, keep),
            AxisName::Ki => g.ki = pick(&self.ki, keep),
            AxisName::Opt => g.opt = pick(&self.opt, keep),
            AxisName::Lr => g.lr = pick(&self.lr, keep),
            AxisName::Mom => g.mom = pick(&self.mom, keep),
            AxisName::Decay => g.decay = pick(&self.decay, keep),
            AxisName::Dropout => g.dropout = pick(&self.dropout, keep),
            AxisName::Epochs => g.epochs = pick(&self.epochs, keep),
            AxisName::BatchSize => g.batch_size = pick(&self.batch_size, keep),
            AxisName::L1 => g.l1 = pick(&self.l1, keep),
            AxisName::L2 => g.l2 = pick(&self.l2, keep),
        }
        g.validate()?;
        Ok(g)
    }

    fn block_size(&self, depth: usize) -> BigUint {
        self.layer_nodes[..depth].iter().map(|l| BigUint::from(l.len())).product()
    }

    /// Number of distinct network structures.
    pub fn structure_count(&self) -> BigUint {
        self.nhl.iter().map(|&d| self.block_size(d)).sum()
    }

    /// Product of the eleven nonstructural axis lengths.
    pub fn nonstructural_count(&self) -> BigUint {
        AxisName::NONSTRUCTURAL.iter().map(|&a| BigUint::from(self.axis_len(a))).product()
    }

    pub fn pool_size(&self) -> BigUint {
        self.structure_count() * self.nonstructural_count()
    }

    pub fn index_of(&self, hp: &DfnnHyperparameters) -> Option<SettingIndex> {
        let nhl_pos = position(&self.nhl, &hp.nhl())?;
        let nodes = hp
            .nodes
            .iter()
            .enumerate()
            .map(|(l, n)| position(&self.layer_nodes[l], n))
            .collect::<Option<Vec<_>>>()?;
        let mut axes = [0; 11];
        for (slot, axis) in axes.iter_mut().zip(AxisName::NONSTRUCTURAL) {
            *slot = self.axis_index(axis, hp)?;
        }
        Some(SettingIndex { nhl_pos, nodes, axes })
    }

    pub fn contains(&self, hp: &DfnnHyperparameters) -> bool {
        self.index_of(hp).is_some()
    }

    pub fn build(&self, index: &SettingIndex) -> DfnnHyperparameters {
        let a = &index.axes;
        DfnnHyperparameters {
            nodes: index.nodes.iter().enumerate().map(|(l, &i)| self.layer_nodes[l][i]).collect(),
            af: self.af[a[0]],
            ki: self.ki[a[1]],
            opt: self.opt[a[2]],
            lr: self.lr[a[3]],
            mom: self.mom[a[4]],
            decay: self.decay[a[5]],
            dropout: self.dropout[a[6]],
            epochs: self.epochs[a[7]],
            batch_size: self.batch_size[a[8]],
            l1: self.l1[a[9]],
            l2: self.l2[a[10]],
        }
    }

    pub fn rank_index(&self, index: &SettingIndex) -> SettingId {
        let mut structural: BigUint = self.nhl[..index.nhl_pos].iter().map(|&d| self.block_size(d)).sum();
        let mut within = BigUint::zero();
        for (l, &i) in index.nodes.iter().enumerate() {
            within = within * self.layer_nodes[l].len() + i;
        }
        structural += within;
        let mut rest = BigUint::zero();
        for (axis, &i) in AxisName::NONSTRUCTURAL.iter().zip(&index.axes) {
            rest = rest * self.axis_len(*axis) + i;
        }
        SettingId(structural * self.nonstructural_count() + rest)
    }

    /// Canonical rank of `hp`, or `None` when it is not on the grid.
    pub fn rank(&self, hp: &DfnnHyperparameters) -> Option<SettingId> {
        self.index_of(hp).map(|ix| self.rank_index(&ix))
    }

    pub fn unrank_index(&self, id: &SettingId) -> Result<SettingIndex, SearchError> {
        let pool = self.pool_size();
        if id.0 >= pool {
            return Err(SearchError::RangeOutOfPool {
                offset: id.0.clone(),
                limit: 1,
                pool,
            });
        }
        let ns = self.nonstructural_count();
        let mut rest = &id.0 % &ns;
        let mut structural = &id.0 / &ns;
        let mut axes = [0; 11];
        for (slot, axis) in axes.iter_mut().zip(AxisName::NONSTRUCTURAL).rev() {
            let len = BigUint::from(self.axis_len(axis));
            *slot = (&rest % &len).to_usize().expect("index fits usize");
            rest /= len;
        }
        for (nhl_pos, &depth) in self.nhl.iter().enumerate() {
            let block = self.block_size(depth);
            if structural < block {
                let mut nodes = vec![0; depth];
                for l in (0..depth).rev() {
                    let len = BigUint::from(self.layer_nodes[l].len());
                    nodes[l] = (&structural % &len).to_usize().expect("index fits usize");
                    structural /= len;
                }
                return Ok(SettingIndex { nhl_pos, nodes, axes });
            }
            structural -= block;
        }
        unreachable!("id below pool size always lands in a structural block")
    }

    pub fn unrank(&self, id: &SettingId) -> Result<DfnnHyperparameters, SearchError> {
        self.unrank_index(id).map(|ix| self.build(&ix))
    }

    /// Advance to the next index in canonical order. Returns `false` after
    /// the last setting.
    pub fn advance(&self, index: &mut SettingIndex) -> bool {
        for (slot, axis) in index.axes.iter_mut().zip(AxisName::NONSTRUCTURAL).rev() {
            *slot += 1;
            if *slot < self.axis_len(axis) {
                return true;
            }
            *slot = 0;
        }
        for l in (0..index.nodes.len()).rev() {
            index.nodes[l] += 1;
            if index.nodes[l] < self.layer_nodes[l].len() {
                return true;
            }
            index.nodes[l] = 0;
        }
        index.nhl_pos += 1;
        match self.nhl.get(index.nhl_pos) {
            Some(&depth) => {
                index.nodes = vec![0; depth];
                true
            }
            None => false,
        }
    }

    /// Stream settings in canonical order starting at `offset`.
    pub fn iter_from(&self, offset: &BigUint) -> SettingIter<'_> {
        let next = self.unrank_index(&SettingId(offset.clone())).ok();
        SettingIter {
            grid: self,
            next,
            id: offset.clone(),
        }
    }

    pub fn iter(&self) -> SettingIter<'_> {
        self.iter_from(&BigUint::zero())
    }

    /// Settings with ranks in `[offset, offset + limit)`.
    pub fn enumerate(&self, offset: &BigUint, limit: usize) -> Result<Vec<HyperparameterSetting>, SearchError> {
        let pool = self.pool_size();
        if offset + BigUint::from(limit) > pool {
            return Err(SearchError::RangeOutOfPool {
                offset: offset.clone(),
                limit,
                pool,
            });
        }
        Ok(self.iter_from(offset).take(limit).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, SearchError> {
        let file: GridFile = serde_json::from_str(text)?;
        let depth = file.structural.nhl.iter().copied().max().unwrap_or(0);
        let layer_nodes = match (file.structural.nodes, file.structural.layer_nodes) {
            (Some(nodes), None) => vec![nodes; depth],
            (None, Some(lists)) => lists,
            _ => {
                return Err(SearchError::InvalidGrid(
                    "structural block needs exactly one of \"nodes\" or \"layer_nodes\"".into(),
                ))
            }
        };
        let grid = GridSpec {
            nhl: file.structural.nhl,
            layer_nodes,
            af: file.af,
            ki: file.ki,
            opt: file.opt,
            lr: file.lr,
            mom: file.mom,
            decay: file.decay,
            dropout: file.dropout,
            epochs: file.epochs,
            batch_size: file.batch_size,
            l1: file.l1,
            l2: file.l2,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, SearchError> {
        let text = fs::read_to_string(path).map_err(|source| SearchError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        let shared = self.layer_nodes.windows(2).all(|w| w[0] == w[1]);
        let structural = if shared {
            StructuralFile {
                nhl: self.nhl.clone(),
                nodes: Some(self.layer_nodes.first().cloned().unwrap_or_default()),
                layer_nodes: None,
            }
        } else {
            StructuralFile {
                nhl: self.nhl.clone(),
                nodes: None,
                layer_nodes: Some(self.layer_nodes.clone()),
            }
        };
        let file = GridFile {
            structural,
            af: self.af.clone(),
            ki: self.ki.clone(),
            opt: self.opt.clone(),
            lr: self.lr.clone(),
            mom: self.mom.clone(),
            decay: self.decay.clone(),
            dropout: self.dropout.clone(),
            epochs: self.epochs.clone(),
            batch_size: self.batch_size.clone(),
            l1: self.l1.clone(),
            l2: self.l2.clone(),
        };
        serde_json::to_string_pretty(&file).expect("grid serializes")
    }
}

/// Streaming iterator over a grid in canonical order.
pub struct SettingIter<'a> {
    grid: &'a GridSpec,
    next: Option<SettingIndex>,
    id: BigUint,
}

impl Iterator for SettingIter<'_> {
    type Item = HyperparameterSetting;

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.next.as_mut()?;
        let item = HyperparameterSetting {
            id: SettingId(self.id.clone()),
            hp: self.grid.build(index),
        };
        if !self.grid.advance(index) {
            self.next = None;
        }
        self.id += BigUint::one();
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{base_hyperparameters, table1_grid};

    fn tiny() -> GridSpec {
        let mut g = GridSpec::single(&base_hyperparameters());
        g.nhl = vec![1, 2];
        g.layer_nodes = vec![vec![2, 4], vec![3]];
        g.lr = vec![0.01, 0.1];
        g
    }

    #[test]
    fn reference_grid_counts() {
        let g = table1_grid();
        assert_eq!(g.structure_count(), BigUint::from(245_410u32));
        assert_eq!(g.nonstructural_count(), BigUint::from(1_742_400_000u64));
        assert_eq!(g.pool_size(), BigUint::from(427_602_384_000_000u64));
    }

    #[test]
    fn small_grid_enumerates_in_canonical_order() {
        let g = tiny();
        // structures: [2], [4], [2,3], [4,3]; times 2 learning rates
        assert_eq!(g.pool_size(), BigUint::from(8u32));
        let all: Vec<_> = g.iter().collect();
        assert_eq!(all.len(), 8);
        let shapes: Vec<_> = all.iter().map(|s| (s.hp.nodes.clone(), s.hp.lr)).collect();
        assert_eq!(shapes[0], (vec![2], 0.01));
        assert_eq!(shapes[1], (vec![2], 0.1));
        assert_eq!(shapes[2], (vec![4], 0.01));
        assert_eq!(shapes[4], (vec![2, 3], 0.01));
        assert_eq!(shapes[7], (vec![4, 3], 0.1));
        for s in &all {
            assert_eq!(g.rank(&s.hp).unwrap(), s.id);
        }
    }

    #[test]
    fn enumerate_prefixes_concatenate() {
        let g = tiny();
        let mut joined = g.enumerate(&BigUint::zero(), 3).unwrap();
        joined.extend(g.enumerate(&BigUint::from(3u32), 5).unwrap());
        assert_eq!(joined, g.enumerate(&BigUint::zero(), 8).unwrap());
        assert!(matches!(
            g.enumerate(&BigUint::from(5u32), 4),
            Err(SearchError::RangeOutOfPool { .. })
        ));
    }

    #[test]
    fn json_round_trip_keeps_shared_and_per_layer_lists() {
        let g = table1_grid();
        assert_eq!(GridSpec::from_json(&g.to_json_pretty()).unwrap(), g);
        let t = tiny();
        let text = t.to_json_pretty();
        assert!(text.contains("layer_nodes"));
        assert_eq!(GridSpec::from_json(&text).unwrap(), t);
    }

    #[test]
    fn json_rejects_malformed_grids() {
        let mut text = table1_grid().to_json_pretty();
        text = text.replacen("\"relu\"", "\"swish\"", 1);
        assert!(GridSpec::from_json(&text).is_err());
        let mut g = tiny();
        g.lr = vec![0.1, 0.01];
        assert!(GridSpec::from_json(&g.to_json_pretty()).is_err());
    }

    #[test]
    fn sweep_assignment_rules() {
        let g = table1_grid();
        let mut hp = g.unrank(&SettingId::from(0)).unwrap();
        hp.nodes = vec![7, 9];
        let depth4 = g.nhl.iter().position(|&d| d == 4).unwrap();
        g.assign(AxisName::Nhl, depth4, &mut hp);
        assert_eq!(hp.nodes, vec![7, 9, 9, 9]);
        g.assign(AxisName::Nhl, 0, &mut hp);
        assert_eq!(hp.nodes, vec![7]);
        g.assign(AxisName::Nodes, 1, &mut hp);
        assert_eq!(hp.nodes, vec![g.layer_nodes[0][1]]);
    }
}
