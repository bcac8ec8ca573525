//! Hyperparameter grids and the operations campaigns need on them.
//!
//! A [`GridSpec`] lists admissible values per hyperparameter. Its settings
//! are ordered canonically (structure outermost, then the eleven remaining
//! axes from `af` to `l2`) and identified by their rank, an arbitrary
//! precision [`SettingId`].

mod grid;
mod local;
mod sample;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

pub use grid::{GridSpec, SettingIndex, SettingIter};
pub use local::{derive_sweet_spot, index_distance, neighborhood, olo_jump, Radius, Scored};
pub use sample::{sample_rgs, uniform_below};

use crate::dfnn::DfnnHyperparameters;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("range [{offset}, {offset}+{limit}) exceeds pool of {pool}")]
    RangeOutOfPool { offset: BigUint, limit: usize, pool: BigUint },
    #[error("cannot draw {n} distinct settings from a pool of {pool}")]
    NTooLarge { n: usize, pool: BigUint },
    #[error("center not on grid: {0}")]
    CenterNotOnGrid(String),
    #[error("no recorded setting at index distance >= {min_distance} from the previous center")]
    NoCandidateOutsideNeighborhood { min_distance: u64 },
    #[error("ledger is empty")]
    EmptyLedger,
    #[error("unknown hyperparameter {0:?}")]
    UnknownAxis(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("grid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Names of the thirteen hyperparameters in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Nhl,
    Nodes,
    Af,
    Ki,
    Opt,
    Lr,
    Mom,
    Decay,
    Dropout,
    Epochs,
    BatchSize,
    L1,
    L2,
}

impl AxisName {
    pub const ALL: [AxisName; 13] = [
        AxisName::Nhl,
        AxisName::Nodes,
        AxisName::Af,
        AxisName::Ki,
        AxisName::Opt,
        AxisName::Lr,
        AxisName::Mom,
        AxisName::Decay,
        AxisName::Dropout,
        AxisName::Epochs,
        AxisName::BatchSize,
        AxisName::L1,
        AxisName::L2,
    ];

    /// The eleven axes after the structural pair, most significant first.
    pub const NONSTRUCTURAL: [AxisName; 11] = [
        AxisName::Af,
        AxisName::Ki,
        AxisName::Opt,
        AxisName::Lr,
        AxisName::Mom,
        AxisName::Decay,
        AxisName::Dropout,
        AxisName::Epochs,
        AxisName::BatchSize,
        AxisName::L1,
        AxisName::L2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Nhl => "nhl",
            AxisName::Nodes => "nodes",
            AxisName::Af => "af",
            AxisName::Ki => "ki",
            AxisName::Opt => "opt",
            AxisName::Lr => "lr",
            AxisName::Mom => "mom",
            AxisName::Decay => "decay",
            AxisName::Dropout => "dropout",
            AxisName::Epochs => "epochs",
            AxisName::BatchSize => "batch_size",
            AxisName::L1 => "l1",
            AxisName::L2 => "l2",
        }
    }

    pub fn is_categorical(self) -> bool {
        matches!(self, AxisName::Af | AxisName::Ki | AxisName::Opt)
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SearchError::UnknownAxis(s.to_string()))
    }
}

/// Canonical rank of a setting within a grid.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SettingId(pub BigUint);

impl SettingId {
    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }
}

impl From<u64> for SettingId {
    fn from(v: u64) -> Self {
        SettingId(BigUint::from(v))
    }
}

impl From<BigUint> for SettingId {
    fn from(v: BigUint) -> Self {
        SettingId(v)
    }
}

impl fmt::Display for SettingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for SettingId {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim().parse().map(SettingId)
    }
}

impl Serialize for SettingId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for SettingId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A concrete value assignment together with its rank in the grid it was
/// drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterSetting {
    pub id: SettingId,
    pub hp: DfnnHyperparameters,
}
