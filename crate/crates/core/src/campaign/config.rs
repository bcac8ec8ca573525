use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::rtps::DEFAULT_ALPHA;
use super::CampaignError;
use crate::dataset::SynthSpec;
use crate::dfnn::{Bounds, DfnnHyperparameters};
use crate::searchspace::{AxisName, GridSpec, Radius};
use crate::seed::sha256_hex;

pub const THREADS_ENV: &str = "GRIDSMITH_THREADS";

/// How cycle budgets are measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ClockMode {
    /// Elapsed real time; workers stop claiming settings once the budget
    /// has passed.
    Wall,
    /// Each setting is charged a deterministic cost proportional to its
    /// training work and settings are admitted while the serial sum of
    /// those costs stays below the budget. Ledgers then depend only on
    /// the configuration, not on timing or worker count.
    Virtual { seconds_per_unit: f64 },
}

impl Default for ClockMode {
    fn default() -> Self {
        ClockMode::Wall
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Ssgs,
    Olo,
    Rgs,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Ssgs => "ssgs",
            Strategy::Olo => "olo",
            Strategy::Rgs => "rgs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage1Config {
    /// Wide value lists, in grid JSON form. Every hidden layer must share
    /// one node list.
    pub axes: serde_json::Value,
    pub baseline: DfnnHyperparameters,
    pub budget_seconds: f64,
    /// Axes to sweep; all thirteen when absent.
    #[serde(default)]
    pub sweep: Option<Vec<AxisName>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage2Config {
    pub budget_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    pub strategy: Strategy,
    pub budget_seconds: f64,
    /// Neighborhood radius for SSGS and OLO.
    #[serde(default)]
    pub radius: BTreeMap<AxisName, u32>,
    /// OLO only.
    #[serde(default)]
    pub min_distance: Option<u64>,
    /// RGS only; defaults to what the budget allows.
    #[serde(default)]
    pub sample_n: Option<u64>,
}

impl CycleConfig {
    pub fn radius(&self) -> Radius {
        self.radius.clone()
    }
}

/// Where the data comes from: a CSV with its schema, or the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSource {
    Files { dataset: PathBuf, schema: PathBuf },
    Synthetic { synth: SynthSpec, synth_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub data: DataSource,
    /// Seed of the train-test/validation split; the campaign seed when
    /// absent.
    #[serde(default)]
    pub split_seed: Option<u64>,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub clock: ClockMode,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_alpha")]
    pub rtps_alpha: f64,
    /// Seconds per setting before any measurement; a baseline probe is
    /// timed when absent.
    #[serde(default)]
    pub initial_rtps: Option<f64>,
    pub stage1: Stage1Config,
    pub stage2: Stage2Config,
    #[serde(default = "default_cycles")]
    pub stage3: Vec<CycleConfig>,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

/// SSGS three times, OLO twice, then RGS, each with a 60 s budget.
pub fn default_cycles() -> Vec<CycleConfig> {
    let ssgs = |r: u32| CycleConfig {
        strategy: Strategy::Ssgs,
        budget_seconds: 60.0,
        radius: AxisName::ALL.iter().map(|&a| (a, r)).collect(),
        min_distance: None,
        sample_n: None,
    };
    let olo = CycleConfig {
        strategy: Strategy::Olo,
        budget_seconds: 60.0,
        radius: AxisName::ALL.iter().map(|&a| (a, 1)).collect(),
        min_distance: Some(4),
        sample_n: None,
    };
    let rgs = CycleConfig {
        strategy: Strategy::Rgs,
        budget_seconds: 60.0,
        radius: BTreeMap::new(),
        min_distance: None,
        sample_n: None,
    };
    vec![ssgs(2), ssgs(1), ssgs(1), olo.clone(), olo, rgs]
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        let config: CampaignConfig =
            serde_json::from_str(text).map_err(|e| CampaignError::Config(format!("campaign config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Read a config; relative data paths resolve against its directory.
    pub fn from_file(path: &Path) -> Result<Self, CampaignError> {
        let text = fs::read_to_string(path).map_err(|source| CampaignError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config = Self::from_json(&text)?;
        if let DataSource::Files { dataset, schema } = &mut config.data {
            let base = path.parent().unwrap_or(Path::new("."));
            for p in [dataset, schema] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Short content hash for logs.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())[..16].to_string()
    }

    pub fn wide_grid(&self) -> Result<GridSpec, CampaignError> {
        let grid = GridSpec::from_json(&self.stage1.axes.to_string())?;
        if grid.layer_nodes.windows(2).any(|w| w[0] != w[1]) {
            return Err(CampaignError::Config("stage1 axes must use one shared node list".into()));
        }
        Ok(grid)
    }

    pub fn sweep_axes(&self) -> Vec<AxisName> {
        self.stage1.sweep.clone().unwrap_or_else(|| AxisName::ALL.to_vec())
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: String| Err(CampaignError::Config(m));
        if !(self.rtps_alpha > 0.0 && self.rtps_alpha <= 1.0) {
            return bad(format!("rtps_alpha {} outside (0, 1]", self.rtps_alpha));
        }
        if let Some(r) = self.initial_rtps {
            if !(r > 0.0 && r.is_finite()) {
                return bad("initial_rtps must be positive".into());
            }
        }
        if let ClockMode::Virtual { seconds_per_unit } = self.clock {
            if !(seconds_per_unit > 0.0 && seconds_per_unit.is_finite()) {
                return bad("seconds_per_unit must be positive".into());
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let budgets = std::iter::once(("stage1".to_string(), self.stage1.budget_seconds))
            .chain(std::iter::once(("stage2".to_string(), self.stage2.budget_seconds)))
            .chain(self.stage3.iter().enumerate().map(|(i, c)| (format!("stage3-c{}", i + 1), c.budget_seconds)));
        for (label, b) in budgets {
            if !(b > 0.0 && b.is_finite()) {
                return bad(format!("{label}: budget_seconds must be positive"));
            }
        }
        for (i, c) in self.stage3.iter().enumerate() {
            if c.strategy == Strategy::Olo && c.min_distance.is_none() {
                return bad(format!("stage3-c{}: olo needs min_distance", i + 1));
            }
        }
        let grid = self.wide_grid()?;
        grid.check_bounds(&self.bounds, None)?;
        if !grid.contains(&self.stage1.baseline) {
            return bad("stage1 baseline is not on the stage1 axes".into());
        }
        self.bounds.check(&self.stage1.baseline, None)?;
        Ok(())
    }

    /// Worker count: the environment override, then the config, then the
    /// number of available cores.
    pub fn resolved_workers(&self) -> usize {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .or(self.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
