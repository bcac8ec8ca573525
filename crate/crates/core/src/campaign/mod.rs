//! The staged search: Stage 1 per-axis sweeps that pick proper values,
//! Stage 2 sampling of the proper pool that calibrates running time and
//! finds a sweet spot, then Stage 3 cycles of sweet-spot, out-of-local-
//! optimum and randomized searches, each under its own time budget.

mod config;
mod ledger;
mod rtps;
mod runner;
mod scheduler;
mod stages;

pub use config::{
    default_cycles, CampaignConfig, ClockMode, CycleConfig, DataSource, Stage1Config, Stage2Config, Strategy,
    THREADS_ENV,
};
pub use ledger::{CampaignLedger, LedgerError, LedgerRow, LEDGER_COLUMNS};
pub use rtps::{cap_settings, estimate_total_time, RtpsEstimator, TotalTime, DEFAULT_ALPHA, SECONDS_PER_YEAR};
pub use runner::{
    cycle_label, ledger_paths, load_data, Campaign, CampaignRun, CycleMeta, StageSelector, BEST_MODEL_FILE,
    PROPER_GRID_FILE, SPLIT_FILE,
};
pub use scheduler::{replay, CycleRun, RunContext};
pub use stages::{
    evenly_spaced, proper_indices, run_stage1, run_stage2, run_stage3_cycle, CycleOutcome, Stage1Outcome,
};

use crate::analytics::AnalyticsError;
use crate::dataset::DatasetError;
use crate::dfnn::DfnnError;
use crate::evaluation::EvaluationError;
use crate::searchspace::SearchError;

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("{0}")]
    Config(String),
    #[error(
        "{cycle}: budget of {budget_seconds} s holds fewer than {needed} settings at {rtps:.3} s per setting"
    )]
    BudgetTooSmall {
        cycle: String,
        budget_seconds: f64,
        rtps: f64,
        needed: u64,
    },
    #[error("{cycle} needs {path}, which does not exist; run the earlier stage first")]
    MissingDependency { cycle: String, path: String },
    #[error("setting {setting}: {source}")]
    Evaluation { setting: String, source: EvaluationError },
    #[error("refit of the best setting: {0}")]
    Refit(EvaluationError),
    #[error("{cycle}: {source}")]
    Cycle { cycle: String, source: Box<CampaignError> },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Dfnn(#[from] DfnnError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CampaignError {
    /// `true` for faults in the inputs rather than in the program.
    pub fn is_user_error(&self) -> bool {
        match self {
            CampaignError::Evaluation { .. } | CampaignError::Refit(_) => false,
            CampaignError::Cycle { source, .. } => source.is_user_error(),
            _ => true,
        }
    }

    fn in_cycle(self, cycle: &str) -> Self {
        match self {
            e @ (CampaignError::Cycle { .. }
            | CampaignError::BudgetTooSmall { .. }
            | CampaignError::MissingDependency { .. }) => e,
            e => CampaignError::Cycle {
                cycle: cycle.to_string(),
                source: Box::new(e),
            },
        }
    }
}
