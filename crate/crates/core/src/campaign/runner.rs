use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, ClockMode, DataSource};
use super::ledger::{CampaignLedger, LedgerRow};
use super::rtps::RtpsEstimator;
use super::scheduler::RunContext;
use super::stages::{run_stage1, run_stage2, run_stage3_cycle, CycleOutcome};
use super::CampaignError;
use crate::analytics;
use crate::dataset::{load_csv, split, synth_gen, DatasetSchema, SplitPlan, TabularDataset};
use crate::dfnn::DfnnHyperparameters;
use crate::evaluation::{refit_top, validation_auc, DfnnLearner, Learner};
use crate::searchspace::{derive_sweet_spot, GridSpec};

pub const PROPER_GRID_FILE: &str = "proper_grid.json";
pub const SPLIT_FILE: &str = "split.json";
pub const BEST_MODEL_FILE: &str = "best_model.json";

pub fn cycle_label(k: usize) -> String {
    format!("stage3-c{k}")
}

/// Which part of the pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageSelector {
    All,
    Stage1,
    Stage2,
    /// One Stage 3 cycle, 1-based.
    Stage3(usize),
}

/// Side-car record written next to each ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMeta {
    pub cycle_label: String,
    pub strategy: String,
    pub budget_seconds: f64,
    /// Real time the cycle took.
    pub elapsed_seconds: f64,
    /// Sum of recorded per-setting times.
    pub charged_seconds: f64,
    pub settings: usize,
    pub skipped: usize,
    /// Estimate handed to the next cycle.
    pub rtps: RtpsEstimator,
    pub center: Option<DfnnHyperparameters>,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub workers: usize,
    pub clock: ClockMode,
}

/// Everything a pipeline run produced.
#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub ledgers: Vec<CampaignLedger>,
    pub metas: Vec<CycleMeta>,
    /// Best row over every cycle.
    pub best: Option<LedgerRow>,
    /// Validation AUC of the refit best setting.
    pub validation_auc: Option<f64>,
}

/// A configured campaign bound to its data and learner.
pub struct Campaign<L: Learner = DfnnLearner> {
    pub config: CampaignConfig,
    pub data: TabularDataset,
    pub plan: SplitPlan,
    pub learner: L,
    pub workers: usize,
    /// Refit the best setting and write `best_model.json` after a full run.
    pub refit_best: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CampaignError + '_ {
    move |source| CampaignError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CampaignError> {
    fs::write(path, text).map_err(io_err(path))
}

/// Load the campaign dataset described by `source`.
pub fn load_data(source: &DataSource) -> Result<TabularDataset, CampaignError> {
    Ok(match source {
        DataSource::Files { dataset, schema } => {
            let schema = DatasetSchema::from_json_file(schema)?;
            load_csv(dataset, &schema)?
        }
        DataSource::Synthetic { synth, synth_seed } => synth_gen(synth, *synth_seed)?,
    })
}

impl Campaign<DfnnLearner> {
    pub fn from_config(config: CampaignConfig) -> Result<Self, CampaignError> {
        let data = load_data(&config.data)?;
        Campaign::with_learner(config, data, DfnnLearner)
    }
}

impl<L: Learner> Campaign<L> {
    pub fn with_learner(config: CampaignConfig, data: TabularDataset, learner: L) -> Result<Self, CampaignError> {
        config.validate()?;
        config.wide_grid()?.check_bounds(&config.bounds, Some(data.case_count()))?;
        let plan = split(&data, config.split_seed.unwrap_or(config.seed))?;
        let workers = config.resolved_workers();
        Ok(Self {
            config,
            data,
            plan,
            learner,
            workers,
            refit_best: true,
        })
    }

    pub fn context(&self) -> RunContext<'_, L> {
        RunContext {
            data: &self.data,
            plan: &self.plan,
            learner: &self.learner,
            campaign_seed: self.config.seed,
            workers: self.workers,
            clock: self.config.clock,
        }
    }

    fn meta(&self, outcome: &CycleOutcome, strategy: &str, budget_seconds: f64) -> CycleMeta {
        CycleMeta {
            cycle_label: outcome.ledger.cycle_label.clone(),
            strategy: strategy.to_string(),
            budget_seconds,
            elapsed_seconds: outcome.elapsed_seconds,
            charged_seconds: outcome.ledger.rows.iter().map(|r| r.cv.train_seconds).sum(),
            settings: outcome.ledger.len(),
            skipped: outcome.skipped,
            rtps: outcome.rtps,
            center: outcome.center.clone(),
            seed: self.config.seed,
            dataset_fingerprint: outcome.ledger.dataset_fingerprint.clone(),
            workers: self.workers,
            clock: self.config.clock,
        }
    }

    fn save(&self, out: &Path, ledger: &CampaignLedger, meta: &CycleMeta) -> Result<(), CampaignError> {
        ledger.write(&out.join(format!("{}.csv", ledger.cycle_label)))?;
        let meta_path = out.join(format!("{}.meta.json", ledger.cycle_label));
        write_file(&meta_path, &serde_json::to_string_pretty(meta).expect("meta serializes"))
    }

    fn load_cycle(&self, out: &Path, needed_by: &str, label: &str) -> Result<(CampaignLedger, CycleMeta), CampaignError> {
        let csv = out.join(format!("{label}.csv"));
        let meta_path = out.join(format!("{label}.meta.json"));
        for p in [&csv, &meta_path] {
            if !p.exists() {
                return Err(CampaignError::MissingDependency {
                    cycle: needed_by.to_string(),
                    path: p.display().to_string(),
                });
            }
        }
        let mut ledger = CampaignLedger::read(&csv)?;
        let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        let meta: CycleMeta = serde_json::from_str(&text)
            .map_err(|e| CampaignError::Config(format!("{}: {e}", meta_path.display())))?;
        ledger.seed = meta.seed;
        ledger.dataset_fingerprint = meta.dataset_fingerprint.clone();
        Ok((ledger, meta))
    }

    fn load_proper(&self, out: &Path, needed_by: &str) -> Result<GridSpec, CampaignError> {
        let path = out.join(PROPER_GRID_FILE);
        if !path.exists() {
            return Err(CampaignError::MissingDependency {
                cycle: needed_by.to_string(),
                path: path.display().to_string(),
            });
        }
        Ok(GridSpec::from_json_file(&path)?)
    }

    fn prepare_out(&self, out: &Path) -> Result<(), CampaignError> {
        fs::create_dir_all(out).map_err(io_err(out))?;
        write_file(&out.join(SPLIT_FILE), &self.plan.to_json())?;
        write_file(&out.join("config.json"), &self.config.to_json_pretty())
    }

    pub fn stage1(&self, out: &Path) -> Result<(CampaignLedger, CycleMeta), CampaignError> {
        let c = &self.config;
        let wide = c.wide_grid()?;
        let outcome = run_stage1(
            &self.context(),
            &wide,
            &c.sweep_axes(),
            &c.stage1.baseline,
            c.stage1.budget_seconds,
            c.initial_rtps,
            c.rtps_alpha,
        )
        .map_err(|e| e.in_cycle("stage1"))?;
        write_file(&out.join(PROPER_GRID_FILE), &outcome.proper_grid.to_json_pretty())?;
        let meta = self.meta(&outcome.cycle, "sweep", c.stage1.budget_seconds);
        self.save(out, &outcome.cycle.ledger, &meta)?;
        Ok((outcome.cycle.ledger, meta))
    }

    pub fn stage2(&self, out: &Path) -> Result<(CampaignLedger, CycleMeta), CampaignError> {
        let proper = self.load_proper(out, "stage2")?;
        let (_, prev) = self.load_cycle(out, "stage2", "stage1")?;
        let budget = self.config.stage2.budget_seconds;
        let (outcome, _) =
            run_stage2(&self.context(), &proper, budget, prev.rtps).map_err(|e| e.in_cycle("stage2"))?;
        let meta = self.meta(&outcome, "grid", budget);
        self.save(out, &outcome.ledger, &meta)?;
        Ok((outcome.ledger, meta))
    }

    /// Stage 3 cycle `k` (1-based), reading every earlier ledger from `out`.
    pub fn stage3(&self, out: &Path, k: usize) -> Result<(CampaignLedger, CycleMeta), CampaignError> {
        let label = cycle_label(k);
        let cycle = self
            .config
            .stage3
            .get(k.wrapping_sub(1))
            .ok_or_else(|| CampaignError::Config(format!("config defines {} stage3 cycles", self.config.stage3.len())))?;
        let proper = self.load_proper(out, &label)?;
        let mut prior: Vec<LedgerRow> = Vec::new();
        let (stage2, mut prev) = self.load_cycle(out, &label, "stage2")?;
        prior.extend(stage2.rows);
        for j in 1..k {
            let (ledger, meta) = self.load_cycle(out, &label, &cycle_label(j))?;
            prior.extend(ledger.rows);
            prev = CycleMeta {
                center: meta.center.clone().or(prev.center),
                ..meta
            };
        }
        let prev_center = match prev.center {
            Some(c) => c,
            None => derive_sweet_spot(&prior)?.setting.hp.clone(),
        };
        let outcome = run_stage3_cycle(&self.context(), &label, cycle, &proper, &prior, &prev_center, prev.rtps)
            .map_err(|e| e.in_cycle(&label))?;
        let meta = self.meta(&outcome, cycle.strategy.as_str(), cycle.budget_seconds);
        self.save(out, &outcome.ledger, &meta)?;
        Ok((outcome.ledger, meta))
    }

    /// Run the selected stages, writing ledgers and side-cars into `out`.
    /// A full run also writes the reports and the refit best model.
    pub fn run(&self, out: &Path, selector: StageSelector) -> Result<CampaignRun, CampaignError> {
        self.prepare_out(out)?;
        let mut ledgers = Vec::new();
        let mut metas = Vec::new();
        let mut push = |(l, m): (CampaignLedger, CycleMeta)| {
            log::info!(
                "{} done: {} settings, {:.1} s elapsed of {:.1} s budget, rtps {:.3} s",
                m.cycle_label,
                m.settings,
                m.elapsed_seconds,
                m.budget_seconds,
                m.rtps.current
            );
            ledgers.push(l);
            metas.push(m);
        };
        match selector {
            StageSelector::Stage1 => push(self.stage1(out)?),
            StageSelector::Stage2 => push(self.stage2(out)?),
            StageSelector::Stage3(k) => push(self.stage3(out, k)?),
            StageSelector::All => {
                push(self.stage1(out)?);
                push(self.stage2(out)?);
                for k in 1..=self.config.stage3.len() {
                    push(self.stage3(out, k)?);
                }
            }
        }
        let mut run = CampaignRun {
            ledgers,
            metas,
            best: None,
            validation_auc: None,
        };
        if selector == StageSelector::All {
            let searched: Vec<LedgerRow> = run.ledgers.iter().flat_map(|l| l.rows.iter().cloned()).collect();
            let best = derive_sweet_spot(&searched)?.clone();
            analytics::emit_reports(&run.ledgers, out)?;
            if self.refit_best {
                let model = refit_top(&best.setting.hp, &self.data, &self.plan, self.config.seed)
                    .map_err(CampaignError::Refit)?;
                write_file(&out.join(BEST_MODEL_FILE), &model.to_json())?;
                run.validation_auc = Some(validation_auc(&model, &self.data, &self.plan).map_err(CampaignError::Refit)?);
            }
            run.best = Some(best);
        }
        Ok(run)
    }
}

/// Paths of every ledger a full run writes, in cycle order.
pub fn ledger_paths(out: &Path, stage3_cycles: usize) -> Vec<PathBuf> {
    let mut labels = vec!["stage1".to_string(), "stage2".to_string()];
    labels.extend((1..=stage3_cycles).map(cycle_label));
    labels.into_iter().map(|l| out.join(format!("{l}.csv"))).collect()
}
