use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::config::ClockMode;
use super::ledger::LedgerRow;
use super::rtps::{cap_settings, RtpsEstimator};
use super::CampaignError;
use crate::dataset::{SplitPlan, TabularDataset};
use crate::dfnn::DfnnHyperparameters;
use crate::evaluation::{run_cv_with, Learner};
use crate::searchspace::HyperparameterSetting;
use crate::seed::derive_seed;

/// Everything a cycle needs besides its own plan.
pub struct RunContext<'a, L: Learner> {
    pub data: &'a TabularDataset,
    pub plan: &'a SplitPlan,
    pub learner: &'a L,
    pub campaign_seed: u64,
    pub workers: usize,
    pub clock: ClockMode,
}

/// Settings evaluated by one cycle, in queue order.
#[derive(Debug, Clone)]
pub struct CycleRun {
    pub rows: Vec<LedgerRow>,
    /// Real elapsed time of the cycle.
    pub elapsed_seconds: f64,
    /// Queue entries never started because the budget ran out.
    pub skipped: usize,
}

impl<L: Learner> RunContext<'_, L> {
    pub fn cycle_seed(&self, cycle_label: &str) -> u64 {
        derive_seed(self.campaign_seed, &[cycle_label.into()])
    }

    /// How many settings a budget holds at `rtps` seconds each. Wall-clock
    /// budgets are shared by all workers; the virtual clock is serial.
    pub fn capacity(&self, budget_seconds: f64, rtps: f64) -> u64 {
        match self.clock {
            ClockMode::Wall => cap_settings(budget_seconds * self.workers as f64, rtps),
            ClockMode::Virtual { .. } => cap_settings(budget_seconds, rtps),
        }
    }

    /// Charge of one setting under the virtual clock: proportional to
    /// parameter count times rows seen over the five folds.
    pub fn virtual_cost(&self, hp: &DfnnHyperparameters) -> Option<f64> {
        let ClockMode::Virtual { seconds_per_unit } = self.clock else {
            return None;
        };
        let mut dims = vec![self.data.predictor_count()];
        dims.extend(hp.nodes.iter().map(|&n| n as usize));
        dims.push(2);
        let params: usize = dims.windows(2).map(|w| (w[0] + 1) * w[1]).sum();
        let rows_per_epoch = 4 * self.plan.train_test_indices.len();
        Some(seconds_per_unit * (params * rows_per_epoch) as f64 * f64::from(hp.epochs))
    }

    /// Evaluate `queue` front to back until the budget is spent.
    ///
    /// `live` is updated in completion order and only feeds progress
    /// logging; callers derive the carried-forward estimate with
    /// [`replay`] over the returned rows.
    pub fn run_queue(
        &self,
        cycle_label: &str,
        queue: &[HyperparameterSetting],
        budget_seconds: f64,
        live: RtpsEstimator,
    ) -> Result<CycleRun, CampaignError> {
        let started = Instant::now();
        let seed = self.cycle_seed(cycle_label);
        let admitted = match self.clock {
            ClockMode::Wall => queue.len(),
            ClockMode::Virtual { .. } => {
                let mut spent = 0.0;
                let mut n = 0;
                for s in queue {
                    if spent >= budget_seconds {
                        break;
                    }
                    spent += self.virtual_cost(&s.hp).expect("virtual clock");
                    n += 1;
                }
                n
            }
        };
        let next = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);
        let results: Mutex<Vec<Option<LedgerRow>>> = Mutex::new(vec![None; admitted]);
        let failure: Mutex<Option<CampaignError>> = Mutex::new(None);
        let live = Mutex::new(live);
        let worker = || loop {
            if stop.load(Ordering::Relaxed) {
                break;
            }
            if matches!(self.clock, ClockMode::Wall) && started.elapsed().as_secs_f64() >= budget_seconds {
                break;
            }
            let i = next.fetch_add(1, Ordering::Relaxed);
            if i >= admitted {
                break;
            }
            let setting = &queue[i];
            match run_cv_with(self.learner, &setting.hp, self.data, self.plan, &setting.id, seed) {
                Ok(mut cv) => {
                    if let Some(cost) = self.virtual_cost(&setting.hp) {
                        cv.train_seconds = cost;
                    }
                    let rtps = {
                        let mut e = live.lock().expect("rtps lock");
                        e.update(cv.train_seconds);
                        e.current
                    };
                    log::info!(
                        "{cycle_label} setting {} mean_test_auc {:.5} rtps {:.3}s",
                        setting.id,
                        cv.mean_test_auc,
                        rtps
                    );
                    results.lock().expect("results lock")[i] = Some(LedgerRow {
                        cycle_label: cycle_label.to_string(),
                        setting: setting.clone(),
                        cv,
                    });
                }
                Err(e) => {
                    stop.store(true, Ordering::Relaxed);
                    failure.lock().expect("failure lock").get_or_insert(CampaignError::Evaluation {
                        setting: setting.id.to_string(),
                        source: e,
                    });
                }
            }
        };
        std::thread::scope(|scope| {
            for _ in 0..self.workers.max(1) {
                scope.spawn(worker);
            }
        });
        if let Some(e) = failure.into_inner().expect("failure lock") {
            return Err(e);
        }
        let rows: Vec<LedgerRow> = results.into_inner().expect("results lock").into_iter().flatten().collect();
        Ok(CycleRun {
            skipped: queue.len() - rows.len(),
            rows,
            elapsed_seconds: started.elapsed().as_secs_f64(),
        })
    }
}

/// Fold per-setting times into `estimator` in queue order.
pub fn replay(mut estimator: RtpsEstimator, rows: &[LedgerRow]) -> RtpsEstimator {
    for r in rows {
        estimator.update(r.cv.train_seconds);
    }
    estimator
}
