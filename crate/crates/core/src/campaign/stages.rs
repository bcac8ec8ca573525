use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::config::{CycleConfig, Strategy};
use super::ledger::{CampaignLedger, LedgerRow};
use super::rtps::RtpsEstimator;
use super::scheduler::{replay, CycleRun, RunContext};
use super::CampaignError;
use crate::dfnn::DfnnHyperparameters;
use crate::evaluation::Learner;
use crate::searchspace::{
    derive_sweet_spot, neighborhood, olo_jump, sample_rgs, AxisName, GridSpec, HyperparameterSetting, SearchError,
};
use crate::seed::{derive_seed, rng_from_seed};

/// Result of one cycle.
#[derive(Debug, Clone)]
pub struct CycleOutcome {
    pub ledger: CampaignLedger,
    /// Estimate carried into the next cycle.
    pub rtps: RtpsEstimator,
    /// Sweet spot or jump target the cycle searched around, if any.
    pub center: Option<DfnnHyperparameters>,
    pub elapsed_seconds: f64,
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct Stage1Outcome {
    pub cycle: CycleOutcome,
    pub proper_grid: GridSpec,
    /// Retained value labels per swept axis.
    pub proper_values: BTreeMap<AxisName, Vec<String>>,
}

/// `count` indices spread evenly over `0..len`, both ends included when
/// `count >= 2`.
pub fn evenly_spaced(len: usize, count: usize) -> Vec<usize> {
    let count = count.min(len);
    match count {
        0 => vec![],
        1 => vec![len / 2],
        _ => (0..count).map(|i| (i * (len - 1) + (count - 1) / 2) / (count - 1)).collect(),
    }
}

/// Indices whose score reaches the smaller of the axis mid-point
/// `(0.5 + best) / 2` and the best score itself.
pub fn proper_indices(scores: &BTreeMap<usize, f64>) -> Vec<usize> {
    let best = scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = ((0.5 + best) / 2.0).min(best);
    scores.iter().filter(|(_, &s)| s >= threshold).map(|(&i, _)| i).collect()
}

fn ledger_of<L: Learner>(ctx: &RunContext<'_, L>, label: &str, rows: Vec<LedgerRow>) -> Result<CampaignLedger, CampaignError> {
    Ok(CampaignLedger::new(label, ctx.campaign_seed, ctx.data.fingerprint(), rows)?)
}

fn finish<L: Learner>(
    ctx: &RunContext<'_, L>,
    label: &str,
    run: CycleRun,
    rtps: RtpsEstimator,
    center: Option<DfnnHyperparameters>,
) -> Result<CycleOutcome, CampaignError> {
    let rtps = replay(rtps, &run.rows);
    Ok(CycleOutcome {
        ledger: ledger_of(ctx, label, run.rows)?,
        rtps,
        center,
        elapsed_seconds: run.elapsed_seconds,
        skipped: run.skipped,
    })
}

/// Per-axis sweeps around `baseline` over the wide grid.
///
/// When `initial_rtps` is `None` the baseline is timed first and its
/// cost counts against the budget. The remaining budget is split equally
/// over the swept axes; each axis receives an evenly spaced subset of its
/// values and the queue interleaves axes so a budget cut-off affects all
/// of them alike.
#[allow(clippy::too_many_arguments)]
pub fn run_stage1<L: Learner>(
    ctx: &RunContext<'_, L>,
    wide: &GridSpec,
    sweep: &[AxisName],
    baseline: &DfnnHyperparameters,
    budget_seconds: f64,
    initial_rtps: Option<f64>,
    alpha: f64,
) -> Result<Stage1Outcome, CampaignError> {
    const LABEL: &str = "stage1";
    let base_id = wide
        .rank(baseline)
        .ok_or_else(|| CampaignError::Config("stage1 baseline is not on the stage1 axes".into()))?;
    let base = HyperparameterSetting {
        id: base_id,
        hp: baseline.clone(),
    };
    let started = std::time::Instant::now();

    let (mut rows, mut remaining, rtps) = match initial_rtps {
        Some(r) => (Vec::new(), budget_seconds, RtpsEstimator::seeded(alpha, r)),
        None => {
            let probe = ctx.run_queue(LABEL, std::slice::from_ref(&base), f64::INFINITY, RtpsEstimator::new(alpha))?;
            let cost = probe.rows[0].cv.train_seconds;
            (probe.rows, budget_seconds - cost, RtpsEstimator::seeded(alpha, cost))
        }
    };
    let per_axis_budget = remaining / sweep.len().max(1) as f64;
    if remaining <= 0.0 || ctx.capacity(remaining, rtps.current) < sweep.len() as u64 {
        return Err(CampaignError::BudgetTooSmall {
            cycle: LABEL.into(),
            budget_seconds,
            rtps: rtps.current,
            needed: sweep.len() as u64,
        });
    }

    let mut axes: Vec<AxisName> = sweep.to_vec();
    axes.sort();
    axes.dedup();
    // the value index the baseline occupies on each swept axis
    let base_index = |axis: AxisName| -> usize {
        match axis {
            AxisName::Nodes => wide.layer_nodes[0].iter().position(|&n| n == baseline.nodes[0]),
            _ => wide.axis_index(axis, baseline),
        }
        .expect("baseline is on the grid")
    };
    let variant = |axis: AxisName, i: usize| -> HyperparameterSetting {
        if i == base_index(axis) {
            return base.clone();
        }
        let mut hp = baseline.clone();
        wide.assign(axis, i, &mut hp);
        let id = wide.rank(&hp).expect("sweep stays on the grid");
        HyperparameterSetting { id, hp }
    };

    let mut rng = rng_from_seed(derive_seed(ctx.cycle_seed(LABEL), &["sweep".into()]));
    let share = ctx.capacity(per_axis_budget, rtps.current) as usize;
    let mut per_axis: Vec<Vec<HyperparameterSetting>> = Vec::new();
    for &axis in &axes {
        let candidates: Vec<usize> = (0..wide.axis_len(axis)).filter(|&i| i != base_index(axis)).collect();
        let mut settings: Vec<HyperparameterSetting> = evenly_spaced(candidates.len(), share)
            .into_iter()
            .map(|k| variant(axis, candidates[k]))
            .collect();
        settings.shuffle(&mut rng);
        per_axis.push(settings);
    }
    let mut queue: Vec<HyperparameterSetting> = Vec::new();
    if rows.is_empty() {
        queue.push(base.clone());
    }
    let longest = per_axis.iter().map(Vec::len).max().unwrap_or(0);
    for k in 0..longest {
        for list in &per_axis {
            if let Some(s) = list.get(k) {
                if s.id != base.id && !queue.iter().any(|q| q.id == s.id) {
                    queue.push(s.clone());
                }
            }
        }
    }
    remaining = remaining.max(f64::MIN_POSITIVE);
    let run = ctx.run_queue(LABEL, &queue, remaining, rtps)?;
    rows.extend(run.rows.iter().cloned());

    let score_of: BTreeMap<_, f64> = rows.iter().map(|r| (r.setting.id.clone(), r.cv.mean_test_auc)).collect();
    let mut proper = wide.clone();
    let mut proper_values = BTreeMap::new();
    for &axis in &axes {
        let scores: BTreeMap<usize, f64> = (0..wide.axis_len(axis))
            .filter_map(|i| score_of.get(&variant(axis, i).id).map(|&s| (i, s)))
            .collect();
        let keep = proper_indices(&scores);
        proper = proper.restrict(axis, &keep)?;
        let labels = wide.axis_labels(axis);
        proper_values.insert(axis, keep.iter().map(|&i| labels[i].clone()).collect());
    }

    let rtps = replay(rtps, &run.rows);
    let ledger = ledger_of(ctx, LABEL, rows)?;
    Ok(Stage1Outcome {
        cycle: CycleOutcome {
            ledger,
            rtps,
            center: Some(baseline.clone()),
            elapsed_seconds: started.elapsed().as_secs_f64(),
            skipped: run.skipped,
        },
        proper_grid: proper,
        proper_values,
    })
}

/// Uniform random subset of `grid` sized to the budget, ids re-ranked in
/// `reference`.
fn budgeted_sample<L: Learner>(
    ctx: &RunContext<'_, L>,
    label: &str,
    grid: &GridSpec,
    reference: &GridSpec,
    n: u64,
) -> Result<Vec<HyperparameterSetting>, CampaignError> {
    let pool = grid.pool_size();
    let n = if num_bigint::BigUint::from(n) > pool {
        usize::try_from(&pool).expect("pool below a u64 count fits usize")
    } else {
        n as usize
    };
    let seed = derive_seed(ctx.cycle_seed(label), &["queue".into()]);
    sample_rgs(grid, n, seed)?
        .into_iter()
        .map(|s| {
            let id = reference.rank(&s.hp).ok_or_else(|| {
                CampaignError::Search(SearchError::CenterNotOnGrid("sub-grid setting outside the proper grid".into()))
            })?;
            Ok(HyperparameterSetting { id, hp: s.hp })
        })
        .collect()
}

/// Budget-capped search over the proper grid.
pub fn run_stage2<L: Learner>(
    ctx: &RunContext<'_, L>,
    proper: &GridSpec,
    budget_seconds: f64,
    rtps: RtpsEstimator,
) -> Result<(CycleOutcome, HyperparameterSetting), CampaignError> {
    const LABEL: &str = "stage2";
    let n = ctx.capacity(budget_seconds, rtps.current);
    let queue = budgeted_sample(ctx, LABEL, proper, proper, n)?;
    let run = ctx.run_queue(LABEL, &queue, budget_seconds, rtps)?;
    let outcome = finish(ctx, LABEL, run, rtps, None)?;
    let best = derive_sweet_spot(&outcome.ledger.rows)?.setting.clone();
    let outcome = CycleOutcome {
        center: Some(best.hp.clone()),
        ..outcome
    };
    Ok((outcome, best))
}

/// One SSGS, OLO or RGS cycle over the proper grid.
///
/// `prior` holds the rows of earlier Stage 2 and Stage 3 cycles and
/// `prev_center` the center searched by the previous cycle.
#[allow(clippy::too_many_arguments)]
pub fn run_stage3_cycle<L: Learner>(
    ctx: &RunContext<'_, L>,
    label: &str,
    cycle: &CycleConfig,
    proper: &GridSpec,
    prior: &[LedgerRow],
    prev_center: &DfnnHyperparameters,
    rtps: RtpsEstimator,
) -> Result<CycleOutcome, CampaignError> {
    let cap = ctx.capacity(cycle.budget_seconds, rtps.current);
    let (grid, center) = match cycle.strategy {
        Strategy::Ssgs => {
            let center = derive_sweet_spot(prior)?.setting.hp.clone();
            (neighborhood(proper, &center, &cycle.radius())?, Some(center))
        }
        Strategy::Olo => {
            let min_distance = cycle.min_distance.unwrap_or(0);
            let center = olo_jump(prior, proper, prev_center, min_distance)?.setting.hp.clone();
            (neighborhood(proper, &center, &cycle.radius())?, Some(center))
        }
        Strategy::Rgs => (proper.clone(), None),
    };
    let n = match (cycle.strategy, cycle.sample_n) {
        (Strategy::Rgs, Some(n)) => n,
        _ => cap,
    };
    let queue = budgeted_sample(ctx, label, &grid, proper, n)?;
    let budget = if cycle.sample_n.is_some() {
        f64::INFINITY
    } else {
        cycle.budget_seconds
    };
    let run = ctx.run_queue(label, &queue, budget, rtps)?;
    finish(ctx, label, run, rtps, center)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_spacing_covers_both_ends() {
        assert_eq!(evenly_spaced(10, 2), vec![0, 9]);
        assert_eq!(evenly_spaced(10, 4), vec![0, 3, 6, 9]);
        assert_eq!(evenly_spaced(5, 9), vec![0, 1, 2, 3, 4]);
        assert_eq!(evenly_spaced(7, 1), vec![3]);
        assert!(evenly_spaced(0, 3).is_empty());
    }

    #[test]
    fn proper_values_drop_outliers_and_keep_the_best() {
        let flat = BTreeMap::from([(0, 0.7), (1, 0.7), (2, 0.7)]);
        assert_eq!(proper_indices(&flat), vec![0, 1, 2]);
        let split = BTreeMap::from([(0, 0.75), (1, 0.55)]);
        assert_eq!(proper_indices(&split), vec![0]);
        let poor = BTreeMap::from([(0, 0.3), (1, 0.45)]);
        assert_eq!(proper_indices(&poor), vec![1]);
    }
}
