//! Per-cycle summary tables computed from ledgers: top-k group averages,
//! mid-point ("decent model") counts and running-time totals.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::campaign::{CampaignLedger, LedgerRow};
use crate::dfnn::DfnnHyperparameters;

pub const GROUP_SIZES: [usize; 4] = [5, 10, 50, 100];

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("ledger {0} has no rows")]
    EmptyLedger(String),
    #[error("no ledgers to report on")]
    NoLedgers,
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub best: f64,
    pub top5: f64,
    pub top10: f64,
    pub top50: f64,
    pub top100: f64,
    pub all: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointStats {
    pub best_mean: f64,
    pub mid_point: f64,
    pub chs: usize,
    pub tns: usize,
    pub ratio: f64,
    pub avg_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeStats {
    pub rtps: f64,
    pub tns: usize,
    pub trt_hours: f64,
}

fn sortable(score: f64) -> f64 {
    if score.is_nan() {
        f64::NEG_INFINITY
    } else {
        score
    }
}

/// Rows best first; equal scores keep the lower setting id first.
pub fn ranked(rows: &[LedgerRow]) -> Vec<&LedgerRow> {
    let mut out: Vec<&LedgerRow> = rows.iter().collect();
    out.sort_by(|a, b| {
        sortable(b.cv.mean_test_auc)
            .total_cmp(&sortable(a.cv.mean_test_auc))
            .then_with(|| a.setting.id.cmp(&b.setting.id))
    });
    out
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn non_empty(ledger: &CampaignLedger) -> Result<(), AnalyticsError> {
    if ledger.rows.is_empty() {
        Err(AnalyticsError::EmptyLedger(ledger.cycle_label.clone()))
    } else {
        Ok(())
    }
}

pub fn group_stats(ledger: &CampaignLedger) -> Result<GroupStats, AnalyticsError> {
    non_empty(ledger)?;
    let order = ranked(&ledger.rows);
    let top = |k: usize| mean(order.iter().take(k).map(|r| r.cv.mean_test_auc));
    Ok(GroupStats {
        best: order[0].cv.mean_test_auc,
        top5: top(GROUP_SIZES[0]),
        top10: top(GROUP_SIZES[1]),
        top50: top(GROUP_SIZES[2]),
        top100: top(GROUP_SIZES[3]),
        all: top(order.len()),
    })
}

/// Midway between chance and `best`.
pub fn mid_point(best: f64) -> f64 {
    (0.5 + best) / 2.0
}

pub fn midpoint_stats(ledger: &CampaignLedger) -> Result<MidpointStats, AnalyticsError> {
    non_empty(ledger)?;
    let best_mean = ranked(&ledger.rows)[0].cv.mean_test_auc;
    let mid = mid_point(best_mean);
    let decent: Vec<f64> = ledger
        .rows
        .iter()
        .map(|r| r.cv.mean_test_auc)
        .filter(|&s| s >= mid)
        .collect();
    let tns = ledger.rows.len();
    Ok(MidpointStats {
        best_mean,
        mid_point: mid,
        chs: decent.len(),
        tns,
        ratio: decent.len() as f64 / tns as f64,
        avg_mean: mean(decent.into_iter()),
    })
}

pub fn time_stats(ledger: &CampaignLedger) -> Result<TimeStats, AnalyticsError> {
    non_empty(ledger)?;
    let total: f64 = ledger.rows.iter().map(|r| r.cv.train_seconds).sum();
    Ok(TimeStats::from_totals(total, ledger.rows.len()))
}

impl TimeStats {
    pub fn from_totals(total_seconds: f64, tns: usize) -> Self {
        TimeStats {
            rtps: total_seconds / tns as f64,
            tns,
            trt_hours: total_seconds / 3600.0,
        }
    }
}

/// Pearson correlation between total hidden nodes and per-setting time.
/// `None` when either side is constant or fewer than two rows exist.
pub fn node_time_correlation(ledger: &CampaignLedger) -> Option<f64> {
    let xs: Vec<f64> = ledger
        .rows
        .iter()
        .map(|r| r.setting.hp.nodes.iter().map(|&n| f64::from(n)).sum())
        .collect();
    let ys: Vec<f64> = ledger.rows.iter().map(|r| r.cv.train_seconds).collect();
    if xs.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(xs.iter().copied()), mean(ys.iter().copied()));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Best row over all ledgers; ties go to the earlier cycle, then the lower id.
pub fn global_best(ledgers: &[CampaignLedger]) -> Option<&LedgerRow> {
    let mut best: Option<&LedgerRow> = None;
    for l in ledgers {
        if let Some(&r) = ranked(&l.rows).first() {
            if best.map_or(true, |b| {
                sortable(r.cv.mean_test_auc).total_cmp(&sortable(b.cv.mean_test_auc)) == Ordering::Greater
            }) {
                best = Some(r);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub cycle_label: String,
    pub groups: GroupStats,
    pub midpoint: MidpointStats,
    pub time: TimeStats,
    pub node_time_correlation: Option<f64>,
    /// Best score over this and all earlier cycles.
    pub cumulative_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestSetting {
    pub cycle_label: String,
    pub setting_id: String,
    pub mean_test_auc: f64,
    pub hyperparameters: DfnnHyperparameters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cycles: Vec<CycleSummary>,
    pub best: BestSetting,
    pub total: TimeStats,
}

pub fn summarize(ledgers: &[CampaignLedger]) -> Result<Summary, AnalyticsError> {
    let best = global_best(ledgers).ok_or(AnalyticsError::NoLedgers)?;
    let mut cycles = Vec::with_capacity(ledgers.len());
    let mut cumulative = f64::NEG_INFINITY;
    for l in ledgers {
        let groups = group_stats(l)?;
        cumulative = cumulative.max(groups.best);
        cycles.push(CycleSummary {
            cycle_label: l.cycle_label.clone(),
            midpoint: midpoint_stats(l)?,
            time: time_stats(l)?,
            node_time_correlation: node_time_correlation(l),
            groups,
            cumulative_best: cumulative,
        });
    }
    let total_seconds: f64 = ledgers.iter().flat_map(|l| &l.rows).map(|r| r.cv.train_seconds).sum();
    let tns = ledgers.iter().map(|l| l.rows.len()).sum();
    Ok(Summary {
        cycles,
        best: BestSetting {
            cycle_label: best.cycle_label.clone(),
            setting_id: best.setting.id.to_string(),
            mean_test_auc: best.cv.mean_test_auc,
            hyperparameters: best.setting.hp.clone(),
        },
        total: TimeStats::from_totals(total_seconds, tns),
    })
}

pub const GROUPS_HEADER: &str = "cycle_label,best,top5,top10,top50,top100,all";
pub const MIDPOINT_HEADER: &str = "cycle_label,best_mean,mid_point,chs,tns,ratio,avg_mean";
pub const TIME_HEADER: &str = "cycle_label,rtps,tns,trt_hours";

/// CSV tables, one row per cycle, reals at six decimals.
pub fn report_tables(summary: &Summary) -> [(&'static str, String); 3] {
    let mut groups = format!("{GROUPS_HEADER}\n");
    let mut mid = format!("{MIDPOINT_HEADER}\n");
    let mut time = format!("{TIME_HEADER}\n");
    for c in &summary.cycles {
        let g = &c.groups;
        let _ = writeln!(
            groups,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            c.cycle_label, g.best, g.top5, g.top10, g.top50, g.top100, g.all
        );
        let m = &c.midpoint;
        let _ = writeln!(
            mid,
            "{},{:.6},{:.6},{},{},{:.6},{:.6}",
            c.cycle_label, m.best_mean, m.mid_point, m.chs, m.tns, m.ratio, m.avg_mean
        );
        let t = &c.time;
        let _ = writeln!(time, "{},{:.6},{},{:.6}", c.cycle_label, t.rtps, t.tns, t.trt_hours);
    }
    [("groups.csv", groups), ("midpoint.csv", mid), ("time.csv", time)]
}

/// Write `groups.csv`, `midpoint.csv`, `time.csv` and `summary.json`.
pub fn emit_reports(ledgers: &[CampaignLedger], out_dir: &Path) -> Result<Summary, AnalyticsError> {
    let summary = summarize(ledgers)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let tables = report_tables(&summary);
    let files = tables.iter().map(|(n, t)| (*n, t.as_str())).chain([("summary.json", json.as_str())]);
    for (name, text) in files {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(|source| AnalyticsError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(summary)
}
