//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use gridsmith::analytics::{group_stats, mid_point, midpoint_stats, summarize, TimeStats};
use gridsmith::campaign::{
    estimate_total_time, run_stage2, run_stage3_cycle, Campaign, CampaignConfig, CampaignLedger, ClockMode,
    CycleConfig, LedgerRow, RtpsEstimator, RunContext, StageSelector, Strategy,
};
use gridsmith::dataset::{split, synth_gen, SynthSpec, FOLDS};
use gridsmith::dfnn::{init_model, Activation, DfnnHyperparameters, Initializer, Optimizer};
use gridsmith::evaluation::{auc, CvResult, DfnnLearner};
use gridsmith::fixtures::{base_hyperparameters, label_echo_dataset, lr_ledger, table1_grid, TABLE_ARITHMETIC};
use gridsmith::searchspace::{AxisName, GridSpec, HyperparameterSetting, SettingId};
use gridsmith::shap::{exact_shap, hyperparameter_shap, kernel_shap, shapley_weight, FnScorer};
use ndarray::{Array1, Array2};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs"))
}

fn c1_reference_pool() -> Outcome {
    let g = table1_grid();
    ensure(g.pool_size() == BigUint::from(427_602_384_000_000u64), format!("pool {}", g.pool_size()))?;
    ensure(g.structure_count() == BigUint::from(245_410u32), format!("structures {}", g.structure_count()))?;
    Ok(format!("pool {} structures {}", g.pool_size(), g.structure_count()))
}

fn c2_budget() -> Outcome {
    let t = estimate_total_time(&table1_grid().pool_size(), TABLE_ARITHMETIC.pool_rtps);
    let rel = (t.years - TABLE_ARITHMETIC.pool_years).abs() / TABLE_ARITHMETIC.pool_years;
    ensure(rel < 1e-4, format!("years {} rel err {rel:e}", t.years))?;
    let ts = TimeStats::from_totals(TABLE_ARITHMETIC.rtps * TABLE_ARITHMETIC.tns as f64, TABLE_ARITHMETIC.tns);
    let rel_h = (ts.trt_hours - TABLE_ARITHMETIC.trt_hours).abs() / TABLE_ARITHMETIC.trt_hours;
    ensure(rel_h < 0.005, format!("trt {} h", ts.trt_hours))?;
    Ok(format!("{:.0} years (rel {rel:.1e}), trt {:.2} h", t.years, ts.trt_hours))
}

fn row(id: u64, score: f64, seconds: f64) -> LedgerRow {
    LedgerRow {
        cycle_label: "fixture".into(),
        setting: HyperparameterSetting {
            id: SettingId::from(id),
            hp: base_hyperparameters(),
        },
        cv: CvResult {
            setting_id: SettingId::from(id),
            fold_aucs: [score; 5],
            mean_test_auc: score,
            train_seconds: seconds,
            diverged: false,
        },
    }
}

fn c3_midpoint() -> Outcome {
    let a = TABLE_ARITHMETIC;
    let mp = mid_point(a.best_mean);
    ensure((mp - a.mid_point).abs() <= 5e-6, format!("mid_point {mp}"))?;
    let rows: Vec<LedgerRow> = (0..a.tns as u64)
        .map(|i| {
            let s = if (i as usize) < a.chs { a.best_mean - 1e-4 * (i % 7) as f64 } else { 0.55 };
            row(i, s, 1.0)
        })
        .collect();
    let ledger = CampaignLedger::new("fixture", 0, "fixture", rows).map_err(|e| e.to_string())?;
    let m = midpoint_stats(&ledger).map_err(|e| e.to_string())?;
    ensure(m.chs == a.chs && m.tns == a.tns, format!("chs {} tns {}", m.chs, m.tns))?;
    ensure((m.ratio - a.ratio).abs() <= 1e-5, format!("ratio {}", m.ratio))?;
    Ok(format!("mid_point {mp:.6}, ratio {:.5}", m.ratio))
}

fn pair_count_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut wins2, mut p, mut n) = (0u64, 0u64, 0u64);
    for (i, &yi) in labels.iter().enumerate() {
        if yi == 1 {
            p += 1;
        } else {
            n += 1;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yi == 1 && yj == 0 {
                if scores[i] > scores[j] {
                    wins2 += 2;
                } else if scores[i] == scores[j] {
                    wins2 += 1;
                }
            }
        }
    }
    wins2 as f64 / (2 * p * n) as f64
}

fn c4_auc() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..200 {
        let n = rng.random_range(2..=60);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let levels = rng.random_range(2..10);
        let scores: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..levels)) / 4.0).collect();
        let got = auc(&scores, &labels).map_err(|e| e.to_string())?;
        let want = pair_count_auc(&scores, &labels);
        ensure(got == want, format!("instance {k}: {got} vs {want}"))?;
    }
    Ok("200 instances bit-identical to pair counting".into())
}

fn c5_gradients() -> Outcome {
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for &af in Activation::ALL {
        for depth in 1..=4 {
            let hp = DfnnHyperparameters {
                nodes: vec![4; depth],
                af,
                ki: Initializer::GlorotUniform,
                opt: Optimizer::Adam,
                lr: 0.01,
                mom: 0.0,
                decay: 0.0,
                dropout: 0.0,
                epochs: 1,
                batch_size: 8,
                l1: 0.001,
                l2: 0.01,
            };
            let mut model = init_model(&hp, 3, 17 + depth as u64).map_err(|e| e.to_string())?;
            let x = Array2::from_shape_fn((8, 3), |_| rng.random_range(-1.0..1.0));
            let y: Vec<u8> = (0..8).map(|i| (i % 2) as u8).collect();
            let (_, grads) = model.loss_and_gradients(x.view(), &y, hp.l1, hp.l2).map_err(|e| e.to_string())?;
            let objective = |m: &gridsmith::dfnn::DfnnModel| m.loss_and_gradients(x.view(), &y, hp.l1, hp.l2).unwrap().0;
            for l in 0..model.weights.len() {
                for idx in 0..model.weights[l].len() {
                    let (r, c) = (idx / model.weights[l].ncols(), idx % model.weights[l].ncols());
                    let w0 = model.weights[l][[r, c]];
                    model.weights[l][[r, c]] = w0 + h;
                    let up = objective(&model);
                    model.weights[l][[r, c]] = w0 - h;
                    let down = objective(&model);
                    model.weights[l][[r, c]] = w0;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.weights[l][[r, c]];
                    let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-7);
                    worst = worst.max(rel);
                }
                for j in 0..model.biases[l].len() {
                    let b0 = model.biases[l][j];
                    model.biases[l][j] = b0 + h;
                    let up = objective(&model);
                    model.biases[l][j] = b0 - h;
                    let down = objective(&model);
                    model.biases[l][j] = b0;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.biases[l][j];
                    let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-7);
                    worst = worst.max(rel);
                }
            }
        }
    }
    ensure(worst < 1e-4, format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c6_shapley() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for f in 1..=10usize {
        let sum: f64 = (0..f).map(|s| binom(f as u64 - 1, s as u64) * shapley_weight(f, s)).sum();
        ensure((sum - 1.0).abs() < 1e-12, format!("weight sum {sum} at |F| = {f}"))?;

        let coef: Vec<f64> = (0..f).map(|_| rng.random_range(-2.0..2.0)).collect();
        let case = Array1::from_shape_fn(f, |_| rng.random_range(-3.0..3.0));
        let zero = Array2::zeros((1, f));
        // additive: phi_j = c_j x_j under a zero background
        let lin = FnScorer(|x: &[f64]| x.iter().zip(&coef).map(|(a, b)| a * b).sum());
        let (phi, _) = exact_shap(&lin, case.view(), zero.view()).map_err(|e| e.to_string())?;
        for j in 0..f {
            ensure((phi[j] - coef[j] * case[j]).abs() < 1e-9, format!("additive |F|={f} j={j}"))?;
        }
        // dummy: the last feature is never read
        let dummy = FnScorer(|x: &[f64]| x[..x.len() - 1].iter().map(|v| v.sin()).product::<f64>() + x[0]);
        let (phi, base) = exact_shap(&dummy, case.view(), zero.view()).map_err(|e| e.to_string())?;
        ensure(phi[f - 1] == 0.0 || f == 1, format!("dummy phi {} at |F|={f}", phi[f - 1]))?;
        // efficiency
        let fx = (dummy.0)(case.as_slice().unwrap());
        ensure((base + phi.iter().sum::<f64>() - fx).abs() < 1e-9, format!("efficiency |F|={f}"))?;
        // symmetry: features 0 and 1 are exchangeable
        if f >= 2 {
            let sym = FnScorer(|x: &[f64]| (x[0] + x[1]).powi(2) + x[2..].iter().sum::<f64>());
            let mut c = case.clone();
            c[1] = c[0];
            let (phi, _) = exact_shap(&sym, c.view(), zero.view()).map_err(|e| e.to_string())?;
            ensure((phi[0] - phi[1]).abs() < 1e-12, format!("symmetry |F|={f}"))?;
        }
    }
    let model = FnScorer(|x: &[f64]| (x[0] * x[1]).tanh() + x[2] * x[3] * x[4] - (x[5] - x[6]).abs() + x[7].exp());
    let case = Array1::from(vec![0.4, -1.1, 0.7, 1.3, -0.2, 0.8, -0.6, 0.9]);
    let bg = Array2::from_shape_fn((1, 8), |(_, j)| 0.05 * j as f64);
    let (exact, _) = exact_shap(&model, case.view(), bg.view()).map_err(|e| e.to_string())?;
    let (kern, _) = kernel_shap(&model, case.view(), bg.view(), 256, 6).map_err(|e| e.to_string())?;
    let gap = exact.iter().zip(&kern).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(gap < 1e-6, format!("kernel vs exact {gap:e}"))?;
    Ok(format!("properties hold for |F| ≤ 10; kernel gap {gap:.1e}"))
}

fn c7_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..500 {
        let n = rng.random_range(60..400usize);
        let positives = rng.random_range(15..n - 15);
        let data = label_echo_dataset(n, positives);
        let seed: u64 = rng.random();
        let plan = split(&data, seed).map_err(|e| e.to_string())?;
        let want_val = (0.2 * n as f64).round() as usize;
        ensure(plan.validation_indices.len() == want_val, format!("pair {k}: validation size"))?;
        for class in [0u8, 1] {
            let in_class = |i: &usize| data.labels[*i] == class;
            let total = plan.train_test_indices.iter().filter(|i| in_class(i)).count() as f64;
            let mean = total / FOLDS as f64;
            for fold in 1..=FOLDS as u8 {
                let c = plan.fold_indices(fold).iter().filter(|i| in_class(i)).count() as f64;
                ensure((c - mean).abs() <= 1.0, format!("pair {k}: fold {fold} class {class} has {c}, mean {mean}"))?;
            }
        }
        let again = split(&data, seed).map_err(|e| e.to_string())?;
        ensure(again.to_json() == plan.to_json(), format!("pair {k}: not deterministic"))?;
    }
    Ok("500 pairs".into())
}

fn small_stage2_grid() -> GridSpec {
    let mut g = GridSpec::single(&base_hyperparameters());
    g.layer_nodes = vec![vec![5, 10, 20]];
    g.lr = vec![0.005, 0.01, 0.05, 0.1];
    g.batch_size = vec![10, 30, 50, 100, 200];
    g.epochs = vec![10];
    g
}

fn c8_parallel_determinism() -> Outcome {
    let data = synth_gen(
        &SynthSpec {
            case_count: 500,
            predictor_count: 8,
            signal_strength: 1.0,
        },
        8,
    )
    .map_err(|e| e.to_string())?;
    let plan = split(&data, 8).map_err(|e| e.to_string())?;
    let grid = small_stage2_grid();
    let mut csvs = Vec::new();
    for workers in [1, 8] {
        let ctx = RunContext {
            data: &data,
            plan: &plan,
            learner: &DfnnLearner,
            campaign_seed: 8,
            workers,
            clock: ClockMode::Virtual { seconds_per_unit: 1e-7 },
        };
        let (outcome, _) = run_stage2(&ctx, &grid, 1e9, RtpsEstimator::seeded(0.1, 1.0)).map_err(|e| e.to_string())?;
        csvs.push((outcome.ledger.len(), outcome.ledger.to_csv()));
    }
    ensure(csvs[0].0 == 60, format!("{} settings", csvs[0].0))?;
    ensure(csvs[0].1 == csvs[1].1, "ledgers differ between 1 and 8 workers")?;
    Ok(format!("{} settings, 1 and 8 workers byte-identical", csvs[0].0))
}

fn c9_desk_campaign() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = CampaignConfig::from_file(&configs_dir().join("desk.json")).map_err(|e| e.to_string())?;
    let campaign = Campaign::from_config(config).map_err(|e| e.to_string())?;
    let run = campaign.run(dir.path(), StageSelector::All).map_err(|e| e.to_string())?;
    ensure(run.ledgers.len() == 8, format!("{} ledgers", run.ledgers.len()))?;
    let mut worst: f64 = 0.0;
    for m in &run.metas {
        let ratio = m.elapsed_seconds / m.budget_seconds;
        worst = worst.max(ratio);
        ensure(
            ratio <= 1.25,
            format!("{} took {:.1} s of {:.1} s", m.cycle_label, m.elapsed_seconds, m.budget_seconds),
        )?;
    }
    let summary = summarize(&run.ledgers).map_err(|e| e.to_string())?;
    let bests: Vec<f64> = summary.cycles.iter().map(|c| c.cumulative_best).collect();
    ensure(bests.windows(2).all(|w| w[1] >= w[0]), format!("cumulative best {bests:?}"))?;
    let best = *bests.last().unwrap();
    ensure(best > 0.75, format!("best {best}"))?;
    for f in ["groups.csv", "midpoint.csv", "time.csv", "summary.json", "best_model.json"] {
        ensure(dir.path().join(f).exists(), format!("{f} missing"))?;
    }
    Ok(format!("best {best:.4}, worst elapsed/budget {worst:.3}"))
}

fn c10_hyper_shap() -> Outcome {
    let ledger = lr_ledger(500, 11);
    let h = hyperparameter_shap(&ledger.rows, 10).map_err(|e| e.to_string())?;
    let (top, top_v) = h.importance[0].clone();
    ensure(top == "lr", format!("top feature {top}"))?;
    for (name, v) in &h.importance[1..] {
        ensure(*v < 0.25 * top_v, format!("{name} importance {v} vs lr {top_v}"))?;
    }
    let codes: Vec<(&str, usize)> = Initializer::ALL.iter().map(|i| (i.as_str(), i.ordinal())).collect();
    let want = [
        ("constant", 0),
        ("glorot_normal", 1),
        ("glorot_uniform", 2),
        ("he_normal", 3),
        ("he_uniform", 4),
    ];
    ensure(codes == want, format!("ki codes {codes:?}"))?;
    let runner_up = h.importance[1].1 / top_v;
    Ok(format!("lr first; runner-up at {:.1}% of lr", 100.0 * runner_up))
}

fn c11_ssgs_vs_rgs() -> Outcome {
    let base = CampaignConfig::from_file(&configs_dir().join("virtual.json")).map_err(|e| e.to_string())?;
    let radius: std::collections::BTreeMap<AxisName, u32> = AxisName::ALL.iter().map(|&a| (a, 1)).collect();
    let mut wins = 0;
    let mut detail = Vec::new();
    for seed in 1..=5u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = base.clone();
        config.seed = seed;
        let campaign = Campaign::from_config(config.clone()).map_err(|e| e.to_string())?;
        campaign.stage1(dir.path()).map_err(|e| e.to_string())?;
        let (stage2, meta2) = campaign.stage2(dir.path()).map_err(|e| e.to_string())?;
        let proper = GridSpec::from_json_file(&dir.path().join("proper_grid.json")).map_err(|e| e.to_string())?;
        let ctx = campaign.context();
        let center = meta2.center.clone().expect("stage2 center");
        let ssgs = CycleConfig {
            strategy: Strategy::Ssgs,
            budget_seconds: config.stage3[0].budget_seconds,
            radius: radius.clone(),
            min_distance: None,
            sample_n: None,
        };
        let s = run_stage3_cycle(&ctx, "stage3-c1", &ssgs, &proper, &stage2.rows, &center, meta2.rtps)
            .map_err(|e| e.to_string())?;
        let n = s.ledger.len() as u64;
        let rgs = CycleConfig {
            strategy: Strategy::Rgs,
            budget_seconds: ssgs.budget_seconds,
            radius: Default::default(),
            min_distance: None,
            sample_n: Some(n),
        };
        let r = run_stage3_cycle(&ctx, "stage3-c2", &rgs, &proper, &stage2.rows, &center, s.rtps)
            .map_err(|e| e.to_string())?;
        ensure(r.ledger.len() as u64 == n, "unequal setting counts")?;
        let (sa, ra) = (
            group_stats(&s.ledger).map_err(|e| e.to_string())?.all,
            group_stats(&r.ledger).map_err(|e| e.to_string())?.all,
        );
        if sa >= ra {
            wins += 1;
        }
        detail.push(format!("{n}: {sa:.3}/{ra:.3}"));
    }
    ensure(wins >= 4, format!("SSGS ahead in {wins}/5 ({})", detail.join(", ")))?;
    Ok(format!("SSGS ahead in {wins}/5 ({})", detail.join(", ")))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("reference pool combinatorics", Duration::from_secs(1), c1_reference_pool),
        ("budget arithmetic", Duration::from_secs(1), c2_budget),
        ("mid-point fixtures", Duration::from_secs(1), c3_midpoint),
        ("AUC oracle", Duration::from_secs(5), c4_auc),
        ("gradient check", Duration::from_secs(30), c5_gradients),
        ("Shapley correctness", Duration::from_secs(60), c6_shapley),
        ("stratified split", Duration::from_secs(10), c7_split),
        ("determinism under parallelism", Duration::from_secs(600), c8_parallel_determinism),
        ("end-to-end desk campaign", Duration::from_secs(1200), c9_desk_campaign),
        ("hyperparameter SHAP sanity", Duration::from_secs(120), c10_hyper_shap),
        ("SSGS vs RGS", Duration::from_secs(900), c11_ssgs_vs_rgs),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let started = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = started.elapsed();
        let result = match result {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {:.1} s, limit {} s", took.as_secs_f64(), limit.as_secs())),
            r => r,
        };
        match result {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg} ({:.2} s)", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg} ({:.2} s)", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
