use gridsmith::dataset::{split, synth_gen, SynthSpec};
use gridsmith::evaluation::refit_top;
use gridsmith::fixtures::base_hyperparameters;
use gridsmith::shap::{
    complete_linkage_order, dependence, explain_model, importance, BackgroundMode, ExplainMode, ShapMatrix,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Complete linkage recomputed from leaf sets at every step.
fn naive_linkage(rows: &Array2<f64>) -> Vec<usize> {
    let d = |a: usize, b: usize| {
        rows.row(a)
            .iter()
            .zip(rows.row(b).iter())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..rows.nrows()).map(|i| (i, vec![i])).collect();
    let mut next = rows.nrows();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let link = clusters[i]
                    .1
                    .iter()
                    .flat_map(|&a| clusters[j].1.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| d(a, b))
                    .fold(0.0, f64::max);
                if link < best.0 {
                    best = (link, i, j);
                }
            }
        }
        let (_, i, j) = best;
        let (idj, lj) = clusters.remove(j);
        let (idi, li) = clusters.remove(i);
        let leaves = if idi < idj { [li, lj].concat() } else { [lj, li].concat() };
        clusters.push((next, leaves));
        next += 1;
    }
    clusters.pop().unwrap().1
}

#[test]
fn linkage_matches_naive_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let n = rng.random_range(2..25);
        let rows = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        assert_eq!(complete_linkage_order(rows.view()), naive_linkage(&rows));
    }
}

fn matrix(values: Array2<f64>) -> ShapMatrix {
    let n = values.nrows();
    ShapMatrix {
        case_ids: (0..n).collect(),
        feature_names: (0..values.ncols()).map(|j| format!("f{j}")).collect(),
        outputs: vec![0.0; n],
        values,
        base_value: 0.0,
    }
}

#[test]
fn importance_is_mean_absolute_attribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let values = Array2::from_shape_fn((30, 5), |(_, j)| rng.random_range(-1.0..1.0) * (j + 1) as f64);
    let ranking = importance(&matrix(values.clone())).unwrap();
    for (name, v) in &ranking {
        let j: usize = name[1..].parse().unwrap();
        let want = values.column(j).iter().map(|x| x.abs()).sum::<f64>() / 30.0;
        assert!((v - want).abs() < 1e-12);
    }
    assert!(ranking.windows(2).all(|w| w[0].1 >= w[1].1));
}

#[test]
fn dependence_correlations_match_covariance_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = Array2::from_shape_fn((40, 4), |_| rng.random_range(0.0..1.0));
    let mut values = Array2::zeros((40, 4));
    for i in 0..40 {
        values[[i, 2]] = 3.0 * data[[i, 2]] + data[[i, 0]];
        values[[i, 1]] = 0.1 * data[[i, 1]];
    }
    let dep = dependence(&matrix(values.clone()), data.view()).unwrap();
    assert_eq!(dep.top_feature, "f2");
    let phi: Vec<f64> = values.column(2).to_vec();
    let r = |x: &[f64], y: &[f64]| {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
        let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        cov / (sx * sy)
    };
    for (name, got) in &dep.ranking {
        let j: usize = name[1..].parse().unwrap();
        assert!((got - r(&data.column(j).to_vec(), &phi)).abs() < 1e-12, "{name}");
    }
    assert_eq!(dep.partner.as_deref(), Some("f0"));
}

#[test]
fn trained_model_attributions() {
    let spec = SynthSpec {
        case_count: 300,
        predictor_count: 8,
        signal_strength: 1.0,
    };
    let data = synth_gen(&spec, 4).unwrap();
    let plan = split(&data, 4).unwrap();
    let mut hp = base_hyperparameters();
    hp.epochs = 40;
    hp.batch_size = 30;
    let model = refit_top(&hp, &data, &plan, 4).unwrap();

    let exact = explain_model(&model, &data, &plan, ExplainMode::Exact, BackgroundMode::Composite, 4).unwrap();
    assert!(exact.max_local_accuracy_gap() < 1e-9);
    let ranking = importance(&exact).unwrap();
    let weakest_signal = ranking
        .iter()
        .filter(|(f, _)| f[1..].parse::<usize>().unwrap() <= spec.informative_count())
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    let strongest_noise = ranking
        .iter()
        .filter(|(f, _)| f[1..].parse::<usize>().unwrap() > spec.informative_count())
        .map(|r| r.1)
        .fold(0.0, f64::max);
    assert!(weakest_signal > strongest_noise, "{ranking:?}");

    // full coalition coverage: 2^8 - 2 = 254 samples enumerate every proper subset
    let kernel = explain_model(
        &model,
        &data,
        &plan,
        ExplainMode::Kernel { n_samples: 254 },
        BackgroundMode::Composite,
        4,
    )
    .unwrap();
    let gap = (&exact.values - &kernel.values).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(gap < 1e-6, "{gap}");

    let centroids = explain_model(&model, &data, &plan, ExplainMode::Exact, BackgroundMode::Centroids, 4).unwrap();
    assert!(centroids.max_local_accuracy_gap() < 1e-9);
}
