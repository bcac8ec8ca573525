//! Five-fold cross-validation of a few learning rates.

use gridsmith::dataset::{split, synth_gen, SynthSpec};
use gridsmith::evaluation::run_cv;
use gridsmith::fixtures::base_hyperparameters;
use gridsmith::searchspace::SettingId;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth_gen(
        &SynthSpec {
            case_count: 500,
            predictor_count: 8,
            signal_strength: 1.0,
        },
        5,
    )?;
    let plan = split(&data, 5)?;
    for (i, lr) in [0.001, 0.01, 0.1].into_iter().enumerate() {
        let mut hp = base_hyperparameters();
        hp.lr = lr;
        let cv = run_cv(&hp, &data, &plan, &SettingId::from(i as u64), 5)?;
        let folds: Vec<String> = cv.fold_aucs.iter().map(|a| format!("{a:.3}")).collect();
        println!("lr {lr:<6} folds [{}] mean {:.4}", folds.join(" "), cv.mean_test_auc);
    }
    Ok(())
}
