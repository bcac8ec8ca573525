//! Train one network and score it on the held-out rows.

use gridsmith::dataset::{split, synth_gen, SynthSpec};
use gridsmith::dfnn::{train, Activation, DfnnHyperparameters, Initializer, Optimizer};
use gridsmith::evaluation::{auc, Scorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth_gen(
        &SynthSpec {
            case_count: 600,
            predictor_count: 8,
            signal_strength: 1.0,
        },
        3,
    )?;
    let plan = split(&data, 3)?;
    let hp = DfnnHyperparameters {
        nodes: vec![16, 8],
        af: Activation::Tanh,
        ki: Initializer::GlorotUniform,
        opt: Optimizer::Adam,
        lr: 0.01,
        mom: 0.0,
        decay: 0.0,
        dropout: 0.1,
        epochs: 40,
        batch_size: 32,
        l1: 0.0,
        l2: 0.001,
    };
    let (rows, labels) = data.subset(&plan.train_test_indices);
    let (model, report) = train(&hp, rows.view(), &labels, 3)?;
    println!(
        "{} epochs, {} steps, final loss {:.4}, {:.2} s",
        report.epochs_run, report.update_steps, report.final_loss, report.wall_seconds
    );

    let (val_rows, val_labels) = data.subset(&plan.validation_indices);
    let scores = model.score(val_rows.view());
    println!("validation AUC {:.4}", auc(&scores, &val_labels)?);
    println!("model file is {} bytes of JSON", model.to_json().len());
    Ok(())
}
