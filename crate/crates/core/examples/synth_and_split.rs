//! Generate a synthetic dataset, split it and print the fold layout.
//!
//! `cargo run --example synth_and_split -- 400 6`

use gridsmith::dataset::{split, synth_gen, SynthSpec, FOLDS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let cases = args.next().map_or(Ok(400), |s| s.parse())?;
    let features = args.next().map_or(Ok(6), |s| s.parse())?;
    let spec = SynthSpec {
        case_count: cases,
        predictor_count: features,
        signal_strength: 1.0,
    };
    let data = synth_gen(&spec, 11)?;
    println!("{}", data.summary_line());
    println!("informative predictors: x1..x{}", spec.informative_count());

    let plan = split(&data, 11)?;
    println!("validation: {} cases", plan.validation_indices.len());
    for fold in 1..=FOLDS as u8 {
        let idx = plan.fold_indices(fold);
        let pos = idx.iter().filter(|&&i| data.labels[i] == 1).count();
        println!("fold {fold}: {} cases, {pos} positive", idx.len());
    }
    Ok(())
}
