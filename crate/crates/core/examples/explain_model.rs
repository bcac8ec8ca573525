//! Shapley attributions for a trained network's validation predictions.

use gridsmith::dataset::{split, synth_gen, SynthSpec};
use gridsmith::evaluation::refit_top;
use gridsmith::fixtures::base_hyperparameters;
use gridsmith::shap::{dependence, explain_model, heatmap_order, importance, BackgroundMode, ExplainMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth_gen(
        &SynthSpec {
            case_count: 400,
            predictor_count: 6,
            signal_strength: 1.0,
        },
        9,
    )?;
    let plan = split(&data, 9)?;
    let model = refit_top(&base_hyperparameters(), &data, &plan, 9)?;

    let shap = explain_model(&model, &data, &plan, ExplainMode::Auto, BackgroundMode::Composite, 9)?;
    println!("base value {:.4}, local accuracy gap {:.1e}", shap.base_value, shap.max_local_accuracy_gap());
    for (name, v) in importance(&shap)? {
        println!("{name:>4} {v:.4}");
    }

    let order = heatmap_order(&shap)?;
    println!("first cases in heatmap order: {:?}", &order.case_order[..5]);

    let (cases, _) = data.subset(&plan.validation_indices);
    let dep = dependence(&shap, cases.view())?;
    println!("top feature {} pairs with {:?}", dep.top_feature, dep.partner);
    Ok(())
}
