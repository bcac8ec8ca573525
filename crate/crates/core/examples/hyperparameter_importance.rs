//! Which hyperparameters moved the score in a search ledger.
//!
//! Pass a ledger CSV to explain it, or run without arguments to use a
//! synthetic ledger whose score depends on the learning rate alone.

use gridsmith::campaign::CampaignLedger;
use gridsmith::fixtures::lr_ledger;
use gridsmith::shap::hyperparameter_shap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ledger = match std::env::args().nth(1) {
        Some(path) => CampaignLedger::read(path.as_ref())?,
        None => lr_ledger(300, 1),
    };
    let h = hyperparameter_shap(&ledger.rows, 1)?;
    println!("{} rows, {} held out", ledger.len(), h.holdout.nrows());
    for (name, v) in &h.importance {
        println!("{name:>10} {v:.5}");
    }
    Ok(())
}
