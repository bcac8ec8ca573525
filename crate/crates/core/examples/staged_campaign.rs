//! Run a full staged campaign from a config file.
//!
//! `cargo run --release --example staged_campaign -- examples/configs/quick.json /tmp/run`
//!
//! Writes one ledger per cycle plus the report tables into the output
//! directory and prints the per-cycle summary.

use std::path::PathBuf;

use gridsmith::analytics::summarize;
use gridsmith::campaign::{Campaign, CampaignConfig, StageSelector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/quick.json")));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("campaign-out"));

    let campaign = Campaign::from_config(CampaignConfig::from_file(&config)?)?;
    let run = campaign.run(&out, StageSelector::All)?;
    let summary = summarize(&run.ledgers)?;
    for c in &summary.cycles {
        println!(
            "{:<10} {:>4} settings  best {:.4}  all {:.4}  so far {:.4}",
            c.cycle_label, c.midpoint.tns, c.groups.best, c.groups.all, c.cumulative_best
        );
    }
    println!("best {} in {}", summary.best.mean_test_auc, summary.best.cycle_label);
    if let Some(v) = run.validation_auc {
        println!("validation AUC of the refit best setting {v:.4}");
    }
    println!("outputs in {}", out.display());
    Ok(())
}
