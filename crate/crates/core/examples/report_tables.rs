//! Per-cycle result tables from ledgers on disk.
//!
//! `cargo run --example report_tables -- run/stage1.csv run/stage2.csv`

use gridsmith::analytics::{report_tables, summarize};
use gridsmith::campaign::CampaignLedger;
use gridsmith::fixtures::lr_ledger;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let paths: Vec<String> = std::env::args().skip(1).collect();
    let ledgers = if paths.is_empty() {
        vec![lr_ledger(120, 1), lr_ledger(60, 2)]
    } else {
        paths
            .iter()
            .map(|p| CampaignLedger::read(p.as_ref()))
            .collect::<Result<Vec<_>, _>>()?
    };
    let summary = summarize(&ledgers)?;
    for (name, table) in report_tables(&summary) {
        println!("== {name}\n{table}");
    }
    Ok(())
}
