//! Running registered experiments programmatically and reading reports.
//!
//! cargo run --release --example run_experiment [name]

use dyadlab::verification::{list_experiments, run_experiment};
use dyadlab::{Result, RunConfig};

fn main() -> Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "prop14".to_string());
    println!("registered experiments:");
    for e in list_experiments() {
        println!("  {:<18} {}", e.name, e.description);
    }
    let cfg = RunConfig {
        depth: 6,
        trials: 20,
        seed: 4,
        ..RunConfig::default()
    };
    let report = run_experiment(&name, &cfg)?;
    println!("\n{}: {} records over columns {:?}", report.experiment, report.records.len(), report.columns);
    for (key, s) in &report.summary {
        println!("  {key:<28} min {:>11.4e} median {:>11.4e} max {:>11.4e}", s.min, s.median, s.max);
    }
    for c in &report.checks {
        let kind = if c.contract { "contract " } else { "empirical" };
        println!("  [{kind}] {:<5} {} ({})", c.passed, c.name, c.detail);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    Ok(())
}
