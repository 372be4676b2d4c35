//! Loads a dataset directory and prints its headline numbers.
//!
//! `cargo run --example load_dataset [DIR]`

use reopen_core::{bundled_data_dir, load_dataset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(bundled_data_dir, Into::into);
    let d = load_dataset(&dir, true)?;
    let s = d.economy.summary();
    println!("industries       {}", s.n_industries);
    println!("gross output     {:.1}", s.total_output);
    println!("consumption      {:.1}", s.total_consumption);
    println!("labor income     {:.1}", s.total_labor);
    println!("max residual     {:.2e}", s.max_accounting_residual);
    println!(
        "critical inputs  {}",
        d.criticality.critical.iter().map(Vec::len).sum::<usize>()
    );

    let w = d.employment_weights();
    println!(
        "on-site share    {:.1}%",
        100.0 * d.calibration.onsite_share(w)
    );
    println!(
        "remote share     {:.1}%",
        100.0 * d.calibration.remote_share(w)
    );
    println!(
        "essential share  {:.1}%",
        100.0 * d.calibration.essential_share(w)
    );
    for warning in &d.warnings {
        println!("warning: {warning}");
    }
    Ok(())
}
