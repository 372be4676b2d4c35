//! Static demand-driven and supply-driven predictions of the first lockdown shock.

use reopen_core::analysis::compare_io;
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let cmp = compare_io(&d.economy, &d.calibration)?;
    let (leontief, ghosh) = cmp.aggregate_ratios();
    println!("aggregate output, share of pre-lockdown");
    println!("  Leontief (demand shock) {:.3}", leontief);
    println!("  Ghosh (supply shock)    {:.3}", ghosh);
    if std::env::args().any(|a| a == "--csv") {
        cmp.write_csv(&mut std::io::stdout().lock())?;
    }
    Ok(())
}
