//! Splits each industry's output loss into its own shock and the network's.

use reopen_core::analysis::shock_decomposition;
use reopen_core::engine::Model;
use reopen_core::scenario::ShockSchedule;
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let day = 30;
    let model = Model::new(&d.economy, &d.criticality, &d.targets, &d.params)?;
    let schedule = ShockSchedule::indefinite(&d.economy, &d.calibration, &d.params)?;
    let series = model.run(&schedule, day)?;
    let dec = shock_decomposition(&series, &d.calibration, &d.economy, day)?;

    let mut order: Vec<usize> = (0..dec.codes.len()).collect();
    order.sort_by(|&a, &b| dec.os_indirect[a].total_cmp(&dec.os_indirect[b]));
    println!("largest network losses on day {day}");
    println!(
        "{:<10} {:>8} {:>8} {:>8}",
        "industry", "direct", "network", "total"
    );
    for &i in order.iter().take(12) {
        println!(
            "{:<10} {:>8.3} {:>8.3} {:>8.3}",
            dec.codes[i], dec.os_direct[i], dec.os_indirect[i], dec.os_total[i]
        );
    }
    Ok(())
}
