//! Runs the baseline lockdown and writes the daily series as CSV.
//!
//! `cargo run --example lockdown_simulation > lockdown.csv`

use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::{ScenarioId, ShockSchedule};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let scenario = d.scenario(ScenarioId::Lockdown)?;
    let model = Model::new(&d.economy, &d.criticality, &d.targets, &d.params)?;
    let schedule = ShockSchedule::for_scenario(&d.economy, &d.calibration, &d.params, &scenario)?;
    let series = model.run(&schedule, 180)?;

    let va = SimSeries::relative(&series.value_added);
    for t in [0, 2, 30, 62, 90, 180] {
        eprintln!("day {t:>3}  value added {:5.1}%", 100.0 * va[t]);
    }
    series.write_csv(&mut std::io::stdout().lock())?;
    Ok(())
}
