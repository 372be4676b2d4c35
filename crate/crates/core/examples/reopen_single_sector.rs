//! Reopens one industry on top of the lockdown and reports the gain.
//!
//! `cargo run --example reopen_single_sector [CODE]`

use reopen_core::analysis::REPORT_WINDOW;
use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::{ScenarioSpec, ShockSchedule};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let code = std::env::args().nth(1).unwrap_or_else(|| "N".into());
    let d = Dataset::bundled()?;
    let model = Model::new(&d.economy, &d.criticality, &d.targets, &d.params)?;
    let from = d.params.t_end_lockdown;
    let horizon = from + REPORT_WINDOW;

    let mut va = Vec::new();
    for open in [vec![], vec![code.clone()]] {
        let spec = ScenarioSpec {
            open: Some(open),
            ..Default::default()
        };
        let scenario = spec.resolve(&d.calibration, d.codes())?;
        let schedule =
            ShockSchedule::for_scenario(&d.economy, &d.calibration, &d.params, &scenario)?;
        let s = model.run(&schedule, horizon)?;
        va.push(SimSeries::relative(&s.value_added));
    }
    let mean = |v: &[f64]| SimSeries::window_mean(v, from, horizon);
    println!("reopening {code}");
    println!(
        "  window mean gain  {:+.2}pp",
        100.0 * (mean(&va[1]) - mean(&va[0]))
    );
    println!(
        "  month-end gain    {:+.2}pp",
        100.0 * (va[1][horizon] - va[0][horizon])
    );
    Ok(())
}
