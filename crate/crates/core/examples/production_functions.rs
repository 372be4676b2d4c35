//! Indefinite lockdown under each production function.

use reopen_core::data::{EconParams, ProdFn};
use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::ShockSchedule;
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    println!(
        "{:<20} {:>8} {:>8} {:>8}",
        "production fn", "day 30", "day 90", "day 180"
    );
    for prod_fn in ProdFn::ALL {
        let params = EconParams {
            prod_fn,
            ..d.params.clone()
        };
        let model = Model::new(&d.economy, &d.criticality, &d.targets, &params)?;
        let schedule = ShockSchedule::indefinite(&d.economy, &d.calibration, &params)?;
        let out = SimSeries::relative(&model.run(&schedule, 180)?.output);
        println!(
            "{:<20} {:>8.3} {:>8.3} {:>8.3}",
            prod_fn.as_str(),
            out[30],
            out[90],
            out[180]
        );
    }
    Ok(())
}
