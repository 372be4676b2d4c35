//! Sweeps the unemployment benefit and the hiring and firing speeds.

use reopen_core::data::EconParams;
use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::{ScenarioId, ShockSchedule};
use reopen_core::Dataset;

fn run(d: &Dataset, params: &EconParams) -> Result<f64, reopen_core::Error> {
    let scenario = d.scenario(ScenarioId::Open)?;
    let model = Model::new(&d.economy, &d.criticality, &d.targets, params)?;
    let schedule = ShockSchedule::for_scenario(&d.economy, &d.calibration, params, &scenario)?;
    let s = model.run(&schedule, params.t_end_pandemic)?;
    let va = SimSeries::relative(&s.value_added);
    Ok(SimSeries::window_mean(&va, 1, va.len()))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    println!("mean value added over the pandemic, share of pre-pandemic");
    for b in [0.6, 0.8, 1.0] {
        let p = EconParams {
            b,
            ..d.params.clone()
        };
        println!("  benefit b = {b:.1}          {:.4}", run(&d, &p)?);
    }
    for days in [15.0, 30.0, 60.0] {
        let p = EconParams {
            gamma_h: 1.0 / days,
            ..d.params.clone()
        };
        println!("  hiring over {days:>2} days      {:.4}", run(&d, &p)?);
    }
    for days in [5.0, 10.0, 15.0] {
        let p = EconParams {
            gamma_f: 1.0 / days,
            ..d.params.clone()
        };
        println!("  firing over {days:>2} days      {:.4}", run(&d, &p)?);
    }
    Ok(())
}
