//! Compares household consumption rules over the full pandemic.

use reopen_core::data::{ConsFn, EconParams};
use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::{ScenarioId, ShockSchedule};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let scenario = d.scenario(ScenarioId::Open)?;
    for cons_fn in [ConsFn::Muellbauer, ConsFn::Keynesian, ConsFn::Fixed] {
        let params = EconParams {
            cons_fn,
            ..d.params.clone()
        };
        let model = Model::new(&d.economy, &d.criticality, &d.targets, &params)?;
        let schedule = ShockSchedule::for_scenario(&d.economy, &d.calibration, &params, &scenario)?;
        let s = model.run(&schedule, params.t_end_pandemic)?;
        let c = SimSeries::relative(&s.consumption);
        let low = c.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{:<12} trough {:5.1}%  end {:5.1}%",
            format!("{cons_fn:?}"),
            100.0 * low,
            100.0 * c[c.len() - 1]
        );
    }
    Ok(())
}
