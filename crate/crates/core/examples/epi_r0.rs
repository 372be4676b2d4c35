//! Transmission breakdown by activity for each named scenario.

use reopen_core::epi::{beta_total, r0_estimate};
use reopen_core::scenario::{policy_lambda, ScenarioId};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let lockdown = policy_lambda(ScenarioId::Lockdown, &d.calibration, d.codes())?;
    let policies = ScenarioId::NAMED
        .iter()
        .map(|&id| policy_lambda(id, &d.calibration, d.codes()))
        .collect::<Result<Vec<_>, _>>()?;
    println!(
        "{:<32} {:>6} {:>6} {:>6} {:>6} {:>6} {:>6} {:>11}",
        "policy", "work", "school", "cons", "trans", "home", "total", "R0"
    );
    for lambda in &policies {
        let b = beta_total(lambda, &d.epi)?;
        let r = r0_estimate(lambda, &lockdown, &d.epi)?;
        println!(
            "{:<32} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>6.3} {:>5.2}±{:.2}",
            lambda.scenario_id.to_string(),
            b.work,
            b.school,
            b.consumption,
            b.transport,
            b.home,
            b.total,
            r.r0,
            r.r0_sd
        );
    }
    Ok(())
}
