//! The six reopening scenarios: transmission, R0 and value added.

use reopen_core::analysis::{named_scenarios, scenario_report, ReportInputs};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = Dataset::bundled()?;
    let scenarios = named_scenarios(&d.calibration, d.codes())?;
    let report = scenario_report(
        &scenarios,
        &ReportInputs {
            economy: &d.economy,
            criticality: &d.criticality,
            targets: &d.targets,
            params: &d.params,
            calibration: &d.calibration,
            epi: &d.epi,
        },
    )?;
    println!(
        "{:<32} {:>6} {:>6} {:>9} {:>9}",
        "scenario", "beta", "R0", "VA pp", "month-end"
    );
    for row in &report.rows {
        println!(
            "{:<32} {:>6.3} {:>6.2} {:>+9.2} {:>+9.2}",
            row.scenario.to_string(),
            row.beta.total,
            row.r0.r0,
            row.va_change_pp,
            row.month_end_change_pp
        );
    }
    println!(
        "lockdown GDP {:.1}% of pre-pandemic",
        report.lockdown_gdp_pct
    );
    Ok(())
}
