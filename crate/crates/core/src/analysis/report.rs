use serde::Serialize;

use crate::data::{CriticalityMatrix, EconParams, Economy, InventoryTargets, PandemicCalibration};
use crate::engine::{Model, SimSeries};
use crate::epi::{beta_total, r0_estimate, BetaBreakdown, EpiCalibration, R0Estimate};
use crate::error::Result;
use crate::scenario::{policy_lambda, Scenario, ScenarioId, ShockSchedule};

/// Days after reopening over which value added is averaged.
pub const REPORT_WINDOW: usize = 30;

/// Inputs of a scenario report.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub economy: &'a Economy,
    pub criticality: &'a CriticalityMatrix,
    pub targets: &'a InventoryTargets,
    pub params: &'a EconParams,
    pub calibration: &'a PandemicCalibration,
    pub epi: &'a EpiCalibration,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRow {
    pub scenario: ScenarioId,
    pub description: String,
    pub beta: BetaBreakdown,
    pub r0: R0Estimate,
    /// Mean value added over the window minus the continued-lockdown mean, in points of initial value added.
    pub va_change_pp: f64,
    /// Mean value added over the window, percent of initial value added.
    pub gdp_pct: f64,
    /// Value added on the last day of the window minus continued lockdown on that day, in points.
    pub month_end_change_pp: f64,
    /// Value added on the last day of the window, percent of initial value added.
    pub month_end_gdp_pct: f64,
    /// Daily value added relative to the initial level.
    pub value_added: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub t_reopen: usize,
    pub window: usize,
    pub lockdown_gdp_pct: f64,
    pub lockdown_month_end_gdp_pct: f64,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioReport {
    pub fn row(&self, id: ScenarioId) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.scenario == id)
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "scenario",
            "beta_work",
            "beta_school",
            "beta_consumption",
            "beta_transport",
            "beta_home",
            "beta_total",
            "r0",
            "r0_sd",
            "r0_unrescaled",
            "r0_unrescaled_sd",
            "va_change_pp",
            "gdp_pct",
            "month_end_change_pp",
            "month_end_gdp_pct",
        ])?;
        for r in &self.rows {
            let mut rec = vec![r.scenario.to_string()];
            rec.extend(
                [
                    r.beta.work,
                    r.beta.school,
                    r.beta.consumption,
                    r.beta.transport,
                    r.beta.home,
                    r.beta.total,
                    r.r0.r0,
                    r.r0.r0_sd,
                    r.r0.r0_unrescaled,
                    r.r0.r0_unrescaled_sd,
                    r.va_change_pp,
                    r.gdp_pct,
                    r.month_end_change_pp,
                    r.month_end_gdp_pct,
                ]
                .iter()
                .map(|v| format!("{v:?}")),
            );
            w.write_record(&rec)?;
        }
        w.flush()
    }
}

fn window_va(series: &SimSeries, from: usize) -> f64 {
    SimSeries::window_mean(&series.value_added, from, from + REPORT_WINDOW) / series.value_added[0]
}

fn month_end_va(series: &SimSeries, from: usize) -> f64 {
    series.value_added[from + REPORT_WINDOW] / series.value_added[0]
}

/// Simulates each scenario through the first month after reopening and scores it against continued lockdown.
pub fn scenario_report(scenarios: &[Scenario], inputs: &ReportInputs) -> Result<ScenarioReport> {
    let codes = &inputs.economy.codes;
    let model = Model::new(
        inputs.economy,
        inputs.criticality,
        inputs.targets,
        inputs.params,
    )?;
    let t_reopen = inputs.params.t_end_lockdown;
    let horizon = t_reopen + REPORT_WINDOW;
    let lockdown = policy_lambda(ScenarioId::Lockdown, inputs.calibration, codes)?;

    let closed = ShockSchedule::indefinite(inputs.economy, inputs.calibration, inputs.params)?;
    let counterfactual = model.run(&closed, horizon)?;
    let lockdown_va = window_va(&counterfactual, t_reopen);
    let lockdown_end = month_end_va(&counterfactual, t_reopen);

    let rows = scenarios
        .iter()
        .map(|sc| {
            let schedule =
                ShockSchedule::for_scenario(inputs.economy, inputs.calibration, inputs.params, sc)?;
            let series = model.run(&schedule, horizon)?;
            let va = window_va(&series, t_reopen);
            let end = month_end_va(&series, t_reopen);
            Ok(ScenarioRow {
                scenario: sc.id,
                description: sc.id.description().to_string(),
                beta: beta_total(&sc.lambda, inputs.epi)?,
                r0: r0_estimate(&sc.lambda, &lockdown, inputs.epi)?,
                va_change_pp: 100.0 * (va - lockdown_va),
                gdp_pct: 100.0 * va,
                month_end_change_pp: 100.0 * (end - lockdown_end),
                month_end_gdp_pct: 100.0 * end,
                value_added: SimSeries::relative(&series.value_added),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioReport {
        t_reopen,
        window: REPORT_WINDOW,
        lockdown_gdp_pct: 100.0 * lockdown_va,
        lockdown_month_end_gdp_pct: 100.0 * lockdown_end,
        rows,
    })
}

/// The six named scenarios.
pub fn named_scenarios(calib: &PandemicCalibration, codes: &[String]) -> Result<Vec<Scenario>> {
    ScenarioId::NAMED
        .iter()
        .map(|id| Scenario::named(*id, calib, codes))
        .collect()
}
