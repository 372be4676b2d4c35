//! The operations behind each subcommand and endpoint, producing in-memory artifacts.

use reopen_core::analysis::{
    compare_io, named_scenarios, perturbation_ensemble, scenario_report, EnsembleConfig,
    EnsembleInputs, EnsembleSummary, PerturbMode, ReportInputs, ScenarioReport, ScenarioRow,
};
use reopen_core::data::{generate_synthetic_economy, EconParams};
use reopen_core::engine::{Model, SimSeries};
use reopen_core::epi::{BetaBreakdown, R0Estimate};
use reopen_core::scenario::{Scenario, ScenarioId, ScenarioSpec, ShockSchedule};
use reopen_core::{load_dataset, synthetic_dataset_files, Dataset, Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::{apply_param_overrides, RunConfig};

/// Longest simulation accepted, in days.
pub const MAX_HORIZON: usize = 3650;
pub const MAX_RUNS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFormat {
    #[default]
    Csv,
    Json,
}

/// A replayable operation. Serving is not one: it produces no artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Simulate { format: SeriesFormat },
    Scenarios,
    Sensitivity,
    CompareIo,
    EpiR0,
    Synth { industries: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Scenarios => "scenarios",
            Command::Sensitivity => "sensitivity",
            Command::CompareIo => "compare-io",
            Command::EpiR0 => "epi-r0",
            Command::Synth { .. } => "synth",
        }
    }

    pub fn needs_dataset(&self) -> bool {
        !matches!(self, Command::Synth { .. })
    }
}

/// One output file, held in memory until it is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: &str, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.to_string(),
            bytes,
        }
    }

    fn json(name: &str, value: &impl Serialize) -> Result<Self> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
        bytes.push(b'\n');
        Ok(Artifact::new(name, bytes))
    }

    fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Self> {
        let mut bytes = Vec::new();
        write(&mut bytes).map_err(|e| Error::Numerical(format!("writing {name}: {e}")))?;
        Ok(Artifact::new(name, bytes))
    }
}

/// A loaded dataset with the run's parameter overrides applied.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub dataset: Dataset,
    pub params: EconParams,
}

impl Context {
    pub fn load(config: RunConfig) -> Result<Self> {
        let dataset = load_dataset(&config.resolve_data_dir(), config.strict)?;
        Self::new(config, dataset)
    }

    pub fn new(config: RunConfig, dataset: Dataset) -> Result<Self> {
        let params = apply_param_overrides(&dataset.params, &config.params)?;
        Ok(Context {
            config,
            dataset,
            params,
        })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.config
            .scenario
            .resolve(&self.dataset.calibration, self.dataset.codes())
    }

    pub fn horizon(&self) -> Result<usize> {
        check_horizon(self.config.horizon.unwrap_or(self.params.t_end_pandemic))
    }
}

pub fn check_horizon(horizon: usize) -> Result<usize> {
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(Error::Validation(format!(
            "horizon {horizon} must lie in 1..={MAX_HORIZON}"
        )));
    }
    Ok(horizon)
}

/// Value-added effect of a scenario relative to continued lockdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaChange {
    /// Mean over the first month after reopening, in percentage points.
    pub window_mean_pp: f64,
    pub gdp_pct: f64,
    /// Level on the last day of that month, in percentage points.
    pub month_end_pp: f64,
    pub month_end_gdp_pct: f64,
}

impl From<&ScenarioRow> for VaChange {
    fn from(r: &ScenarioRow) -> Self {
        VaChange {
            window_mean_pp: r.va_change_pp,
            gdp_pct: r.gdp_pct,
            month_end_pp: r.month_end_change_pp,
            month_end_gdp_pct: r.month_end_gdp_pct,
        }
    }
}

/// A simulated scenario with its transmission and value-added scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub scenario: String,
    pub open: Vec<String>,
    pub horizon: usize,
    pub beta: BetaBreakdown,
    pub r0: R0Estimate,
    pub va_change: VaChange,
    pub series: SimSeries,
}

fn report_inputs<'a>(dataset: &'a Dataset, params: &'a EconParams) -> ReportInputs<'a> {
    ReportInputs {
        economy: &dataset.economy,
        criticality: &dataset.criticality,
        targets: &dataset.targets,
        params,
        calibration: &dataset.calibration,
        epi: &dataset.epi,
    }
}

/// Runs one scenario for `horizon` days and scores it against lockdown.
pub fn simulate(
    dataset: &Dataset,
    params: &EconParams,
    scenario: &Scenario,
    horizon: usize,
) -> Result<SimulationResult> {
    let horizon = check_horizon(horizon)?;
    let report = scenario_report(
        std::slice::from_ref(scenario),
        &report_inputs(dataset, params),
    )?;
    let row = &report.rows[0];
    let model = Model::new(
        &dataset.economy,
        &dataset.criticality,
        &dataset.targets,
        params,
    )?;
    let schedule =
        ShockSchedule::for_scenario(&dataset.economy, &dataset.calibration, params, scenario)?;
    let series = model.run(&schedule, horizon)?;
    Ok(SimulationResult {
        scenario: scenario.id.to_string(),
        open: scenario
            .open_codes(dataset.codes())
            .into_iter()
            .map(String::from)
            .collect(),
        horizon,
        beta: row.beta,
        r0: row.r0,
        va_change: row.into(),
        series,
    })
}

pub fn report(dataset: &Dataset, params: &EconParams) -> Result<ScenarioReport> {
    let scenarios = named_scenarios(&dataset.calibration, dataset.codes())?;
    scenario_report(&scenarios, &report_inputs(dataset, params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRequest {
    pub sigma: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub mode: PerturbMode,
    pub horizon: usize,
}

pub fn sensitivity(
    dataset: &Dataset,
    params: &EconParams,
    scenario: &Scenario,
    req: &SensitivityRequest,
) -> Result<EnsembleSummary> {
    let horizon = check_horizon(req.horizon)?;
    if !(0.0..=1.0).contains(&req.sigma) {
        return Err(Error::Validation(format!(
            "sigma = {} must lie in [0, 1]",
            req.sigma
        )));
    }
    if req.n_runs == 0 || req.n_runs > MAX_RUNS {
        return Err(Error::Validation(format!(
            "n_runs = {} must lie in 1..={MAX_RUNS}",
            req.n_runs
        )));
    }
    let inputs = EnsembleInputs {
        economy: &dataset.economy,
        criticality: &dataset.criticality,
        targets: &dataset.targets,
        params,
        calibration: &dataset.calibration,
        open: &scenario.open,
        horizon,
    };
    perturbation_ensemble(
        &inputs,
        &EnsembleConfig {
            sigma: req.sigma,
            n_runs: req.n_runs,
            seed: req.seed,
            mode: req.mode,
        },
    )
}

/// Scenario for an ensemble: full reopening unless something else is asked for.
pub fn ensemble_spec(spec: &ScenarioSpec) -> ScenarioSpec {
    if *spec == ScenarioSpec::default() {
        ScenarioSpec::named(ScenarioId::Open)
    } else {
        spec.clone()
    }
}

/// Transmission breakdown of one policy, as printed by `epi-r0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiR0 {
    pub scenario: String,
    pub beta: BetaBreakdown,
    pub r0: f64,
    pub r0_sd: f64,
    pub r0_unrescaled: f64,
    pub r0_unrescaled_sd: f64,
}

pub fn epi_r0(dataset: &Dataset, scenario: &Scenario) -> Result<EpiR0> {
    let lockdown = dataset.scenario(ScenarioId::Lockdown)?;
    let beta = reopen_core::epi::beta_total(&scenario.lambda, &dataset.epi)?;
    let r = reopen_core::epi::r0_estimate(&scenario.lambda, &lockdown.lambda, &dataset.epi)?;
    Ok(EpiR0 {
        scenario: scenario.id.to_string(),
        beta,
        r0: r.r0,
        r0_sd: r.r0_sd,
        r0_unrescaled: r.r0_unrescaled,
        r0_unrescaled_sd: r.r0_unrescaled_sd,
    })
}

/// Runs `cmd`. The first artifact is the one printed when no output directory is given.
pub fn execute(cmd: &Command, config: &RunConfig) -> Result<Vec<Artifact>> {
    if let Command::Synth { industries } = cmd {
        return synth(*industries, config.seed);
    }
    let ctx = Context::load(config.clone())?;
    execute_with(cmd, &ctx)
}

pub fn execute_with(cmd: &Command, ctx: &Context) -> Result<Vec<Artifact>> {
    let d = &ctx.dataset;
    match cmd {
        Command::Simulate { format } => {
            let scenario = ctx.scenario()?;
            let result = simulate(d, &ctx.params, &scenario, ctx.horizon()?)?;
            let series = match format {
                SeriesFormat::Csv => Artifact::csv("series.csv", |b| result.series.write_csv(b))?,
                SeriesFormat::Json => Artifact::json("series.json", &result.series)?,
            };
            let mut summary =
                serde_json::to_value(&result).map_err(|e| Error::Numerical(e.to_string()))?;
            if let Some(map) = summary.as_object_mut() {
                map.remove("series");
            }
            Ok(vec![series, Artifact::json("summary.json", &summary)?])
        }
        Command::Scenarios => {
            let r = report(d, &ctx.params)?;
            Ok(vec![
                Artifact::csv("scenarios.csv", |b| r.write_csv(b))?,
                Artifact::json("scenarios.json", &r)?,
            ])
        }
        Command::Sensitivity => {
            let s = &ctx.config.sensitivity;
            let req = SensitivityRequest {
                sigma: s.sigma,
                n_runs: s.n_runs,
                seed: ctx.config.seed,
                mode: s.mode,
                horizon: ctx.horizon()?,
            };
            let scenario =
                ensemble_spec(&ctx.config.scenario).resolve(&d.calibration, d.codes())?;
            let bands = sensitivity(d, &ctx.params, &scenario, &req)?;
            Ok(vec![Artifact::csv("bands.csv", |b| bands.write_csv(b))?])
        }
        Command::CompareIo => {
            let cmp = compare_io(&d.economy, &d.calibration)?;
            Ok(vec![Artifact::csv("io_comparison.csv", |b| {
                cmp.write_csv(b)
            })?])
        }
        Command::EpiR0 => Ok(vec![Artifact::json(
            "epi_r0.json",
            &epi_r0(d, &ctx.scenario()?)?,
        )?]),
        Command::Synth { industries } => synth(*industries, ctx.config.seed),
    }
}

fn synth(industries: usize, seed: u64) -> Result<Vec<Artifact>> {
    let syn = generate_synthetic_economy(industries, seed)?;
    Ok(synthetic_dataset_files(&syn)?
        .into_iter()
        .map(|(name, bytes)| Artifact::new(name, bytes))
        .collect())
}
