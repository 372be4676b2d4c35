//! Decompositions, static input-output models, ensembles and scenario reports.

mod decomposition;
mod ensemble;
mod io;
mod report;

pub use decomposition::{shock_decomposition, ShockDecomposition};
pub use ensemble::{
    perturbation_ensemble, perturbed_calibration, quantile, EnsembleConfig, EnsembleInputs,
    EnsembleSummary, PerturbMode,
};
pub use io::{compare_io, ghosh_primary_inputs, ghosh_solve, leontief_solve, IoComparison};
pub use report::{
    named_scenarios, scenario_report, ReportInputs, ScenarioReport, ScenarioRow, REPORT_WINDOW,
};
