use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{CriticalityMatrix, EconParams, Economy, InventoryTargets, PandemicCalibration};
use crate::engine::Model;
use crate::error::{Error, Result};
use crate::scenario::ShockSchedule;

/// Which first-order shocks get perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbMode {
    #[default]
    Both,
    SupplyOnly,
    DemandOnly,
}

impl PerturbMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbMode::Both => "both",
            PerturbMode::SupplyOnly => "supply_only",
            PerturbMode::DemandOnly => "demand_only",
        }
    }
}

impl fmt::Display for PerturbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PerturbMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        [
            PerturbMode::Both,
            PerturbMode::SupplyOnly,
            PerturbMode::DemandOnly,
        ]
        .into_iter()
        .find(|m| m.as_str() == key)
        .ok_or_else(|| Error::Config(format!("unknown perturbation mode {s:?}")))
    }
}

/// Inputs shared by every ensemble member.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleInputs<'a> {
    pub economy: &'a Economy,
    pub criticality: &'a CriticalityMatrix,
    pub targets: &'a InventoryTargets,
    pub params: &'a EconParams,
    pub calibration: &'a PandemicCalibration,
    /// Industries that reopen when the lockdown ends.
    pub open: &'a [bool],
    pub horizon: usize,
}

/// Perturbation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub sigma: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub mode: PerturbMode,
}

/// Daily quantiles of aggregate output across runs, relative to the initial level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n_runs: usize,
    pub sigma: f64,
    pub mode: PerturbMode,
    pub t: Vec<usize>,
    pub base: Vec<f64>,
    pub q025: Vec<f64>,
    pub q25: Vec<f64>,
    pub median: Vec<f64>,
    pub q75: Vec<f64>,
    pub q975: Vec<f64>,
}

impl EnsembleSummary {
    pub fn is_nested(&self) -> bool {
        (0..self.t.len()).all(|k| {
            self.q025[k] <= self.q25[k]
                && self.q25[k] <= self.median[k]
                && self.median[k] <= self.q75[k]
                && self.q75[k] <= self.q975[k]
        })
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "base", "q025", "q25", "median", "q75", "q975"])?;
        for k in 0..self.t.len() {
            w.write_record([
                self.t[k].to_string(),
                format!("{:?}", self.base[k]),
                format!("{:?}", self.q025[k]),
                format!("{:?}", self.q25[k]),
                format!("{:?}", self.median[k]),
                format!("{:?}", self.q75[k]),
                format!("{:?}", self.q975[k]),
            ])?;
        }
        w.flush()
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Shocks of ensemble member `run`: each magnitude scaled by `1 + N(0, sigma)` and clamped.
pub fn perturbed_calibration(
    calib: &PandemicCalibration,
    config: &EnsembleConfig,
    run: usize,
) -> Result<PandemicCalibration> {
    let normal = Normal::new(0.0, config.sigma)
        .map_err(|e| Error::Config(format!("sigma = {}: {e}", config.sigma)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(run as u64);
    let mut out = calib.clone();
    let n = calib.n();
    let supply = config.mode != PerturbMode::DemandOnly;
    let demand = config.mode != PerturbMode::SupplyOnly;
    for i in 0..n {
        let psi_s = normal.sample(&mut rng);
        let psi_d = normal.sample(&mut rng);
        if supply {
            out.eps_s[i] = (calib.eps_s[i] * (1.0 + psi_s)).clamp(0.0, 1.0);
        }
        if demand {
            out.eps_d[i] = (calib.eps_d[i] * (1.0 + psi_d)).clamp(-1.0, 1.0);
        }
    }
    Ok(out)
}

fn relative_output(inputs: &EnsembleInputs, calib: &PandemicCalibration) -> Result<Vec<f64>> {
    let model = Model::new(
        inputs.economy,
        inputs.criticality,
        inputs.targets,
        inputs.params,
    )?;
    let schedule = ShockSchedule::new(inputs.economy, calib, inputs.params, inputs.open)?;
    let series = model.run(&schedule, inputs.horizon)?;
    let base = series.output[0];
    Ok(series.output.iter().map(|v| v / base).collect())
}

/// Runs the perturbed ensemble in parallel and summarizes aggregate output per day.
pub fn perturbation_ensemble(
    inputs: &EnsembleInputs,
    config: &EnsembleConfig,
) -> Result<EnsembleSummary> {
    if !(config.sigma >= 0.0) {
        return Err(Error::Config(format!(
            "sigma = {} must be nonnegative",
            config.sigma
        )));
    }
    if config.n_runs == 0 {
        return Err(Error::Config("need at least one run".into()));
    }
    let base = relative_output(inputs, inputs.calibration)?;
    let runs = (0..config.n_runs)
        .into_par_iter()
        .map(|run| {
            let calib = perturbed_calibration(inputs.calibration, config, run)?;
            relative_output(inputs, &calib)
        })
        .collect::<Result<Vec<_>>>()?;

    let days = base.len();
    let mut summary = EnsembleSummary {
        n_runs: config.n_runs,
        sigma: config.sigma,
        mode: config.mode,
        t: (0..days).collect(),
        base,
        q025: Vec::with_capacity(days),
        q25: Vec::with_capacity(days),
        median: Vec::with_capacity(days),
        q75: Vec::with_capacity(days),
        q975: Vec::with_capacity(days),
    };
    let mut column = vec![0.0; runs.len()];
    for k in 0..days {
        for (slot, run) in column.iter_mut().zip(&runs) {
            *slot = run[k];
        }
        column.sort_by(f64::total_cmp);
        summary.q025.push(quantile(&column, 0.025));
        summary.q25.push(quantile(&column, 0.25));
        summary.median.push(quantile(&column, 0.5));
        summary.q75.push(quantile(&column, 0.75));
        summary.q975.push(quantile(&column, 0.975));
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&v, 0.1), 1.4);
        assert_eq!(quantile(&[7.0], 0.975), 7.0);
    }

    #[test]
    fn mode_names_parse() {
        assert_eq!(
            "supply-only".parse::<PerturbMode>().unwrap(),
            PerturbMode::SupplyOnly
        );
        assert!("neither".parse::<PerturbMode>().is_err());
    }
}
