//! A complete calibrated dataset directory.

use std::path::{Path, PathBuf};

use crate::data::{
    aggregate_criticality, load_criticality, load_criticality_counts, load_inventory_ratios,
    load_io_table, load_pandemic_calibration, load_params, write_criticality,
    write_inventory_ratios, write_io_table, write_pandemic_calibration, CriticalityMatrix,
    EconParams, Economy, InventoryTargets, IoFormat, PandemicCalibration, RatingGrid,
    SyntheticEconomy,
};
use crate::epi::{load_epi_calibration, load_epi_params, EpiCalibration, EpiParams};
use crate::error::{Error, Result};
use crate::scenario::{Scenario, ScenarioId};

pub const IO_TABLE: &str = "io_table.csv";
pub const CRITICALITY: &str = "criticality.csv";
pub const CRITICALITY_COUNTS: &str = "criticality_counts.csv";
pub const SHOCKS: &str = "shocks.csv";
pub const INVENTORY: &str = "inventory_ratios.csv";
pub const ECON_PARAMS: &str = "econ_params.toml";
pub const EPI_PARAMS: &str = "epi_params.toml";
pub const EPI_PLACES: &str = "epi_places.csv";
pub const EPI_INDUSTRY: &str = "epi_industry.csv";

#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub economy: Economy,
    pub criticality: CriticalityMatrix,
    pub calibration: PandemicCalibration,
    pub targets: InventoryTargets,
    pub params: EconParams,
    pub epi_params: EpiParams,
    pub epi: EpiCalibration,
    pub warnings: Vec<String>,
}

/// The 55-industry dataset shipped with the crate.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/uk55")
}

/// Loads every table in `dir`. Optional files fall back to defaults.
///
/// With `strict`, accounting residuals and rating-count mismatches are errors.
pub fn load_dataset(dir: &Path, strict: bool) -> Result<Dataset> {
    load_dataset_with(dir, IoFormat::Native, strict)
}

/// Like [`load_dataset`], reading the input-output table in `format`.
pub fn load_dataset_with(dir: &Path, format: IoFormat, strict: bool) -> Result<Dataset> {
    let file = |name: &str| dir.join(name);
    let economy = load_io_table(&file(IO_TABLE), format, strict)?;
    let mut warnings = economy.validate(strict)?;
    let codes = &economy.codes;

    let grid = load_criticality(&file(CRITICALITY), codes)?;
    let (criticality, mut crit_warnings) = aggregate_criticality(&[grid])?;
    warnings.append(&mut crit_warnings);
    if file(CRITICALITY_COUNTS).exists() {
        let counts = load_criticality_counts(&file(CRITICALITY_COUNTS), codes)?;
        let no_own_use: Vec<bool> = (0..economy.n()).map(|i| economy.a[(i, i)] == 0.0).collect();
        let mismatches = criticality.check_counts(&counts, &no_own_use);
        if strict && !mismatches.is_empty() {
            return Err(Error::Validation(format!(
                "criticality counts differ: {}",
                mismatches.join("; ")
            )));
        }
        warnings.extend(mismatches);
    }

    let calibration = load_pandemic_calibration(&file(SHOCKS), codes)?;
    let targets = load_inventory_ratios(&file(INVENTORY), codes)?;
    let params = if file(ECON_PARAMS).exists() {
        load_params(&file(ECON_PARAMS))?
    } else {
        EconParams::default()
    };
    let epi_params = if file(EPI_PARAMS).exists() {
        load_epi_params(&file(EPI_PARAMS))?
    } else {
        EpiParams::default()
    };
    let epi = load_epi_calibration(&file(EPI_PLACES), &file(EPI_INDUSTRY), &epi_params, codes)?;
    for w in &warnings {
        log::debug!("{w}");
    }
    if !warnings.is_empty() {
        log::warn!(
            "{}: {} dataset warnings, e.g. {}",
            dir.display(),
            warnings.len(),
            warnings[0]
        );
    }
    Ok(Dataset {
        dir: dir.to_path_buf(),
        economy,
        criticality,
        calibration,
        targets,
        params,
        epi_params,
        epi,
        warnings,
    })
}

/// Contact survey shipped with the bundled data; synthetic datasets reuse it.
const BUNDLED_PLACES: &str = include_str!("../../../data/uk55/epi_places.csv");

/// Share of the population employed, spread over industries by labor compensation.
const SYNTHETIC_EMPLOYED: f64 = 0.5;

/// Writes a generated economy as a dataset directory that [`load_dataset`] accepts.
pub fn write_synthetic_dataset(syn: &SyntheticEconomy, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    synthetic_dataset_files(syn)?
        .into_iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

/// File names and contents of the dataset [`write_synthetic_dataset`] writes.
///
/// Consumption venues of the contact survey are assigned round-robin to the
/// on-site industries (the largest consumer industries when none is on-site).
pub fn synthetic_dataset_files(syn: &SyntheticEconomy) -> Result<Vec<(&'static str, Vec<u8>)>> {
    let economy = &syn.economy;
    let codes = &economy.codes;
    let n = economy.n();
    let mut files = Vec::new();
    let mut emit =
        |name: &'static str, body: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
            let mut buf = Vec::new();
            body(&mut buf).map_err(|e| Error::io(name, e))?;
            files.push((name, buf));
            Ok(())
        };

    let grid = RatingGrid::new(
        n,
        (0..n)
            .flat_map(|i| (0..n).map(move |j| Some(syn.criticality.ratings[(i, j)])))
            .collect(),
    )?;
    emit(IO_TABLE, &|b| write_io_table(economy, b))?;
    emit(CRITICALITY, &|b| write_criticality(&grid, codes, b))?;
    emit(SHOCKS, &|b| {
        write_pandemic_calibration(&syn.calibration, codes, b)
    })?;
    emit(INVENTORY, &|b| {
        write_inventory_ratios(&syn.targets, codes, b)
    })?;

    let mut venues: Vec<usize> = (0..n).filter(|&i| syn.calibration.onsite[i]).collect();
    if venues.is_empty() {
        venues = (0..n).collect();
        venues.sort_by(|&a, &b| economy.c0[b].total_cmp(&economy.c0[a]));
    }
    emit(EPI_PLACES, &|b| {
        let mut r = csv::Reader::from_reader(BUNDLED_PLACES.as_bytes());
        let mut w = csv::Writer::from_writer(b);
        let header = r.headers()?.clone();
        let cat = header.iter().position(|h| h == "category").unwrap_or(1);
        let ind = header
            .iter()
            .position(|h| h == "industry")
            .unwrap_or(header.len() - 1);
        w.write_record(&header)?;
        let mut k = 0;
        for rec in r.records() {
            let mut row: Vec<String> = rec?.iter().map(str::to_string).collect();
            row[ind] = if row[cat] == "consume" {
                k += 1;
                codes[venues[(k - 1) % venues.len()]].clone()
            } else {
                String::new()
            };
            w.write_record(&row)?;
        }
        w.flush()
    })?;

    let labor = economy.l0.sum();
    emit(EPI_INDUSTRY, &|b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["code", "exposure", "proximity", "eta"])?;
        for (i, code) in codes.iter().enumerate() {
            let proximity = 30.0 + 50.0 * (1.0 - syn.calibration.rli[i]);
            let eta = SYNTHETIC_EMPLOYED * economy.l0[i] / labor;
            w.write_record([
                code.clone(),
                "40".into(),
                format!("{proximity}"),
                format!("{eta}"),
            ])?;
        }
        w.flush()
    })?;
    Ok(files)
}

impl Dataset {
    pub fn bundled() -> Result<Self> {
        load_dataset(&bundled_data_dir(), false)
    }

    pub fn codes(&self) -> &[String] {
        &self.economy.codes
    }

    /// Files that were read, in a fixed order.
    pub fn files(&self) -> Vec<PathBuf> {
        [
            IO_TABLE,
            CRITICALITY,
            CRITICALITY_COUNTS,
            SHOCKS,
            INVENTORY,
            ECON_PARAMS,
            EPI_PARAMS,
            EPI_PLACES,
            EPI_INDUSTRY,
        ]
        .iter()
        .map(|f| self.dir.join(f))
        .filter(|p| p.exists())
        .collect()
    }

    pub fn scenario(&self, id: ScenarioId) -> Result<Scenario> {
        Scenario::named(id, &self.calibration, self.codes())
    }

    /// Employment weights: population share working in each industry.
    pub fn employment_weights(&self) -> &[f64] {
        &self.epi.eta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_synthetic_economy;

    #[test]
    fn synthetic_dataset_round_trips() {
        let dir = std::env::temp_dir().join(format!("reopen-synth-{}", std::process::id()));
        let syn = generate_synthetic_economy(6, 3).unwrap();
        let files = write_synthetic_dataset(&syn, &dir).unwrap();
        assert_eq!(files.len(), 6);
        let d = load_dataset(&dir, true).unwrap();
        assert_eq!(d.economy.x0, syn.economy.x0);
        assert_eq!(d.criticality, syn.criticality);
        // Percent text cannot always reproduce a fraction to the last bit.
        for (a, b) in d.calibration.ess_w.iter().zip(&syn.calibration.ess_w) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(d.calibration.onsite, syn.calibration.onsite);
        assert!((d.epi.b_c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
