//! Loading, validating and generating the datasets the models run on.

mod calibration;
mod criticality;
mod economy;
mod inventory;
mod params;
mod synth;

use std::path::Path;

pub use calibration::{
    load_pandemic_calibration, write_pandemic_calibration, PandemicCalibration, ONSITE_CODES,
    RETAIL_CODE,
};
pub use criticality::{
    aggregate_criticality, load_criticality, load_criticality_counts, write_criticality,
    CriticalityCounts, CriticalityMatrix, RatingGrid,
};
pub use economy::{
    load_io_table, write_io_table, Economy, EconomySummary, IoFormat, ACCOUNTING_TOL,
};
pub use inventory::{
    inventory_targets_from_ratios, load_inventory_ratios, write_inventory_ratios, InventoryTargets,
    DAYS_PER_MONTH,
};
pub use params::{load_params, ConsFn, EconParams, ProdFn, RecoveryOrigin, RHO_TABLE};
pub use synth::{generate_synthetic_economy, SyntheticEconomy};

use crate::error::{Error, Result};

/// Reads a CSV file into string records, header included.
pub(crate) fn read_records(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push(rec.iter().map(str::to_string).collect());
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::parse(path, e.to_string())
    }
}

pub(crate) fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(path, format!("not a number: {s:?}")))
}

/// Reads a headed CSV into rows of (column name -> value).
pub(crate) struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut records = read_records(path)?;
        if records.is_empty() {
            return Err(Error::parse(path, "empty file"));
        }
        let header = records.remove(0);
        for (k, r) in records.iter().enumerate() {
            if r.len() != header.len() {
                return Err(Error::parse(
                    path,
                    format!(
                        "line {} has {} fields, expected {}",
                        k + 2,
                        r.len(),
                        header.len()
                    ),
                ));
            }
        }
        Ok(Table {
            header,
            rows: records,
        })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn require(&self, path: &Path, name: &str) -> Result<usize> {
        self.column(name)
            .ok_or_else(|| Error::parse(path, format!("missing column {name:?}")))
    }
}

/// Maps each row of `codes_in_file` onto the economy's industry order.
pub(crate) fn align_codes(
    path: &Path,
    file_codes: &[String],
    codes: &[String],
) -> Result<Vec<usize>> {
    let mut slots = vec![None; codes.len()];
    for (row, code) in file_codes.iter().enumerate() {
        let i = codes
            .iter()
            .position(|c| c == code)
            .ok_or_else(|| Error::parse(path, format!("unknown industry code {code:?}")))?;
        if slots[i].replace(row).is_some() {
            return Err(Error::parse(
                path,
                format!("duplicate industry code {code:?}"),
            ));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| Error::parse(path, format!("no row for industry {:?}", codes[i])))
        })
        .collect()
}
