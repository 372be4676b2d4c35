use std::io::Write;
use std::path::Path;

use super::{align_codes, parse_f64, Table};
use crate::error::{Error, Result};

/// Monthly ratios are turned into days of input coverage with this factor.
pub const DAYS_PER_MONTH: f64 = 30.0;

/// Target inventory coverage per industry, in days of input use.
#[derive(Debug, Clone, PartialEq)]
pub struct InventoryTargets {
    pub n_days: Vec<f64>,
    pub source_ratios: Option<Vec<f64>>,
}

impl InventoryTargets {
    pub fn uniform(n: usize, days: f64) -> Self {
        InventoryTargets {
            n_days: vec![days; n],
            source_ratios: None,
        }
    }

    pub fn len(&self) -> usize {
        self.n_days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_days.is_empty()
    }
}

pub fn inventory_targets_from_ratios(ratios: &[f64]) -> Result<InventoryTargets> {
    if let Some(r) = ratios.iter().find(|r| !r.is_finite() || **r < 0.0) {
        return Err(Error::Validation(format!(
            "inventory ratio {r} must be non-negative"
        )));
    }
    Ok(InventoryTargets {
        n_days: ratios.iter().map(|r| DAYS_PER_MONTH * r).collect(),
        source_ratios: Some(ratios.to_vec()),
    })
}

/// Reads `code, ratio_monthly` rows and converts them to targets.
pub fn load_inventory_ratios(path: &Path, codes: &[String]) -> Result<InventoryTargets> {
    let table = Table::read(path)?;
    let code_col = table.require(path, "code")?;
    let ratio_col = table.require(path, "ratio_monthly")?;
    let file_codes: Vec<String> = table.rows.iter().map(|r| r[code_col].clone()).collect();
    let order = align_codes(path, &file_codes, codes)?;
    let ratios = order
        .iter()
        .map(|&r| parse_f64(path, &table.rows[r][ratio_col]))
        .collect::<Result<Vec<f64>>>()?;
    inventory_targets_from_ratios(&ratios).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn write_inventory_ratios(
    targets: &InventoryTargets,
    codes: &[String],
    out: &mut impl Write,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["code", "ratio_monthly"])?;
    for (i, code) in codes.iter().enumerate() {
        let ratio = match &targets.source_ratios {
            Some(r) => r[i],
            None => targets.n_days[i] / DAYS_PER_MONTH,
        };
        w.write_record([code.clone(), format!("{ratio:?}")])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wood_and_vehicle_trade() {
        let t = inventory_targets_from_ratios(&[1.50, 7.69, 0.0]).unwrap();
        assert_eq!(t.n_days[0], 45.0);
        assert!((t.n_days[1] - 230.7).abs() < 1e-9);
        assert_eq!(t.n_days[2], 0.0);
    }

    #[test]
    fn negative_ratio_rejected() {
        assert!(inventory_targets_from_ratios(&[-0.1]).is_err());
    }
}
