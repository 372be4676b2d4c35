use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{parse_f64, read_records};
use crate::error::{Error, Result};

/// Relative tolerance for the output accounting identity.
pub const ACCOUNTING_TOL: f64 = 1e-9;

/// Layout of an input-output table on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoFormat {
    /// Industry block followed by labeled `x`, `c`, `f`, `l` and `e` (or `pi`) rows.
    Native,
    /// National table with final-use columns (`CONS_h`, `GFCF`, `EXP`, ...)
    /// and value-added rows (`COMP`, taxes, `GO`).
    Wiod,
}

/// Calibrated input-output snapshot of the economy.
#[derive(Debug, Clone)]
pub struct Economy {
    pub codes: Vec<String>,
    /// Flows from supplier (row) to buyer (column).
    pub z0: DMatrix<f64>,
    pub x0: DVector<f64>,
    pub c0: DVector<f64>,
    pub f0: DVector<f64>,
    pub l0: DVector<f64>,
    pub e0: DVector<f64>,
    pub pi0: DVector<f64>,
    /// Technical coefficients `Z_ij / x_j`.
    pub a: DMatrix<f64>,
    /// Allocation coefficients `Z_ij / x_i`.
    pub b: DMatrix<f64>,
    /// Relative accounting residual per industry.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EconomySummary {
    pub n_industries: usize,
    pub codes: Vec<String>,
    pub total_output: f64,
    pub total_consumption: f64,
    pub total_other_final_demand: f64,
    pub total_labor: f64,
    pub total_profits: f64,
    pub max_accounting_residual: f64,
}

impl Economy {
    /// Builds an economy with profits as the residual of the cost identity.
    pub fn new(
        codes: Vec<String>,
        z0: DMatrix<f64>,
        x0: DVector<f64>,
        c0: DVector<f64>,
        f0: DVector<f64>,
        l0: DVector<f64>,
        e0: DVector<f64>,
    ) -> Result<Self> {
        check_shapes(&codes, &z0, &[&x0, &c0, &f0, &l0, &e0])?;
        let inputs = column_sums(&z0);
        let pi0 = DVector::from_fn(codes.len(), |i, _| x0[i] - inputs[i] - l0[i] - e0[i]);
        Self::assemble(codes, z0, x0, c0, f0, l0, e0, pi0)
    }

    /// Builds an economy from supplied profits; other expenses become the residual.
    pub fn with_profits(
        codes: Vec<String>,
        z0: DMatrix<f64>,
        x0: DVector<f64>,
        c0: DVector<f64>,
        f0: DVector<f64>,
        l0: DVector<f64>,
        pi0: DVector<f64>,
    ) -> Result<Self> {
        check_shapes(&codes, &z0, &[&x0, &c0, &f0, &l0, &pi0])?;
        let inputs = column_sums(&z0);
        let e0 = DVector::from_fn(codes.len(), |i, _| x0[i] - inputs[i] - l0[i] - pi0[i]);
        Self::assemble(codes, z0, x0, c0, f0, l0, e0, pi0)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        codes: Vec<String>,
        z0: DMatrix<f64>,
        x0: DVector<f64>,
        c0: DVector<f64>,
        f0: DVector<f64>,
        l0: DVector<f64>,
        e0: DVector<f64>,
        pi0: DVector<f64>,
    ) -> Result<Self> {
        let n = codes.len();
        if let Some(((i, j), v)) = z0
            .iter()
            .enumerate()
            .map(|(k, v)| ((k % n, k / n), v))
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Validation(format!(
                "flow {} -> {} is {v}; flows must be finite and non-negative",
                codes[i], codes[j]
            )));
        }
        for (name, v) in [("x", &x0), ("c", &c0), ("l", &l0)] {
            if let Some(i) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Validation(format!(
                    "{name}[{}] = {} must be finite and non-negative",
                    codes[i], v[i]
                )));
            }
        }
        for (name, v) in [("f", &f0), ("e", &e0), ("pi", &pi0)] {
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name}[{}] is not finite",
                    codes[i]
                )));
            }
        }
        let a = DMatrix::from_fn(n, n, |i, j| safe_div(z0[(i, j)], x0[j]));
        let b = DMatrix::from_fn(n, n, |i, j| safe_div(z0[(i, j)], x0[i]));
        let sales = z0.column_sum();
        let residuals = (0..n)
            .map(|i| {
                let gap = x0[i] - sales[i] - c0[i] - f0[i];
                if x0[i] > 0.0 {
                    gap.abs() / x0[i]
                } else {
                    gap.abs()
                }
            })
            .collect();
        Ok(Economy {
            codes,
            z0,
            x0,
            c0,
            f0,
            l0,
            e0,
            pi0,
            a,
            b,
            residuals,
        })
    }

    pub fn n(&self) -> usize {
        self.codes.len()
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.codes.iter().position(|c| c == code)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Industries whose accounting residual exceeds [`ACCOUNTING_TOL`].
    pub fn flagged(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.residuals[i] > ACCOUNTING_TOL)
            .collect()
    }

    /// Fails on accounting residuals when `strict`, otherwise returns them as warnings.
    pub fn validate(&self, strict: bool) -> Result<Vec<String>> {
        let warnings: Vec<String> = self
            .flagged()
            .into_iter()
            .map(|i| {
                format!(
                    "accounting residual for {} is {:.3e} of output",
                    self.codes[i], self.residuals[i]
                )
            })
            .collect();
        if strict && !warnings.is_empty() {
            return Err(Error::Validation(warnings.join("; ")));
        }
        Ok(warnings)
    }

    /// Largest column sum of the technical coefficients.
    pub fn max_input_share(&self) -> f64 {
        self.a.row_sum().iter().copied().fold(0.0, f64::max)
    }

    pub fn summary(&self) -> EconomySummary {
        EconomySummary {
            n_industries: self.n(),
            codes: self.codes.clone(),
            total_output: self.x0.sum(),
            total_consumption: self.c0.sum(),
            total_other_final_demand: self.f0.sum(),
            total_labor: self.l0.sum(),
            total_profits: self.pi0.sum(),
            max_accounting_residual: self.max_residual(),
        }
    }
}

fn safe_div(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn column_sums(z: &DMatrix<f64>) -> DVector<f64> {
    z.row_sum().transpose()
}

fn check_shapes(codes: &[String], z: &DMatrix<f64>, vectors: &[&DVector<f64>]) -> Result<()> {
    let n = codes.len();
    if n == 0 {
        return Err(Error::Validation("economy has no industries".into()));
    }
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::Validation(format!(
            "flow matrix is {}x{} but there are {n} industries",
            z.nrows(),
            z.ncols()
        )));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::Validation(format!(
            "vector of length {} does not match {n} industries",
            v.len()
        )));
    }
    Ok(())
}

/// Loads an input-output table. Accounting mismatches are fatal only when `strict`.
pub fn load_io_table(path: &Path, format: IoFormat, strict: bool) -> Result<Economy> {
    let economy = match format {
        IoFormat::Native => load_native(path)?,
        IoFormat::Wiod => load_wiod(path)?,
    };
    for w in economy.validate(strict)? {
        log::warn!("{}: {w}", path.display());
    }
    Ok(economy)
}

fn load_native(path: &Path) -> Result<Economy> {
    let records = read_records(path)?;
    let mut rows = records.iter();
    let header = rows
        .next()
        .ok_or_else(|| Error::parse(path, "empty file"))?;
    let codes: Vec<String> = header.iter().skip(1).cloned().collect();
    let n = codes.len();
    if n == 0 {
        return Err(Error::parse(path, "header lists no industries"));
    }
    let mut z = DMatrix::zeros(n, n);
    for (i, code) in codes.iter().enumerate() {
        let rec = rows
            .next()
            .ok_or_else(|| Error::parse(path, format!("missing flow row for {code}")))?;
        let label = rec.first().map(String::as_str).unwrap_or("");
        if label != code {
            return Err(Error::parse(
                path,
                format!("flow row {} is labeled {label:?}, expected {code:?}", i + 1),
            ));
        }
        let values = numeric_row(path, rec, n)?;
        for (j, v) in values.into_iter().enumerate() {
            z[(i, j)] = v;
        }
    }
    let mut named: Vec<(String, DVector<f64>)> = Vec::new();
    for rec in rows {
        let label = rec.first().cloned().unwrap_or_default();
        named.push((label, DVector::from_vec(numeric_row(path, rec, n)?)));
    }
    let take = |key: &str| named.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
    let need =
        |key: &str| take(key).ok_or_else(|| Error::parse(path, format!("missing row {key:?}")));
    let (x, c, f, l) = (need("x")?, need("c")?, need("f")?, need("l")?);
    match (take("pi"), take("e")) {
        (Some(pi), _) => Economy::with_profits(codes, z, x, c, f, l, pi),
        (None, Some(e)) => Economy::new(codes, z, x, c, f, l, e),
        (None, None) => Err(Error::parse(path, "need an \"e\" or \"pi\" row")),
    }
}

const WIOD_HOUSEHOLD: &str = "CONS_h";
const WIOD_VALUE_ROWS: [&str; 3] = ["VA", "IntTTL", "GO"];

fn load_wiod(path: &Path) -> Result<Economy> {
    let records = read_records(path)?;
    let header = records
        .first()
        .ok_or_else(|| Error::parse(path, "empty file"))?;
    let columns: Vec<&str> = header.iter().skip(1).map(String::as_str).collect();
    let body = &records[1..];
    let row_labels: Vec<&str> = body
        .iter()
        .map(|r| r.first().map(String::as_str).unwrap_or(""))
        .collect();
    // industries are the columns that also label a row
    let codes: Vec<String> = columns
        .iter()
        .take_while(|c| row_labels.contains(c))
        .map(|c| c.to_string())
        .collect();
    let n = codes.len();
    if n == 0 {
        return Err(Error::parse(path, "no industry columns found"));
    }
    let width = columns.len();
    let mut z = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    let mut f = DVector::zeros(n);
    let mut l = DVector::zeros(n);
    let mut e = DVector::zeros(n);
    let mut go: Option<DVector<f64>> = None;
    for (rec, label) in body.iter().zip(&row_labels) {
        let values = numeric_row(path, rec, width)?;
        if let Some(i) = codes.iter().position(|c| c == label) {
            for j in 0..n {
                z[(i, j)] = values[j];
            }
            for (k, col) in columns.iter().enumerate().skip(n) {
                if *col == WIOD_HOUSEHOLD {
                    c[i] += values[k];
                } else {
                    f[i] += values[k];
                }
            }
        } else if *label == "COMP" {
            l = DVector::from_column_slice(&values[..n]);
        } else if *label == "GO" {
            go = Some(DVector::from_column_slice(&values[..n]));
        } else if !WIOD_VALUE_ROWS.contains(label) {
            for j in 0..n {
                e[j] += values[j];
            }
        }
    }
    let x = match go {
        Some(x) => x,
        None => DVector::from_fn(n, |i, _| z.row(i).sum() + c[i] + f[i]),
    };
    Economy::new(codes, z, x, c, f, l, e)
}

fn numeric_row(path: &Path, rec: &[String], n: usize) -> Result<Vec<f64>> {
    let label = rec.first().map(String::as_str).unwrap_or("");
    if rec.len() != n + 1 {
        return Err(Error::parse(
            path,
            format!(
                "row {label:?} has {} values, expected {n}",
                rec.len().saturating_sub(1)
            ),
        ));
    }
    rec[1..]
        .iter()
        .map(|s| parse_f64(path, s).map_err(|e| Error::parse(path, format!("row {label:?}: {e}"))))
        .collect()
}

/// Writes an economy in the native layout, with full float precision.
pub fn write_io_table(economy: &Economy, out: &mut impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["code".to_string()];
    header.extend(economy.codes.iter().cloned());
    w.write_record(&header)?;
    for (i, code) in economy.codes.iter().enumerate() {
        let mut row = vec![code.clone()];
        row.extend(economy.z0.row(i).iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    for (label, v) in [
        ("x", &economy.x0),
        ("c", &economy.c0),
        ("f", &economy.f0),
        ("l", &economy.l0),
        ("e", &economy.e0),
    ] {
        let mut row = vec![label.to_string()];
        row.extend(v.iter().map(|x| format!("{x:?}")));
        w.write_record(&row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy() -> Economy {
        Economy::new(
            vec!["S1".into(), "S2".into()],
            DMatrix::from_row_slice(2, 2, &[10.0, 20.0, 30.0, 5.0]),
            DVector::from_vec(vec![100.0, 100.0]),
            DVector::from_vec(vec![50.0, 45.0]),
            DVector::from_vec(vec![20.0, 20.0]),
            DVector::from_vec(vec![40.0, 50.0]),
            DVector::from_vec(vec![5.0, 5.0]),
        )
        .unwrap()
    }

    #[test]
    fn toy_coefficients() {
        let e = toy();
        assert_eq!(e.a, DMatrix::from_row_slice(2, 2, &[0.1, 0.2, 0.3, 0.05]));
        assert!((e.b[(1, 0)] - 0.3).abs() < 1e-15);
        assert!(e.flagged().is_empty());
        // pi = x - inputs - l - e
        assert!((e.pi0[0] - (100.0 - 40.0 - 40.0 - 5.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_flows_give_zero_coefficients() {
        let x = DVector::from_vec(vec![3.0, 4.0]);
        let e = Economy::new(
            vec!["a".into(), "b".into()],
            DMatrix::zeros(2, 2),
            x.clone(),
            x.clone(),
            DVector::zeros(2),
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::zeros(2),
        )
        .unwrap();
        assert_eq!(e.a, DMatrix::zeros(2, 2));
        assert_eq!(e.b, DMatrix::zeros(2, 2));
    }

    #[test]
    fn negative_flow_rejected() {
        let err = Economy::new(
            vec!["a".into()],
            DMatrix::from_element(1, 1, -1.0),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 2.0),
            DVector::zeros(1),
            DVector::zeros(1),
            DVector::zeros(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn residual_flag_and_strict_mode() {
        let e = Economy::new(
            vec!["a".into()],
            DMatrix::zeros(1, 1),
            DVector::from_element(1, 10.0),
            DVector::from_element(1, 9.0),
            DVector::zeros(1),
            DVector::zeros(1),
            DVector::zeros(1),
        )
        .unwrap();
        assert_eq!(e.flagged(), vec![0]);
        assert_eq!(e.validate(false).unwrap().len(), 1);
        assert!(e.validate(true).is_err());
    }

    #[test]
    fn profits_supplied_make_expenses_residual() {
        let base = toy();
        let e = Economy::with_profits(
            base.codes.clone(),
            base.z0.clone(),
            base.x0.clone(),
            base.c0.clone(),
            base.f0.clone(),
            base.l0.clone(),
            base.pi0.clone(),
        )
        .unwrap();
        assert!((e.e0 - base.e0).amax() < 1e-12);
    }
}
