use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use super::{align_codes, parse_f64, read_records, Table};
use crate::error::{Error, Result};

/// Raw rating layer from one analyst; `None` marks a missing rating.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingGrid {
    n: usize,
    cells: Vec<Option<f64>>,
}

impl RatingGrid {
    pub fn new(n: usize, cells: Vec<Option<f64>>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::Validation(format!(
                "rating grid has {} cells, expected {}",
                cells.len(),
                n * n
            )));
        }
        if let Some(v) = cells.iter().flatten().find(|v| !is_rating(**v)) {
            return Err(Error::Validation(format!("illegal rating {v}")));
        }
        Ok(RatingGrid { n, cells })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Result<Self> {
        let cells = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, cells)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rating of input `i` for consuming industry `j`.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.cells[i * self.n + j]
    }

    pub fn missing(&self) -> usize {
        self.cells.iter().filter(|c| c.is_none()).count()
    }
}

fn is_rating(v: f64) -> bool {
    v == 0.0 || v == 0.5 || v == 1.0
}

/// Input criticality per (input, consuming industry) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityMatrix {
    /// Ratings in {0, 0.5, 1}; row is the input, column the consuming industry.
    pub ratings: DMatrix<f64>,
    /// Critical inputs of each industry.
    pub critical: Vec<Vec<usize>>,
    /// Important inputs of each industry.
    pub important: Vec<Vec<usize>>,
}

impl CriticalityMatrix {
    pub fn from_ratings(ratings: DMatrix<f64>) -> Result<Self> {
        let n = ratings.nrows();
        if ratings.ncols() != n {
            return Err(Error::Validation(
                "criticality matrix must be square".into(),
            ));
        }
        if let Some(v) = ratings.iter().find(|v| !is_rating(**v)) {
            return Err(Error::Validation(format!("illegal rating {v}")));
        }
        let pick = |level: f64| -> Vec<Vec<usize>> {
            (0..n)
                .map(|j| (0..n).filter(|&i| ratings[(i, j)] == level).collect())
                .collect()
        };
        let critical = pick(1.0);
        let important = pick(0.5);
        Ok(CriticalityMatrix {
            ratings,
            critical,
            important,
        })
    }

    /// Every input critical everywhere.
    pub fn all_critical(n: usize) -> Self {
        Self::from_ratings(DMatrix::from_element(n, n, 1.0)).expect("valid ratings")
    }

    pub fn n(&self) -> usize {
        self.ratings.nrows()
    }

    pub fn to_grid(&self) -> RatingGrid {
        let n = self.n();
        RatingGrid::from_fn(n, |i, j| Some(self.ratings[(i, j)])).expect("valid ratings")
    }

    /// Compares rating counts with published per-industry totals.
    ///
    /// Diagonal cells of industries flagged in `skip_diag` are left out, since
    /// an industry without own-use cannot be constrained by itself.
    pub fn check_counts(&self, counts: &CriticalityCounts, skip_diag: &[bool]) -> Vec<String> {
        let n = self.n();
        let count = |level: f64, row: Option<usize>, col: Option<usize>| -> usize {
            (0..n)
                .filter(|&k| {
                    let (i, j) = match (row, col) {
                        (Some(i), _) => (i, k),
                        (_, Some(j)) => (k, j),
                        _ => unreachable!(),
                    };
                    !(i == j && skip_diag.get(i).copied().unwrap_or(false))
                        && self.ratings[(i, j)] == level
                })
                .count()
        };
        let mut out = Vec::new();
        for (k, code) in counts.codes.iter().enumerate() {
            let checks = [
                (
                    "critical as input",
                    count(1.0, Some(k), None),
                    counts.as_input_critical[k],
                ),
                (
                    "important as input",
                    count(0.5, Some(k), None),
                    counts.as_input_important[k],
                ),
                (
                    "critical inputs",
                    count(1.0, None, Some(k)),
                    counts.own_critical[k],
                ),
                (
                    "important inputs",
                    count(0.5, None, Some(k)),
                    counts.own_important[k],
                ),
            ];
            for (what, got, want) in checks {
                if got != want {
                    out.push(format!("{code}: {got} {what}, expected {want}"));
                }
            }
        }
        out
    }
}

/// Averages analyst layers cell by cell and rounds to a rating.
///
/// Missing ratings are dropped before averaging. A cell with no rating at all
/// becomes non-critical and produces a warning. The diagonal is always critical.
pub fn aggregate_criticality(layers: &[RatingGrid]) -> Result<(CriticalityMatrix, Vec<String>)> {
    let first = layers
        .first()
        .ok_or_else(|| Error::Validation("no rating layers supplied".into()))?;
    let n = first.n();
    if layers.iter().any(|l| l.n() != n) {
        return Err(Error::Validation("rating layers differ in size".into()));
    }
    let mut warnings = Vec::new();
    let ratings = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 1.0;
        }
        let rated: Vec<f64> = layers.iter().filter_map(|l| l.get(i, j)).collect();
        if rated.is_empty() {
            warnings.push(format!("input {i} for industry {j} has no rating"));
            return 0.0;
        }
        round_rating(rated.iter().sum::<f64>() / rated.len() as f64)
    });
    Ok((CriticalityMatrix::from_ratings(ratings)?, warnings))
}

fn round_rating(mean: f64) -> f64 {
    const EPS: f64 = 1e-12;
    if mean >= 2.0 / 3.0 - EPS {
        1.0
    } else if mean <= 1.0 / 3.0 + EPS {
        0.0
    } else {
        0.5
    }
}

/// Reads a square rating grid whose header row and first column carry industry codes.
pub fn load_criticality(path: &Path, codes: &[String]) -> Result<RatingGrid> {
    let records = read_records(path)?;
    let header = records
        .first()
        .ok_or_else(|| Error::parse(path, "empty file"))?;
    let col_codes: Vec<String> = header[1..].to_vec();
    let row_codes: Vec<String> = records[1..]
        .iter()
        .map(|r| r.first().cloned().unwrap_or_default())
        .collect();
    let cols = align_codes(path, &col_codes, codes)?;
    let rows = align_codes(path, &row_codes, codes)?;
    let n = codes.len();
    let mut parsed = vec![vec![None; col_codes.len()]; row_codes.len()];
    for (r, rec) in records[1..].iter().enumerate() {
        if rec.len() != col_codes.len() + 1 {
            return Err(Error::parse(
                path,
                format!("row {} has the wrong width", rec[0]),
            ));
        }
        for (c, cell) in rec[1..].iter().enumerate() {
            parsed[r][c] = if cell.eq_ignore_ascii_case("NA") || cell.is_empty() {
                None
            } else {
                let v = parse_f64(path, cell)?;
                if !is_rating(v) {
                    return Err(Error::parse(path, format!("illegal rating {cell:?}")));
                }
                Some(v)
            };
        }
    }
    RatingGrid::from_fn(n, |i, j| parsed[rows[i]][cols[j]])
}

/// Writes a rating grid with `NA` for missing cells.
pub fn write_criticality(
    grid: &RatingGrid,
    codes: &[String],
    out: &mut impl Write,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["input".to_string()];
    header.extend(codes.iter().cloned());
    w.write_record(&header)?;
    for (i, code) in codes.iter().enumerate() {
        let mut row = vec![code.clone()];
        row.extend((0..codes.len()).map(|j| match grid.get(i, j) {
            None => "NA".to_string(),
            Some(0.5) => "0.5".to_string(),
            Some(v) => format!("{}", v as u8),
        }));
        w.write_record(&row)?;
    }
    w.flush()
}

/// Published per-industry rating counts.
#[derive(Debug, Clone)]
pub struct CriticalityCounts {
    pub codes: Vec<String>,
    pub as_input_critical: Vec<usize>,
    pub as_input_important: Vec<usize>,
    pub own_critical: Vec<usize>,
    pub own_important: Vec<usize>,
}

pub fn load_criticality_counts(path: &Path, codes: &[String]) -> Result<CriticalityCounts> {
    let table = Table::read(path)?;
    let code_col = table.require(path, "code")?;
    let file_codes: Vec<String> = table.rows.iter().map(|r| r[code_col].clone()).collect();
    let order = align_codes(path, &file_codes, codes)?;
    let column = |name: &str| -> Result<Vec<usize>> {
        let k = table.require(path, name)?;
        order
            .iter()
            .map(|&r| {
                table.rows[r][k]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(path, format!("bad count {:?}", table.rows[r][k])))
            })
            .collect()
    };
    Ok(CriticalityCounts {
        codes: codes.to_vec(),
        as_input_critical: column("as_input_critical")?,
        as_input_important: column("as_input_important")?,
        own_critical: column("own_critical")?,
        own_important: column("own_important")?,
    })
}
