use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::data::{Economy, PandemicCalibration};
use crate::error::{Error, Result};

fn solve(m: DMatrix<f64>, rhs: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let x = m
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Numerical(format!("{what} system is singular")))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("{what} solution is not finite")));
    }
    Ok(x)
}

/// Demand-driven output `(I - A)^-1 (c + f)`.
pub fn leontief_solve(
    economy: &Economy,
    c: &DVector<f64>,
    f: &DVector<f64>,
) -> Result<DVector<f64>> {
    let n = economy.n();
    solve(DMatrix::identity(n, n) - &economy.a, &(c + f), "Leontief")
}

/// Supply-driven output `(I - B^T)^-1 v` for primary inputs `v`.
pub fn ghosh_solve(economy: &Economy, primary_inputs: &DVector<f64>) -> Result<DVector<f64>> {
    let n = economy.n();
    solve(
        DMatrix::identity(n, n) - economy.b.transpose(),
        primary_inputs,
        "Ghosh",
    )
}

/// Labor compensation plus the fixed other primary inputs and initial profits.
pub fn ghosh_primary_inputs(economy: &Economy, l: &DVector<f64>) -> DVector<f64> {
    l + &economy.e0 + &economy.pi0
}

/// Output predicted by the two static models for the first-order lockdown shocks.
#[derive(Debug, Clone, Serialize)]
pub struct IoComparison {
    pub codes: Vec<String>,
    pub x0: Vec<f64>,
    pub leontief: Vec<f64>,
    pub ghosh: Vec<f64>,
}

impl IoComparison {
    /// Aggregate output of each model relative to the initial level.
    pub fn aggregate_ratios(&self) -> (f64, f64) {
        let base: f64 = self.x0.iter().sum();
        (
            self.leontief.iter().sum::<f64>() / base,
            self.ghosh.iter().sum::<f64>() / base,
        )
    }

    pub fn write_csv(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["code", "x0", "leontief", "ghosh"])?;
        for i in 0..self.codes.len() {
            w.write_record([
                self.codes[i].clone(),
                format!("{:?}", self.x0[i]),
                format!("{:?}", self.leontief[i]),
                format!("{:?}", self.ghosh[i]),
            ])?;
        }
        w.flush()
    }
}

/// Leontief response to the demand shocks and Ghosh response to the labor shocks.
pub fn compare_io(economy: &Economy, calib: &PandemicCalibration) -> Result<IoComparison> {
    let n = economy.n();
    let c = DVector::from_fn(n, |i, _| (1.0 - calib.eps_d[i]) * economy.c0[i]);
    let f = DVector::from_fn(n, |i, _| (1.0 - calib.f_shock[i]) * economy.f0[i]);
    let l = DVector::from_fn(n, |i, _| (1.0 - calib.eps_s[i]) * economy.l0[i]);
    Ok(IoComparison {
        codes: economy.codes.clone(),
        x0: economy.x0.iter().copied().collect(),
        leontief: leontief_solve(economy, &c, &f)?.iter().copied().collect(),
        ghosh: ghosh_solve(economy, &ghosh_primary_inputs(economy, &l))?
            .iter()
            .copied()
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two industries with x0 = (100, 100) and final demand (70, 65).
    fn toy() -> Economy {
        let z = DMatrix::from_row_slice(2, 2, &[10.0, 20.0, 15.0, 20.0]);
        Economy::new(
            vec!["S1".into(), "S2".into()],
            z,
            DVector::from_vec(vec![100.0, 100.0]),
            DVector::from_vec(vec![50.0, 40.0]),
            DVector::from_vec(vec![20.0, 25.0]),
            DVector::from_vec(vec![40.0, 45.0]),
            DVector::from_vec(vec![10.0, 10.0]),
        )
        .unwrap()
    }

    #[test]
    fn toy_leontief_recovers_output() {
        let e = toy();
        let x = leontief_solve(&e, &e.c0, &e.f0).unwrap();
        assert!((x[0] - 100.0).abs() < 1e-10 && (x[1] - 100.0).abs() < 1e-10);
        let half = leontief_solve(&e, &(&e.c0 * 0.5), &(&e.f0 * 0.5)).unwrap();
        assert!((half[0] - 50.0).abs() < 1e-10);
    }

    #[test]
    fn toy_ghosh_recovers_output() {
        let e = toy();
        let v = ghosh_primary_inputs(&e, &e.l0);
        assert!((v[0] - 75.0).abs() < 1e-12 && (v[1] - 60.0).abs() < 1e-12);
        let x = ghosh_solve(&e, &v).unwrap();
        assert!((x[0] - 100.0).abs() < 1e-10 && (x[1] - 100.0).abs() < 1e-10);
        let half = ghosh_solve(&e, &(v * 0.5)).unwrap();
        assert!((half[1] - 50.0).abs() < 1e-10);
    }

    #[test]
    fn singular_system_is_numerical_error() {
        let z = DMatrix::from_row_slice(1, 1, &[10.0]);
        let one = |v| DVector::from_vec(vec![v]);
        let e = Economy::new(
            vec!["S".into()],
            z,
            one(10.0),
            one(0.0),
            one(0.0),
            one(0.0),
            one(0.0),
        )
        .unwrap();
        assert!(matches!(
            leontief_solve(&e, &e.c0, &e.f0),
            Err(Error::Numerical(_))
        ));
    }
}
