use serde::Serialize;

use crate::data::{Economy, PandemicCalibration};
use crate::engine::SimSeries;
use crate::error::{Error, Result};

/// Per-industry split of relative output and final-demand changes into direct and network parts.
///
/// Totals are stored as direct plus indirect, so the split adds up exactly.
/// Final-demand entries are NaN for industries without final demand.
#[derive(Debug, Clone, Serialize)]
pub struct ShockDecomposition {
    pub t: usize,
    pub codes: Vec<String>,
    pub os_direct: Vec<f64>,
    pub os_indirect: Vec<f64>,
    pub os_total: Vec<f64>,
    pub cs_direct: Vec<f64>,
    pub cs_indirect: Vec<f64>,
    pub cs_total: Vec<f64>,
}

pub fn shock_decomposition(
    series: &SimSeries,
    calib: &PandemicCalibration,
    economy: &Economy,
    t: usize,
) -> Result<ShockDecomposition> {
    if t >= series.len() {
        return Err(Error::Validation(format!(
            "day {t} is beyond the {}-day series",
            series.len()
        )));
    }
    let n = economy.n();
    let (x, c, f) = (&series.x[t], &series.c[t], &series.f[t]);
    let mut d = ShockDecomposition {
        t,
        codes: economy.codes.clone(),
        os_direct: Vec::with_capacity(n),
        os_indirect: Vec::with_capacity(n),
        os_total: Vec::with_capacity(n),
        cs_direct: Vec::with_capacity(n),
        cs_indirect: Vec::with_capacity(n),
        cs_total: Vec::with_capacity(n),
    };
    for i in 0..n {
        let os_direct = -calib.eps_s[i];
        let os_total = x[i] / economy.x0[i] - 1.0;
        let base = economy.c0[i] + economy.f0[i];
        let (cs_direct, cs_total) = if base > 0.0 {
            let shocked =
                (1.0 - calib.eps_d[i]) * economy.c0[i] + (1.0 - calib.f_shock[i]) * economy.f0[i];
            (shocked / base - 1.0, (c[i] + f[i]) / base - 1.0)
        } else {
            (f64::NAN, f64::NAN)
        };
        let os_indirect = os_total - os_direct;
        let cs_indirect = cs_total - cs_direct;
        d.os_direct.push(os_direct);
        d.os_indirect.push(os_indirect);
        d.os_total.push(os_direct + os_indirect);
        d.cs_direct.push(cs_direct);
        d.cs_indirect.push(cs_indirect);
        d.cs_total.push(cs_direct + cs_indirect);
    }
    Ok(d)
}
