use std::io::Write;
use std::path::Path;

use super::{align_codes, parse_f64, Table};
use crate::error::{Error, Result};

/// Industries whose consumption happens on site and recovers slowly after reopening.
pub const ONSITE_CODES: [&str; 14] = [
    "G45", "G47", "H49", "H50", "H51", "H52", "H53", "I", "L68", "M69_M70", "O84", "P85", "R_S",
    "T",
];

/// The only industry with essential on-site consumption during lockdown.
pub const RETAIL_CODE: &str = "G47";

/// Per-industry first-order pandemic shocks and labor characteristics.
///
/// Shocks are stored as reduction fractions: 0.85 means an 85% cut.
/// Demand shocks may be negative where demand rises (health care, for instance).
#[derive(Debug, Clone, PartialEq)]
pub struct PandemicCalibration {
    pub names: Vec<String>,
    /// Lockdown labor supply reduction.
    pub eps_s: Vec<f64>,
    /// Household demand reduction.
    pub eps_d: Vec<f64>,
    /// Remote labor index.
    pub rli: Vec<f64>,
    /// Share of workers classed essential.
    pub ess_w: Vec<f64>,
    /// Share of consumption allowed on site during lockdown.
    pub ess_c: Vec<f64>,
    /// Other final demand reduction.
    pub f_shock: Vec<f64>,
    pub onsite: Vec<bool>,
}

impl PandemicCalibration {
    pub fn n(&self) -> usize {
        self.eps_s.len()
    }

    /// Builds a calibration and fills the essential consumption share from the retail rule.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        codes: &[String],
        names: Vec<String>,
        eps_s: Vec<f64>,
        eps_d: Vec<f64>,
        rli: Vec<f64>,
        ess_w: Vec<f64>,
        f_shock: Vec<f64>,
        onsite: Vec<bool>,
    ) -> Result<Self> {
        let ess_c = codes
            .iter()
            .zip(&ess_w)
            .map(|(c, e)| if c == RETAIL_CODE { *e } else { 0.0 })
            .collect();
        let calib = PandemicCalibration {
            names,
            eps_s,
            eps_d,
            rli,
            ess_w,
            ess_c,
            f_shock,
            onsite,
        };
        calib.validate(codes)?;
        Ok(calib)
    }

    /// Same shocks with every magnitude set to zero.
    pub fn unshocked(&self) -> Self {
        PandemicCalibration {
            eps_s: vec![0.0; self.n()],
            eps_d: vec![0.0; self.n()],
            f_shock: vec![0.0; self.n()],
            ..self.clone()
        }
    }

    pub fn validate(&self, codes: &[String]) -> Result<()> {
        let n = codes.len();
        let lens = [
            self.names.len(),
            self.eps_s.len(),
            self.eps_d.len(),
            self.rli.len(),
            self.ess_w.len(),
            self.ess_c.len(),
            self.f_shock.len(),
            self.onsite.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Validation(format!(
                "calibration vectors must all have {n} entries"
            )));
        }
        let checks: [(&str, &Vec<f64>, f64); 6] = [
            ("eps_S", &self.eps_s, 0.0),
            ("eps_D", &self.eps_d, -1.0),
            ("f_shock", &self.f_shock, -1.0),
            ("rli", &self.rli, 0.0),
            ("ess_w", &self.ess_w, 0.0),
            ("ess_c", &self.ess_c, 0.0),
        ];
        for (name, v, lo) in checks {
            if let Some(i) = v.iter().position(|x| !(lo..=1.0).contains(x)) {
                return Err(Error::Validation(format!(
                    "{name} for {} is {}, outside [{lo}, 1]",
                    codes[i], v[i]
                )));
            }
        }
        Ok(())
    }

    /// Workforce share on site during lockdown, weighted by `weights`.
    pub fn onsite_share(&self, weights: &[f64]) -> f64 {
        weighted(weights, |i| self.ess_w[i] * (1.0 - self.rli[i]))
    }

    /// Workforce share able to work remotely.
    pub fn remote_share(&self, weights: &[f64]) -> f64 {
        weighted(weights, |i| self.rli[i])
    }

    /// Workforce share classed essential.
    pub fn essential_share(&self, weights: &[f64]) -> f64 {
        weighted(weights, |i| self.ess_w[i])
    }
}

fn weighted(w: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let total: f64 = w.iter().sum();
    w.iter().enumerate().map(|(i, wi)| wi * f(i)).sum::<f64>() / total
}

/// Loads a shock table with signed percent shocks and percent indices.
///
/// Columns: `code, eps_S_pct, rli, ess_w, eps_D_pct, f_shock_pct` plus optional
/// `onsite` (0/1) and `name`. Without `onsite` the standard on-site list applies.
pub fn load_pandemic_calibration(path: &Path, codes: &[String]) -> Result<PandemicCalibration> {
    let table = Table::read(path)?;
    let code_col = table.require(path, "code")?;
    let file_codes: Vec<String> = table.rows.iter().map(|r| r[code_col].clone()).collect();
    let order = align_codes(path, &file_codes, codes)?;
    let numbers = |name: &str, divisor: f64| -> Result<Vec<f64>> {
        let k = table.require(path, name)?;
        order
            .iter()
            .map(|&r| parse_f64(path, &table.rows[r][k]).map(|v| v / divisor + 0.0))
            .collect()
    };
    let eps_s = numbers("eps_S_pct", -100.0)?;
    let eps_d = numbers("eps_D_pct", -100.0)?;
    let f_shock = numbers("f_shock_pct", -100.0)?;
    let rli = numbers("rli", 100.0)?;
    let ess_w = numbers("ess_w", 100.0)?;
    let onsite = match table.column("onsite") {
        Some(k) => order
            .iter()
            .map(|&r| match table.rows[r][k].as_str() {
                "1" | "true" => Ok(true),
                "0" | "false" => Ok(false),
                other => Err(Error::parse(path, format!("bad onsite flag {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?,
        None => codes
            .iter()
            .map(|c| ONSITE_CODES.contains(&c.as_str()))
            .collect(),
    };
    let names = match table.column("name") {
        Some(k) => order.iter().map(|&r| table.rows[r][k].clone()).collect(),
        None => vec![String::new(); codes.len()],
    };
    PandemicCalibration::new(codes, names, eps_s, eps_d, rli, ess_w, f_shock, onsite).map_err(|e| {
        match e {
            Error::Validation(msg) => Error::parse(path, msg),
            other => other,
        }
    })
}

/// Writes the calibration back in the percent layout it was loaded from.
pub fn write_pandemic_calibration(
    calib: &PandemicCalibration,
    codes: &[String],
    out: &mut impl Write,
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "code",
        "name",
        "eps_S_pct",
        "rli",
        "ess_w",
        "eps_D_pct",
        "f_shock_pct",
        "onsite",
    ])?;
    for (i, code) in codes.iter().enumerate() {
        w.write_record([
            code.clone(),
            calib.names[i].clone(),
            percent_text(calib.eps_s[i], -100.0),
            percent_text(calib.rli[i], 100.0),
            percent_text(calib.ess_w[i], 100.0),
            percent_text(calib.eps_d[i], -100.0),
            percent_text(calib.f_shock[i], -100.0),
            (calib.onsite[i] as u8).to_string(),
        ])?;
    }
    w.flush()
}

/// Shortest percent text that converts back to exactly `frac`.
fn percent_text(frac: f64, divisor: f64) -> String {
    if frac == 0.0 {
        return "0".into();
    }
    let guess = frac * divisor;
    for step in 0..16i64 {
        for dir in [1i64, -1] {
            let p = f64::from_bits((guess.to_bits() as i64 + step * dir) as u64);
            let text = format!("{p}");
            if text.parse::<f64>().map(|v| v / divisor + 0.0) == Ok(frac) {
                return text;
            }
        }
    }
    format!("{guess:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_text_round_trips() {
        let loaded = -33.33333333333333 / -100.0;
        for frac in [0.85, 0.8, 0.0, 0.353, -0.15, 0.039, loaded] {
            let t = percent_text(frac, -100.0);
            assert_eq!(t.parse::<f64>().unwrap() / -100.0 + 0.0, frac, "{t}");
        }
    }

    #[test]
    fn retail_gets_essential_consumption() {
        let codes: Vec<String> = ["G47", "I"].iter().map(|s| s.to_string()).collect();
        let c = PandemicCalibration::new(
            &codes,
            vec![String::new(); 2],
            vec![0.5, 0.5],
            vec![0.0, 0.8],
            vec![0.1, 0.35],
            vec![0.37, 0.06],
            vec![0.3, 0.3],
            vec![true, true],
        )
        .unwrap();
        assert_eq!(c.ess_c, vec![0.37, 0.0]);
        // 0.06 essential, 35% remote
        assert!((c.ess_w[1] * (1.0 - c.rli[1]) - 0.039).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_rejected() {
        let codes = vec!["A".to_string()];
        let r = PandemicCalibration::new(
            &codes,
            vec![String::new()],
            vec![1.2],
            vec![0.0],
            vec![0.0],
            vec![0.0],
            vec![0.0],
            vec![false],
        );
        assert!(r.is_err());
    }
}
