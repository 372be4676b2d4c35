use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{align_codes, parse_f64, Table};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Work,
    School,
    Consume,
    Transport,
    Home,
}

impl Activity {
    pub const ALL: [Activity; 5] = [
        Activity::Work,
        Activity::School,
        Activity::Consume,
        Activity::Transport,
        Activity::Home,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Activity::Work => "work",
            Activity::School => "school",
            Activity::Consume => "consume",
            Activity::Transport => "transport",
            Activity::Home => "home",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Activity::ALL
            .into_iter()
            .find(|a| a.as_str() == key)
            .ok_or_else(|| Error::Config(format!("unknown activity {s:?}")))
    }
}

/// One place where contacts happen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Place {
    pub name: String,
    pub category: Activity,
    pub visit_pct: f64,
    pub duration_h: f64,
    pub crowd: f64,
    pub physical_pct: f64,
    /// Industry that serves the place, for consumption venues.
    pub industry: Option<String>,
}

impl Place {
    pub fn intensity(&self) -> f64 {
        self.visit_pct * self.duration_h * self.crowd
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceContactTable {
    pub rows: Vec<Place>,
}

impl PlaceContactTable {
    fn total_intensity(&self) -> Result<f64> {
        for p in &self.rows {
            let fields = [p.visit_pct, p.duration_h, p.crowd, p.physical_pct];
            if fields.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::Validation(format!(
                    "place {:?} has a negative entry",
                    p.name
                )));
            }
        }
        let total: f64 = self.rows.iter().map(Place::intensity).sum();
        if !(total > 0.0) {
            return Err(Error::Validation(
                "contact table has zero total intensity".into(),
            ));
        }
        Ok(total)
    }
}

/// Pre-lockdown share of intensity-weighted contacts per activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beta0 {
    pub work: f64,
    pub school: f64,
    pub consumption: f64,
    pub transport: f64,
    pub home: f64,
}

impl Beta0 {
    pub fn get(&self, a: Activity) -> f64 {
        match a {
            Activity::Work => self.work,
            Activity::School => self.school,
            Activity::Consume => self.consumption,
            Activity::Transport => self.transport,
            Activity::Home => self.home,
        }
    }

    pub fn sum(&self) -> f64 {
        self.work + self.school + self.consumption + self.transport + self.home
    }
}

/// Activity shares of the total contact intensity.
pub fn intensity_weights(table: &PlaceContactTable) -> Result<Beta0> {
    let total = table.total_intensity()?;
    let share = |a: Activity| -> f64 {
        table
            .rows
            .iter()
            .filter(|p| p.category == a)
            .map(Place::intensity)
            .sum::<f64>()
            / total
    };
    Ok(Beta0 {
        work: share(Activity::Work),
        school: share(Activity::School),
        consumption: share(Activity::Consume),
        transport: share(Activity::Transport),
        home: share(Activity::Home),
    })
}

/// Consumption contact weight per industry, summing to one.
pub fn consumption_weights(table: &PlaceContactTable, codes: &[String]) -> Result<Vec<f64>> {
    let mut w = vec![0.0; codes.len()];
    table.total_intensity()?;
    for p in table
        .rows
        .iter()
        .filter(|p| p.category == Activity::Consume)
    {
        let code = p.industry.as_deref().ok_or_else(|| {
            Error::Validation(format!("consumption place {:?} has no industry", p.name))
        })?;
        let i = codes
            .iter()
            .position(|c| c == code)
            .ok_or_else(|| Error::Validation(format!("unknown industry code {code:?}")))?;
        w[i] += p.intensity();
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Validation(
            "no consumption contacts in the place table".into(),
        ));
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Work infection risk per industry: mean of the exposure and proximity indices.
pub fn industry_work_risk(exposure: &[f64], proximity: &[f64]) -> Result<Vec<f64>> {
    if exposure.len() != proximity.len() {
        return Err(Error::Validation(
            "exposure and proximity lengths differ".into(),
        ));
    }
    exposure
        .iter()
        .zip(proximity)
        .map(|(e, p)| {
            if (0.0..=100.0).contains(e) && (0.0..=100.0).contains(p) {
                Ok(0.5 * (e + p))
            } else {
                Err(Error::Validation(format!(
                    "risk index ({e}, {p}) outside [0, 100]"
                )))
            }
        })
        .collect()
}

/// `v` scaled to sum to one.
pub fn normalized(v: &[f64]) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter().map(|x| x / total).collect()
}

/// Denominator of the share of students' parents at work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchoolNorm {
    /// Share of the whole population.
    #[default]
    Population,
    /// Share of the working-age population.
    Adults,
}

/// Scalar epidemic constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpiParams {
    pub r0_pre: f64,
    pub r0_pre_sd: f64,
    pub r0_lockdown_anchor: f64,
    pub gamma_rec: f64,
    /// Share of students under 14.
    pub g: f64,
    /// Share of home contacts that distancing cannot remove.
    pub kappa: f64,
    pub eta_s: f64,
    pub school_norm: SchoolNorm,
}

impl Default for EpiParams {
    fn default() -> Self {
        EpiParams {
            r0_pre: 2.6,
            r0_pre_sd: 0.54,
            r0_lockdown_anchor: 0.62,
            gamma_rec: 1.0 / 7.0,
            g: 17.0 / 23.0,
            kappa: 0.76,
            eta_s: 0.23,
            school_norm: SchoolNorm::Population,
        }
    }
}

pub fn load_epi_params(path: &Path) -> Result<EpiParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))
}

/// Everything the transmission model needs, aligned to the economy's industries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiCalibration {
    pub beta0: Beta0,
    pub b_w: Vec<f64>,
    pub b_c: Vec<f64>,
    /// Population share working in each industry.
    pub eta: Vec<f64>,
    pub eta_s: f64,
    pub eta_u: f64,
    pub g: f64,
    pub kappa: f64,
    pub r0_pre: f64,
    pub r0_pre_sd: f64,
    pub r0_lockdown_anchor: f64,
    pub gamma_rec: f64,
    pub school_norm: SchoolNorm,
}

impl EpiCalibration {
    pub fn new(
        beta0: Beta0,
        b_w: Vec<f64>,
        b_c: Vec<f64>,
        eta: Vec<f64>,
        params: &EpiParams,
    ) -> Result<Self> {
        let eta_u = 1.0 - params.eta_s - eta.iter().sum::<f64>();
        let calib = EpiCalibration {
            beta0,
            b_w,
            b_c,
            eta,
            eta_s: params.eta_s,
            eta_u,
            g: params.g,
            kappa: params.kappa,
            r0_pre: params.r0_pre,
            r0_pre_sd: params.r0_pre_sd,
            r0_lockdown_anchor: params.r0_lockdown_anchor,
            gamma_rec: params.gamma_rec,
            school_norm: params.school_norm,
        };
        calib.validate()?;
        Ok(calib)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.eta.len();
        if self.b_w.len() != n || self.b_c.len() != n {
            return Err(Error::Validation(format!(
                "epidemic vectors must have {n} entries"
            )));
        }
        if (self.beta0.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "activity shares sum to {}, not 1",
                self.beta0.sum()
            )));
        }
        let b_c: f64 = self.b_c.iter().sum();
        if (b_c - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!(
                "consumption weights sum to {b_c}, not 1"
            )));
        }
        let scalars = [
            self.beta0.work,
            self.beta0.school,
            self.beta0.consumption,
            self.beta0.transport,
            self.beta0.home,
            self.eta_s,
            self.eta_u + 1e-12,
            self.g,
            self.kappa,
            self.r0_pre,
            self.r0_pre_sd,
            self.r0_lockdown_anchor,
            self.gamma_rec,
        ];
        let vectors = self.b_w.iter().chain(&self.b_c).chain(&self.eta);
        if scalars
            .iter()
            .chain(vectors)
            .any(|v| !(*v >= 0.0) || !v.is_finite())
        {
            return Err(Error::Validation(
                "epidemic calibration has a negative entry".into(),
            ));
        }
        if self.g > 1.0 || self.kappa > 1.0 {
            return Err(Error::Validation("g and kappa must not exceed 1".into()));
        }
        Ok(())
    }
}

/// Reads a place table: `place, category, visit_pct, duration_h, crowd, physical_pct[, industry]`.
pub fn load_place_table(path: &Path) -> Result<PlaceContactTable> {
    let table = Table::read(path)?;
    let col = |name: &str| table.require(path, name);
    let (name, cat, visit, dur, crowd, phys) = (
        col("place")?,
        col("category")?,
        col("visit_pct")?,
        col("duration_h")?,
        col("crowd")?,
        col("physical_pct")?,
    );
    let industry = table.column("industry");
    let rows = table
        .rows
        .iter()
        .map(|r| {
            Ok(Place {
                name: r[name].clone(),
                category: r[cat]
                    .parse()
                    .map_err(|e: Error| Error::parse(path, e.to_string()))?,
                visit_pct: parse_f64(path, &r[visit])?,
                duration_h: parse_f64(path, &r[dur])?,
                crowd: parse_f64(path, &r[crowd])?,
                physical_pct: parse_f64(path, &r[phys])?,
                industry: industry.map(|k| r[k].clone()).filter(|s| !s.is_empty()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let t = PlaceContactTable { rows };
    for a in Activity::ALL {
        if !t.rows.iter().any(|p| p.category == a) {
            return Err(Error::parse(path, format!("no place in category {a}")));
        }
    }
    Ok(t)
}

/// Builds the calibration from the place table, the industry risk table and the scalar constants.
pub fn load_epi_calibration(
    places: &Path,
    industry: &Path,
    params: &EpiParams,
    codes: &[String],
) -> Result<EpiCalibration> {
    let table = load_place_table(places)?;
    let beta0 = intensity_weights(&table)?;
    let b_c =
        consumption_weights(&table, codes).map_err(|e| Error::parse(places, e.to_string()))?;

    let ind = Table::read(industry)?;
    let code_col = ind.require(industry, "code")?;
    let file_codes: Vec<String> = ind.rows.iter().map(|r| r[code_col].clone()).collect();
    let order = align_codes(industry, &file_codes, codes)?;
    let column = |name: &str| -> Result<Vec<f64>> {
        let k = ind.require(industry, name)?;
        order
            .iter()
            .map(|&r| parse_f64(industry, &ind.rows[r][k]))
            .collect()
    };
    let b_w = industry_work_risk(&column("exposure")?, &column("proximity")?)
        .map_err(|e| Error::parse(industry, e.to_string()))?;
    EpiCalibration::new(beta0, b_w, b_c, column("eta")?, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn place(cat: Activity, visit: f64, dur: f64, crowd: f64) -> Place {
        Place {
            name: cat.to_string(),
            category: cat,
            visit_pct: visit,
            duration_h: dur,
            crowd,
            physical_pct: 0.0,
            industry: None,
        }
    }

    #[test]
    fn single_place_takes_everything() {
        let t = PlaceContactTable {
            rows: vec![place(Activity::School, 10.0, 2.0, 3.0)],
        };
        let b = intensity_weights(&t).unwrap();
        assert_eq!((b.work, b.school, b.home), (0.0, 1.0, 0.0));
    }

    #[test]
    fn crowd_scaling_is_invisible() {
        let rows = vec![
            place(Activity::Work, 20.0, 7.0, 20.0),
            place(Activity::Home, 95.0, 18.0, 1.0),
        ];
        let doubled = rows
            .iter()
            .map(|p| Place {
                crowd: 2.0 * p.crowd,
                ..p.clone()
            })
            .collect();
        let a = intensity_weights(&PlaceContactTable { rows }).unwrap();
        let b = intensity_weights(&PlaceContactTable { rows: doubled }).unwrap();
        assert!((a.work - b.work).abs() < 1e-15);
    }

    #[test]
    fn zero_table_rejected() {
        let t = PlaceContactTable {
            rows: vec![place(Activity::Work, 0.0, 1.0, 1.0)],
        };
        assert!(intensity_weights(&t).is_err());
    }

    #[test]
    fn work_risk_is_mean_of_indices() {
        let b = industry_work_risk(&[80.0, 20.0], &[60.0, 40.0]).unwrap();
        assert_eq!(b, vec![70.0, 30.0]);
        assert_eq!(normalized(&b), vec![0.7, 0.3]);
        assert!(industry_work_risk(&[120.0], &[0.0]).is_err());
        let uniform = industry_work_risk(&[50.0; 3], &[50.0; 3]).unwrap();
        assert!(uniform.iter().all(|v| *v == 50.0));
    }

    #[test]
    fn activity_names_parse() {
        assert_eq!("Consume".parse::<Activity>().unwrap(), Activity::Consume);
        assert!("shopping".parse::<Activity>().is_err());
    }
}
