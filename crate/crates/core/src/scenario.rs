//! Shock schedules and named reopening policies.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::data::{EconParams, Economy, PandemicCalibration, RecoveryOrigin};
use crate::engine::{DayShocks, ShockSource};
use crate::error::{Error, Result};

/// Industries whose customers are served face to face.
pub const CONSUMER_FACING: [&str; 3] = ["G47", "I", "R_S"];

/// Agriculture, mining, manufacturing, utilities and construction.
pub fn is_manuf_construction(code: &str) -> bool {
    matches!(code.chars().next(), Some('A'..='F'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioId {
    PreLockdown,
    Lockdown,
    ManufConstruction,
    AllExceptConsumerFacing,
    AllExceptConsumerFacingSchools,
    Open,
    Custom,
}

impl ScenarioId {
    /// The six named policies, from most to least restrictive after the pre-lockdown baseline.
    pub const NAMED: [ScenarioId; 6] = [
        ScenarioId::PreLockdown,
        ScenarioId::Lockdown,
        ScenarioId::ManufConstruction,
        ScenarioId::AllExceptConsumerFacing,
        ScenarioId::AllExceptConsumerFacingSchools,
        ScenarioId::Open,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::PreLockdown => "PreLockdown",
            ScenarioId::Lockdown => "Lockdown",
            ScenarioId::ManufConstruction => "ManufConstruction",
            ScenarioId::AllExceptConsumerFacing => "AllExceptConsumerFacing",
            ScenarioId::AllExceptConsumerFacingSchools => "AllExceptConsumerFacingSchools",
            ScenarioId::Open => "Open",
            ScenarioId::Custom => "Custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::PreLockdown => "No restrictions at all, as before the pandemic",
            ScenarioId::Lockdown => "Only essential workers who cannot work from home go to work",
            ScenarioId::ManufConstruction => {
                "Agriculture, mining, manufacturing, utilities and construction reopen"
            }
            ScenarioId::AllExceptConsumerFacing => {
                "All industries reopen except retail, hospitality and other personal services"
            }
            ScenarioId::AllExceptConsumerFacingSchools => {
                "As AllExceptConsumerFacing, with schools open"
            }
            ScenarioId::Open => {
                "All industries, schools and on-site consumption reopen; remote work continues"
            }
            ScenarioId::Custom => "User-defined policy",
        }
    }

    /// Whether schools are open under the policy.
    pub fn schools_open(self) -> bool {
        matches!(
            self,
            ScenarioId::AllExceptConsumerFacingSchools | ScenarioId::Open | ScenarioId::PreLockdown
        )
    }

    /// Whether on-site consumption is unrestricted under the policy.
    pub fn consumption_open(self) -> bool {
        matches!(self, ScenarioId::Open | ScenarioId::PreLockdown)
    }

    /// Whether industry `code` is allowed back to work when the lockdown ends.
    pub fn reopens(self, code: &str) -> bool {
        match self {
            ScenarioId::Lockdown | ScenarioId::Custom => false,
            ScenarioId::ManufConstruction => is_manuf_construction(code),
            ScenarioId::AllExceptConsumerFacing | ScenarioId::AllExceptConsumerFacingSchools => {
                !CONSUMER_FACING.contains(&code)
            }
            ScenarioId::Open | ScenarioId::PreLockdown => true,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        [ScenarioId::Custom]
            .into_iter()
            .chain(ScenarioId::NAMED)
            .find(|id| id.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

/// Contact reduction policy: share of each activity that still takes place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyLambda {
    pub scenario_id: ScenarioId,
    /// On-site work share per industry.
    pub delta_w: Vec<f64>,
    /// On-site consumption share per industry.
    pub delta_c: Vec<f64>,
    /// Schools open (1) or closed (0).
    pub delta_s: f64,
    /// Home contacts unrestricted (1) or distanced (0).
    pub delta_h: f64,
}

impl PolicyLambda {
    pub fn pre_lockdown(n: usize) -> Self {
        PolicyLambda {
            scenario_id: ScenarioId::PreLockdown,
            delta_w: vec![1.0; n],
            delta_c: vec![1.0; n],
            delta_s: 1.0,
            delta_h: 1.0,
        }
    }

    pub fn validate(&self, codes: &[String]) -> Result<()> {
        let n = codes.len();
        if self.delta_w.len() != n || self.delta_c.len() != n {
            return Err(Error::Validation(format!(
                "policy vectors must have {n} entries"
            )));
        }
        for (name, v) in [("delta_w", &self.delta_w), ("delta_c", &self.delta_c)] {
            if let Some(i) = v.iter().position(|d| !(0.0..=1.0).contains(d)) {
                return Err(Error::Validation(format!(
                    "{name}[{}] = {} is outside [0, 1]",
                    codes[i], v[i]
                )));
            }
        }
        for (name, d) in [("delta_s", self.delta_s), ("delta_h", self.delta_h)] {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Validation(format!("{name} = {d} is outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Contact policy of a named scenario.
pub fn policy_lambda(
    id: ScenarioId,
    calib: &PandemicCalibration,
    codes: &[String],
) -> Result<PolicyLambda> {
    let n = codes.len();
    if id == ScenarioId::Custom {
        return Err(Error::Config(
            "a custom scenario needs an explicit definition".into(),
        ));
    }
    if id == ScenarioId::PreLockdown {
        return Ok(PolicyLambda::pre_lockdown(n));
    }
    let delta_w = (0..n)
        .map(|i| {
            let remote_excluded = 1.0 - calib.rli[i];
            if id.reopens(&codes[i]) {
                remote_excluded
            } else {
                calib.ess_w[i] * remote_excluded
            }
        })
        .collect();
    let delta_c = if id.consumption_open() {
        vec![1.0; n]
    } else {
        calib.ess_c.clone()
    };
    Ok(PolicyLambda {
        scenario_id: id,
        delta_w,
        delta_c,
        delta_s: if id.schools_open() { 1.0 } else { 0.0 },
        delta_h: 0.0,
    })
}

/// Declarative scenario: a named base plus optional overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub scenario: Option<String>,
    /// Industries that reopen when the lockdown ends; replaces the base set.
    pub open: Option<Vec<String>>,
    pub schools: Option<bool>,
    /// Lift restrictions on on-site consumption.
    pub consumption: Option<bool>,
    pub delta_h: Option<f64>,
    pub delta_s: Option<f64>,
    pub delta_w: BTreeMap<String, f64>,
    pub delta_c: BTreeMap<String, f64>,
}

/// A resolved scenario: contact policy plus the economic reopening set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub id: ScenarioId,
    pub lambda: PolicyLambda,
    pub open: Vec<bool>,
}

impl Scenario {
    pub fn named(id: ScenarioId, calib: &PandemicCalibration, codes: &[String]) -> Result<Self> {
        let lambda = policy_lambda(id, calib, codes)?;
        Ok(Scenario {
            id,
            lambda,
            open: codes.iter().map(|c| id.reopens(c)).collect(),
        })
    }

    pub fn open_codes<'c>(&self, codes: &'c [String]) -> Vec<&'c str> {
        codes
            .iter()
            .zip(&self.open)
            .filter(|(_, o)| **o)
            .map(|(c, _)| c.as_str())
            .collect()
    }
}

impl ScenarioSpec {
    pub fn named(id: ScenarioId) -> Self {
        ScenarioSpec {
            scenario: Some(id.as_str().to_string()),
            ..Default::default()
        }
    }

    fn has_overrides(&self) -> bool {
        self.open.is_some()
            || self.schools.is_some()
            || self.consumption.is_some()
            || self.delta_h.is_some()
            || self.delta_s.is_some()
            || !self.delta_w.is_empty()
            || !self.delta_c.is_empty()
    }

    /// Applies the overrides on top of the base scenario (Lockdown when unnamed).
    pub fn resolve(&self, calib: &PandemicCalibration, codes: &[String]) -> Result<Scenario> {
        let base = match &self.scenario {
            Some(name) => name.parse()?,
            None => ScenarioId::Lockdown,
        };
        let base = if base == ScenarioId::Custom {
            ScenarioId::Lockdown
        } else {
            base
        };
        let mut sc = Scenario::named(base, calib, codes)?;
        if !self.has_overrides() {
            return Ok(sc);
        }
        sc.id = ScenarioId::Custom;
        sc.lambda.scenario_id = ScenarioId::Custom;
        let index = |code: &str| {
            codes
                .iter()
                .position(|c| c == code)
                .ok_or_else(|| Error::Validation(format!("unknown industry code {code:?}")))
        };
        if let Some(open) = &self.open {
            sc.open = vec![false; codes.len()];
            for code in open {
                sc.open[index(code)?] = true;
            }
            for i in 0..codes.len() {
                let remote_excluded = 1.0 - calib.rli[i];
                sc.lambda.delta_w[i] = if sc.open[i] {
                    remote_excluded
                } else {
                    calib.ess_w[i] * remote_excluded
                };
            }
        }
        if let Some(schools) = self.schools {
            sc.lambda.delta_s = if schools { 1.0 } else { 0.0 };
        }
        if let Some(consumption) = self.consumption {
            sc.lambda.delta_c = if consumption {
                vec![1.0; codes.len()]
            } else {
                calib.ess_c.clone()
            };
        }
        if let Some(d) = self.delta_s {
            sc.lambda.delta_s = d;
        }
        if let Some(d) = self.delta_h {
            sc.lambda.delta_h = d;
        }
        for (code, d) in &self.delta_w {
            sc.lambda.delta_w[index(code)?] = *d;
        }
        for (code, d) in &self.delta_c {
            sc.lambda.delta_c[index(code)?] = *d;
        }
        sc.lambda.validate(codes)?;
        Ok(sc)
    }
}

/// Labor supply reduction in force on day `t`.
pub fn lockdown_labor_supply(
    calib: &PandemicCalibration,
    open: &[bool],
    t: usize,
    params: &EconParams,
) -> Vec<f64> {
    (0..calib.n())
        .map(|i| {
            if t < params.t_start_lockdown || (t >= params.t_end_lockdown && open[i]) {
                0.0
            } else {
                calib.eps_s[i]
            }
        })
        .collect()
}

/// Demand shock remaining `s` days into a recovery lasting `span` days.
pub fn recovery_curve(eps_d: f64, s: f64, span: f64) -> f64 {
    if s >= span {
        0.0
    } else {
        eps_d * (100.0 - 99.0 * s / span).ln() / 100f64.ln()
    }
}

/// Consumption demand shock of one industry on day `t`.
pub fn consumption_shock_path(
    eps_d: f64,
    onsite: bool,
    reopened: bool,
    t: usize,
    params: &EconParams,
) -> f64 {
    if t < params.t_start_lockdown {
        return 0.0;
    }
    if t < params.t_end_lockdown || !reopened {
        return eps_d;
    }
    if !onsite || t >= params.t_end_pandemic {
        return 0.0;
    }
    let origin = match params.recovery_origin {
        RecoveryOrigin::LockdownStart => params.t_start_lockdown,
        RecoveryOrigin::Reopening => params.t_end_lockdown,
    };
    recovery_curve(
        eps_d,
        (t - origin) as f64,
        (params.t_end_pandemic - origin) as f64,
    )
}

/// Other final demand on day `t`; the shock is never lifted.
pub fn other_final_demand_path(
    f0: &DVector<f64>,
    f_shock: &[f64],
    t: usize,
    params: &EconParams,
) -> DVector<f64> {
    if t < params.t_start_lockdown {
        f0.clone()
    } else {
        DVector::from_fn(f0.len(), |i, _| (1.0 - f_shock[i]) * f0[i])
    }
}

/// Income households expect to keep while locked down, from first-order labor cuts.
pub fn lockdown_income_expectation(l_lockdown: f64, l0: f64) -> f64 {
    1.0 - 0.5 * (l0 - l_lockdown) / l0
}

/// Permanent income factor on day `t`; `lifted` says whether the lockdown ever ends.
pub fn permanent_income_factor(
    t: usize,
    xi_lockdown: f64,
    params: &EconParams,
    lifted: bool,
) -> f64 {
    if t < params.t_start_lockdown {
        return 1.0;
    }
    if t < params.t_end_lockdown || !lifted {
        return xi_lockdown;
    }
    let rho = params.rho();
    let nu = -(1.0 - rho) * (1.0 - xi_lockdown) * params.belief_l_share;
    let mut xi = xi_lockdown;
    for _ in params.t_end_lockdown..=t {
        xi = 1.0 - rho + rho * xi + nu;
    }
    xi
}

/// Day-by-day shocks for one reopening scenario.
#[derive(Debug, Clone)]
pub struct ShockSchedule {
    params: EconParams,
    calib: PandemicCalibration,
    open: Vec<bool>,
    f0: DVector<f64>,
    xi_lockdown: f64,
    lifted: bool,
}

impl ShockSchedule {
    pub fn new(
        economy: &Economy,
        calib: &PandemicCalibration,
        params: &EconParams,
        open: &[bool],
    ) -> Result<Self> {
        let n = economy.n();
        calib.validate(&economy.codes)?;
        if open.len() != n {
            return Err(Error::Validation(format!(
                "reopening set must have {n} entries"
            )));
        }
        let l0 = economy.l0.sum();
        let l_lockdown: f64 = (0..n).map(|i| (1.0 - calib.eps_s[i]) * economy.l0[i]).sum();
        Ok(ShockSchedule {
            params: params.clone(),
            calib: calib.clone(),
            open: open.to_vec(),
            f0: economy.f0.clone(),
            xi_lockdown: lockdown_income_expectation(l_lockdown, l0),
            lifted: open.iter().any(|o| *o),
        })
    }

    pub fn for_scenario(
        economy: &Economy,
        calib: &PandemicCalibration,
        params: &EconParams,
        scenario: &Scenario,
    ) -> Result<Self> {
        Self::new(economy, calib, params, &scenario.open)
    }

    /// Lockdown that is never lifted.
    pub fn indefinite(
        economy: &Economy,
        calib: &PandemicCalibration,
        params: &EconParams,
    ) -> Result<Self> {
        Self::new(economy, calib, params, &vec![false; economy.n()])
    }

    pub fn xi_lockdown(&self) -> f64 {
        self.xi_lockdown
    }
}

impl ShockSource for ShockSchedule {
    fn shocks(&self, t: usize) -> DayShocks {
        let p = &self.params;
        let n = self.open.len();
        let eps_s = lockdown_labor_supply(&self.calib, &self.open, t, p);
        let eps_c = (0..n)
            .map(|i| {
                consumption_shock_path(
                    self.calib.eps_d[i],
                    self.calib.onsite[i],
                    self.open[i],
                    t,
                    p,
                )
            })
            .collect::<Vec<_>>();
        DayShocks {
            t,
            eps_s: DVector::from_vec(eps_s),
            eps_c: DVector::from_vec(eps_c),
            f_d: other_final_demand_path(&self.f0, &self.calib.f_shock, t, p),
            xi: permanent_income_factor(t, self.xi_lockdown, p, self.lifted),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> EconParams {
        EconParams {
            t_start_lockdown: 0,
            t_end_lockdown: 10,
            t_end_pandemic: 100,
            ..EconParams::default()
        }
    }

    #[test]
    fn recovery_endpoints_and_midpoint() {
        assert_eq!(recovery_curve(0.8, 0.0, 100.0), 0.8);
        assert_eq!(recovery_curve(0.8, 100.0, 100.0), 0.0);
        let mid = recovery_curve(0.8, 50.0, 100.0);
        assert!((mid - 0.8 * 50.5f64.ln() / 100f64.ln()).abs() < 1e-15);
        assert!((mid - 0.681).abs() < 1e-3);
    }

    #[test]
    fn shock_phases() {
        let p = EconParams {
            t_start_lockdown: 2,
            ..params()
        };
        assert_eq!(consumption_shock_path(0.8, true, true, 1, &p), 0.0);
        assert_eq!(consumption_shock_path(0.8, true, true, 5, &p), 0.8);
        assert_eq!(consumption_shock_path(0.8, false, true, 10, &p), 0.0);
        assert_eq!(consumption_shock_path(0.8, false, false, 50, &p), 0.8);
        let onsite = consumption_shock_path(0.8, true, true, 10, &p);
        assert!(onsite > 0.0 && onsite < 0.8);
        assert_eq!(consumption_shock_path(0.8, true, true, 100, &p), 0.0);
    }

    #[test]
    fn income_expectations() {
        let xi_l = lockdown_income_expectation(84.0, 100.0);
        assert!((xi_l - 0.92).abs() < 1e-12);
        let p = params();
        let far = permanent_income_factor(100_000, xi_l, &p, true);
        assert!((far - 0.96).abs() < 1e-9);
        assert_eq!(permanent_income_factor(5, xi_l, &p, true), xi_l);
        assert_eq!(permanent_income_factor(50, xi_l, &p, false), xi_l);
        assert_eq!(permanent_income_factor(50, 1.0, &p, true), 1.0);
    }

    #[test]
    fn final_demand_shock_is_permanent() {
        let f0 = DVector::from_vec(vec![100.0]);
        let p = EconParams {
            t_start_lockdown: 3,
            ..params()
        };
        assert_eq!(other_final_demand_path(&f0, &[0.33], 2, &p)[0], 100.0);
        assert!((other_final_demand_path(&f0, &[0.33], 500, &p)[0] - 67.0).abs() < 1e-12);
    }

    #[test]
    fn scenario_names_parse() {
        assert_eq!(
            "lockdown".parse::<ScenarioId>().unwrap(),
            ScenarioId::Lockdown
        );
        assert_eq!(
            "all-except-consumer-facing-schools"
                .parse::<ScenarioId>()
                .unwrap(),
            ScenarioId::AllExceptConsumerFacingSchools
        );
        assert_eq!("Open".parse::<ScenarioId>().unwrap(), ScenarioId::Open);
        assert!("closed".parse::<ScenarioId>().is_err());
    }

    fn calib() -> (Vec<String>, PandemicCalibration) {
        let codes: Vec<String> = ["C10-C12", "G47", "K64", "I"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let c = PandemicCalibration::new(
            &codes,
            vec![String::new(); 4],
            vec![0.1, 0.4, 0.2, 0.6],
            vec![0.1, 0.2, 0.0, 0.8],
            vec![0.22, 0.2, 0.71, 0.35],
            vec![0.99, 0.37, 0.9, 0.06],
            vec![0.3, 0.3, 0.3, 0.3],
            vec![false, true, false, true],
        )
        .unwrap();
        (codes, c)
    }

    #[test]
    fn named_policies() {
        let (codes, c) = calib();
        let l = policy_lambda(ScenarioId::Lockdown, &c, &codes).unwrap();
        assert_eq!(l.delta_c, vec![0.0, 0.37, 0.0, 0.0]);
        assert!((l.delta_w[3] - 0.039).abs() < 1e-12);
        let open = policy_lambda(ScenarioId::Open, &c, &codes).unwrap();
        assert!((open.delta_w[2] - 0.29).abs() < 1e-12);
        let mc = policy_lambda(ScenarioId::ManufConstruction, &c, &codes).unwrap();
        assert!((mc.delta_w[0] - 0.78).abs() < 1e-12);
        assert_eq!(mc.delta_w[1], l.delta_w[1]);
        let pre = policy_lambda(ScenarioId::PreLockdown, &c, &codes).unwrap();
        assert!(pre.delta_w.iter().chain(&pre.delta_c).all(|d| *d == 1.0));
    }

    #[test]
    fn custom_spec_overrides() {
        let (codes, c) = calib();
        let spec = ScenarioSpec {
            open: Some(vec!["I".into()]),
            schools: Some(true),
            ..Default::default()
        };
        let sc = spec.resolve(&c, &codes).unwrap();
        assert_eq!(sc.id, ScenarioId::Custom);
        assert_eq!(sc.open, vec![false, false, false, true]);
        assert_eq!(sc.lambda.delta_s, 1.0);
        assert!((sc.lambda.delta_w[3] - 0.65).abs() < 1e-12);

        let mut bad = ScenarioSpec::named(ScenarioId::Open);
        bad.delta_w.insert("K64".into(), 2.0);
        assert!(matches!(bad.resolve(&c, &codes), Err(Error::Validation(_))));

        let plain = ScenarioSpec::named(ScenarioId::Open)
            .resolve(&c, &codes)
            .unwrap();
        assert_eq!(plain.id, ScenarioId::Open);
    }

    #[test]
    fn labor_supply_phases() {
        let (_, c) = calib();
        let p = EconParams {
            t_start_lockdown: 2,
            ..params()
        };
        let open = [true, false, false, false];
        assert_eq!(lockdown_labor_supply(&c, &open, 1, &p), vec![0.0; 4]);
        assert_eq!(lockdown_labor_supply(&c, &open, 5, &p), c.eps_s);
        assert_eq!(
            lockdown_labor_supply(&c, &open, 10, &p),
            vec![0.0, 0.4, 0.2, 0.6]
        );
    }
}
