use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Economy;
use crate::error::{Error, Result};

/// Tabulated daily consumption persistence; the default derives it from `rho_bar` instead.
pub const RHO_TABLE: f64 = 0.987;

/// How input stocks limit production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProdFn {
    /// Every input with a positive coefficient binds.
    Leontief,
    /// Inputs are perfect substitutes.
    Linear,
    /// Only critical inputs bind.
    CriticalBaseline,
    /// Critical and important inputs bind.
    ImportantCritical,
    /// Critical inputs bind; important inputs bind at half weight.
    ImportantHalf,
}

impl ProdFn {
    pub const ALL: [ProdFn; 5] = [
        ProdFn::Leontief,
        ProdFn::ImportantCritical,
        ProdFn::ImportantHalf,
        ProdFn::CriticalBaseline,
        ProdFn::Linear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProdFn::Leontief => "leontief",
            ProdFn::Linear => "linear",
            ProdFn::CriticalBaseline => "critical_baseline",
            ProdFn::ImportantCritical => "important_critical",
            ProdFn::ImportantHalf => "important_half",
        }
    }
}

/// Household consumption rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsFn {
    Muellbauer,
    Keynesian,
    Fixed,
}

impl ConsFn {
    pub fn as_str(self) -> &'static str {
        match self {
            ConsFn::Muellbauer => "muellbauer",
            ConsFn::Keynesian => "keynesian",
            ConsFn::Fixed => "fixed",
        }
    }
}

/// Day from which the slow on-site demand recovery is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryOrigin {
    LockdownStart,
    Reopening,
}

macro_rules! keyword_enum {
    ($ty:ty, $($variant:expr),+) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let key = s.trim().to_ascii_lowercase().replace('-', "_");
                [$($variant),+]
                    .into_iter()
                    .find(|v| v.as_str() == key)
                    .ok_or_else(|| Error::Config(format!("unknown value {s:?}")))
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(
    ProdFn,
    ProdFn::Leontief,
    ProdFn::Linear,
    ProdFn::CriticalBaseline,
    ProdFn::ImportantCritical,
    ProdFn::ImportantHalf
);
keyword_enum!(ConsFn, ConsFn::Muellbauer, ConsFn::Keynesian, ConsFn::Fixed);

impl RecoveryOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            RecoveryOrigin::LockdownStart => "lockdown_start",
            RecoveryOrigin::Reopening => "reopening",
        }
    }
}
keyword_enum!(
    RecoveryOrigin,
    RecoveryOrigin::LockdownStart,
    RecoveryOrigin::Reopening
);

/// Parameters of the economic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconParams {
    /// Inventory adjustment time in days.
    pub tau: f64,
    pub gamma_h: f64,
    pub gamma_f: f64,
    /// Daily consumption persistence; derived from `rho_bar` when absent.
    pub rho: Option<f64>,
    /// Quarterly consumption persistence.
    pub rho_bar: f64,
    /// Consumption share of labor income; taken from the data when absent.
    pub m: Option<f64>,
    /// Share of lost labor income replaced by benefits.
    pub b: f64,
    pub delta_s_save: f64,
    pub t_start_lockdown: usize,
    pub t_end_lockdown: usize,
    pub t_end_pandemic: usize,
    pub prod_fn: ProdFn,
    pub cons_fn: ConsFn,
    pub belief_l_share: f64,
    pub recovery_origin: RecoveryOrigin,
}

impl Default for EconParams {
    fn default() -> Self {
        EconParams {
            tau: 10.0,
            gamma_h: 1.0 / 30.0,
            gamma_f: 1.0 / 15.0,
            rho: None,
            rho_bar: 0.6,
            m: None,
            b: 0.8,
            delta_s_save: 0.5,
            t_start_lockdown: 2,
            t_end_lockdown: 62,
            t_end_pandemic: 242,
            prod_fn: ProdFn::CriticalBaseline,
            cons_fn: ConsFn::Muellbauer,
            belief_l_share: 0.5,
            recovery_origin: RecoveryOrigin::LockdownStart,
        }
    }
}

impl EconParams {
    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(1.0 - (1.0 - self.rho_bar) / 90.0)
    }

    /// Consumption share of labor income that makes the initial state a fixed point.
    pub fn m_for(&self, economy: &Economy) -> f64 {
        self.m
            .unwrap_or_else(|| economy.c0.sum() / economy.l0.sum())
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must lie in [0, 1]")))
            }
        };
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!(
                "tau = {} must be positive",
                self.tau
            )));
        }
        if !(0.0 <= self.gamma_h && self.gamma_h <= self.gamma_f && self.gamma_f <= 1.0) {
            return Err(Error::Config(format!(
                "need 0 <= gamma_h ({}) <= gamma_f ({}) <= 1",
                self.gamma_h, self.gamma_f
            )));
        }
        let rho = self.rho();
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Config(format!("rho = {rho} must lie in (0, 1)")));
        }
        unit("rho_bar", self.rho_bar)?;
        unit("b", self.b)?;
        unit("delta_s_save", self.delta_s_save)?;
        unit("belief_l_share", self.belief_l_share)?;
        if let Some(m) = self.m {
            unit("m", m)?;
        }
        if !(self.t_start_lockdown < self.t_end_lockdown
            && self.t_end_lockdown <= self.t_end_pandemic)
        {
            return Err(Error::Config(format!(
                "need t_start_lockdown ({}) < t_end_lockdown ({}) <= t_end_pandemic ({})",
                self.t_start_lockdown, self.t_end_lockdown, self.t_end_pandemic
            )));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let params: EconParams =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        params.validate()?;
        Ok(params)
    }
}

/// Reads a flat key-value file; missing keys keep their defaults.
pub fn load_params(path: &Path) -> Result<EconParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    EconParams::from_toml(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = EconParams::default();
        p.validate().unwrap();
        assert!((p.rho() - (1.0 - 0.4 / 90.0)).abs() < 1e-15);
        assert!((p.rho() - 0.99556).abs() < 1e-5);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let p = EconParams::from_toml("tau = 5\nprod_fn = \"leontief\"\nrho = 0.987").unwrap();
        assert_eq!(p.tau, 5.0);
        assert_eq!(p.prod_fn, ProdFn::Leontief);
        assert_eq!(p.rho(), RHO_TABLE);
        assert_eq!(p.b, 0.8);
    }

    #[test]
    fn bad_values_are_config_errors() {
        for text in [
            "gamma_h = 0.5\ngamma_f = 0.1",
            "t_start_lockdown = 10\nt_end_lockdown = 5",
            "unknown_key = 1",
            "b = 1.5",
            "prod_fn = \"cobb_douglas\"",
        ] {
            let err = EconParams::from_toml(text).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}");
        }
    }

    #[test]
    fn keywords_parse() {
        assert_eq!(
            "important-half".parse::<ProdFn>().unwrap(),
            ProdFn::ImportantHalf
        );
        assert_eq!("Keynesian".parse::<ConsFn>().unwrap(), ConsFn::Keynesian);
        assert!("quadratic".parse::<ConsFn>().is_err());
    }
}
