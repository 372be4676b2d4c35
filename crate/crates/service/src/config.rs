//! Run configuration: an optional TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use reopen_core::analysis::PerturbMode;
use reopen_core::data::EconParams;
use reopen_core::scenario::ScenarioSpec;
use reopen_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DATA_DIR_ENV: &str = "REOPEN_DATA_DIR";

/// Everything that determines a run's outputs besides the dataset files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub strict: bool,
    pub horizon: Option<usize>,
    pub seed: u64,
    pub scenario: ScenarioSpec,
    /// Overrides on top of the dataset's economic parameters.
    pub params: Map<String, Value>,
    pub sensitivity: SensitivityConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityConfig {
    pub sigma: f64,
    pub n_runs: usize,
    pub mode: PerturbMode,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig {
            sigma: 0.2,
            n_runs: 100,
            mode: PerturbMode::Both,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: None,
            strict: false,
            horizon: None,
            seed: 42,
            scenario: ScenarioSpec::default(),
            params: Map::new(),
            sensitivity: SensitivityConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Data directory: the configured one, then `REOPEN_DATA_DIR`, then the bundled dataset.
    pub fn resolve_data_dir(&self) -> PathBuf {
        self.data_dir
            .clone()
            .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(reopen_core::bundled_data_dir)
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }
}

/// Applies key-by-key overrides to `base`; unknown keys and bad values are config errors.
pub fn apply_param_overrides(
    base: &EconParams,
    overrides: &Map<String, Value>,
) -> Result<EconParams> {
    if overrides.is_empty() {
        return Ok(base.clone());
    }
    let mut value = serde_json::to_value(base).map_err(|e| Error::Config(e.to_string()))?;
    let table = value
        .as_object_mut()
        .ok_or_else(|| Error::Config("parameters do not serialize to a table".into()))?;
    for (k, v) in overrides {
        table.insert(k.clone(), v.clone());
    }
    let params: EconParams =
        serde_json::from_value(value).map_err(|e| Error::Config(format!("parameters: {e}")))?;
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_replace_only_named_keys() {
        let base = EconParams::default();
        let mut o = Map::new();
        o.insert("b".into(), Value::from(0.5));
        o.insert("prod_fn".into(), Value::from("leontief"));
        let p = apply_param_overrides(&base, &o).unwrap();
        assert_eq!(p.b, 0.5);
        assert_eq!(p.prod_fn.as_str(), "leontief");
        assert_eq!(p.tau, base.tau);
    }

    #[test]
    fn unknown_or_invalid_overrides_are_config_errors() {
        let base = EconParams::default();
        for (k, v) in [
            ("nonsense", Value::from(1)),
            ("b", Value::from(3.0)),
            ("tau", Value::from("x")),
        ] {
            let mut o = Map::new();
            o.insert(k.into(), v);
            let err = apply_param_overrides(&base, &o).unwrap_err();
            assert_eq!(err.kind(), reopen_core::ErrorKind::Config, "{k}");
        }
    }

    #[test]
    fn toml_file_round_trip() {
        let text = r#"
            seed = 7
            horizon = 90
            [scenario]
            scenario = "open"
            delta_w = { K64 = 0.5 }
            [params]
            b = 0.6
            [sensitivity]
            n_runs = 10
        "#;
        let c: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.scenario.delta_w["K64"], 0.5);
        assert_eq!(c.params["b"], Value::from(0.6));
        assert_eq!(c.sensitivity.sigma, 0.2);
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }
}
