//! Run manifests: what went into a run and what came out, with digests for replay.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use reopen_core::data::EconParams;
use reopen_core::epi::EpiParams;
use reopen_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{execute_with, Artifact, Command, Context};
use crate::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of_file(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        Ok(FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
}

/// Record of one run. Everything except `timing` is a function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub command: Command,
    pub config: RunConfig,
    pub data_dir: Option<PathBuf>,
    pub inputs: Vec<FileDigest>,
    pub params: Option<EconParams>,
    pub epi_params: Option<EpiParams>,
    pub scenario: Option<String>,
    pub outputs: Vec<FileDigest>,
    pub timing: Timing,
}

fn run_id(command: &Command, config: &RunConfig, inputs: &[FileDigest]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(command).unwrap_or_default());
    h.update(serde_json::to_vec(config).unwrap_or_default());
    for d in inputs {
        h.update(d.sha256.as_bytes());
    }
    hex::encode(h.finalize())[..16].to_string()
}

/// Result of executing a command with provenance.
#[derive(Debug, Clone)]
pub struct Run {
    pub manifest: RunManifest,
    pub artifacts: Vec<Artifact>,
}

/// Digests the inputs, runs `command` and fills in the manifest. Nothing is written.
pub fn run(command: &Command, config: &RunConfig) -> Result<Run> {
    let started = Instant::now();
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let mut config = config.clone();
    let (inputs, ctx) = if command.needs_dataset() {
        let dir = config.resolve_data_dir();
        let dir = dir
            .canonicalize()
            .map_err(|e| Error::Validation(format!("{}: {e}", dir.display())))?;
        config.data_dir = Some(dir);
        let ctx = Context::load(config.clone())?;
        let inputs = ctx
            .dataset
            .files()
            .iter()
            .map(|p| FileDigest::of_file(p))
            .collect::<Result<Vec<_>>>()?;
        (inputs, Some(ctx))
    } else {
        (Vec::new(), None)
    };
    let artifacts = match &ctx {
        Some(ctx) => execute_with(command, ctx)?,
        None => crate::commands::execute(command, &config)?,
    };
    let manifest = RunManifest {
        run_id: run_id(command, &config, &inputs),
        command: command.clone(),
        data_dir: config.data_dir.clone().filter(|_| ctx.is_some()),
        inputs,
        params: ctx.as_ref().map(|c| c.params.clone()),
        epi_params: ctx.as_ref().map(|c| c.dataset.epi_params.clone()),
        scenario: match (&ctx, command) {
            (Some(c), Command::Simulate { .. } | Command::EpiR0) => {
                Some(c.scenario()?.id.to_string())
            }
            (Some(c), Command::Sensitivity) => Some(
                crate::commands::ensemble_spec(&c.config.scenario)
                    .resolve(&c.dataset.calibration, c.dataset.codes())?
                    .id
                    .to_string(),
            ),
            _ => None,
        },
        outputs: artifacts
            .iter()
            .map(|a| FileDigest {
                path: PathBuf::from(&a.name),
                sha256: sha256_hex(&a.bytes),
            })
            .collect(),
        config,
        timing: Timing {
            started_unix_ms,
            elapsed_ms: started.elapsed().as_millis(),
        },
    };
    Ok(Run {
        manifest,
        artifacts,
    })
}

/// Writes the artifacts and the manifest into `dir`; output paths become absolute.
pub fn write_run(run: &mut Run, dir: &Path) -> Result<PathBuf> {
    let io =
        |p: &Path, e: std::io::Error| Error::Config(format!("cannot write {}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    for (a, d) in run.artifacts.iter().zip(&mut run.manifest.outputs) {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|e| io(&path, e))?;
        d.path = path;
    }
    let path = dir.join(MANIFEST_FILE);
    let mut text =
        serde_json::to_vec_pretty(&run.manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    text.push(b'\n');
    std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    Ok(path)
}

pub fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text =
        std::fs::read(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Outcome of a replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub run_id: String,
    pub identical: bool,
    pub mismatched: Vec<String>,
}

/// Reruns a manifest and compares every output digest.
///
/// Inputs that changed since the original run are a data error.
pub fn replay(manifest: &RunManifest) -> Result<(ReplayReport, Run)> {
    for d in &manifest.inputs {
        let now = FileDigest::of_file(&d.path)?;
        if now.sha256 != d.sha256 {
            return Err(Error::Validation(format!(
                "{} changed since run {}",
                d.path.display(),
                manifest.run_id
            )));
        }
    }
    let again = run(&manifest.command, &manifest.config)?;
    let mismatched: Vec<String> = manifest
        .outputs
        .iter()
        .zip(&again.manifest.outputs)
        .filter(|(a, b)| a.sha256 != b.sha256)
        .map(|(a, _)| a.path.display().to_string())
        .chain(
            (again.manifest.outputs.len() != manifest.outputs.len())
                .then(|| "number of outputs".to_string()),
        )
        .collect();
    Ok((
        ReplayReport {
            run_id: manifest.run_id.clone(),
            identical: mismatched.is_empty() && again.manifest.run_id == manifest.run_id,
            mismatched,
        },
        again,
    ))
}
