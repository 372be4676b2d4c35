//! Command-line interface.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use reopen_core::analysis::PerturbMode;
use reopen_core::data::{ConsFn, ProdFn};
use reopen_core::{Error, ErrorKind, Result};

use crate::api::{serve, AppState};
use crate::commands::{Command, Context, SeriesFormat};
use crate::config::RunConfig;
use crate::manifest::{load_manifest, replay, run, write_run};

#[derive(Debug, Parser)]
#[command(
    name = "reopen",
    version,
    about = "Lockdown and reopening simulations on a production network"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Dataset directory [default: $REOPEN_DATA_DIR, then the bundled dataset]
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    /// TOML run configuration; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named scenario, e.g. lockdown, manuf-construction, open
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    #[arg(long, global = true)]
    pub prod_fn: Option<ProdFn>,
    #[arg(long, global = true)]
    pub cons_fn: Option<ConsFn>,
    /// Days to simulate
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for output files and the run manifest; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Treat accounting residuals and rating-count mismatches as errors
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Simulate one scenario and write the daily series
    Simulate {
        #[arg(long, value_enum, default_value_t = SeriesFormat::Csv)]
        format: SeriesFormat,
    },
    /// Score the six named scenarios: R0 and value added
    Scenarios,
    /// Perturb the shocks and report quantile bands of output
    Sensitivity {
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        mode: Option<PerturbMode>,
    },
    /// Leontief and Ghosh predictions of the first lockdown shock
    CompareIo,
    /// Transmission breakdown and R0 of a scenario
    EpiR0,
    /// Generate a synthetic dataset directory
    Synth {
        #[arg(long, default_value_t = 10)]
        industries: usize,
    },
    /// Serve the HTTP API
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Rerun a manifest and check that every output is byte-identical
    Replay { manifest: PathBuf },
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Config => 1,
        ErrorKind::Data => 2,
        ErrorKind::Numerical => 3,
    }
}

impl GlobalArgs {
    /// The configuration file, if any, with the flags laid over it.
    pub fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(d) = &self.data_dir {
            c.data_dir = Some(d.clone());
        }
        if let Some(s) = &self.scenario {
            c.scenario.scenario = Some(s.clone());
        }
        if let Some(p) = self.prod_fn {
            c.set_param("prod_fn", p.as_str());
        }
        if let Some(f) = self.cons_fn {
            c.set_param("cons_fn", f.to_string());
        }
        if self.horizon.is_some() {
            c.horizon = self.horizon;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        c.strict |= self.strict;
        Ok(c)
    }
}

/// Runs the parsed command line, writing results to `stdout`.
pub fn run_cli(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut config = cli.global.config()?;
    let command = match cli.command {
        Sub::Simulate { format } => Command::Simulate { format },
        Sub::Scenarios => Command::Scenarios,
        Sub::Sensitivity { sigma, runs, mode } => {
            let s = &mut config.sensitivity;
            s.sigma = sigma.unwrap_or(s.sigma);
            s.n_runs = runs.unwrap_or(s.n_runs);
            s.mode = mode.unwrap_or(s.mode);
            Command::Sensitivity
        }
        Sub::CompareIo => Command::CompareIo,
        Sub::EpiR0 => Command::EpiR0,
        Sub::Synth { industries } => {
            if cli.global.out.is_none() {
                return Err(Error::Config("synth needs --out".into()));
            }
            Command::Synth { industries }
        }
        Sub::Serve { addr } => return serve_blocking(addr, config),
        Sub::Replay { manifest } => {
            let m = load_manifest(&manifest)?;
            let (report, mut again) = replay(&m)?;
            if let Some(dir) = &cli.global.out {
                write_run(&mut again, dir)?;
            }
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Numerical(e.to_string()))?;
            writeln!(stdout, "{text}").map_err(stdout_error)?;
            if !report.identical {
                return Err(Error::Numerical(format!(
                    "replay of {} differs: {}",
                    report.run_id,
                    report.mismatched.join(", ")
                )));
            }
            return Ok(());
        }
    };

    let mut result = run(&command, &config)?;
    match &cli.global.out {
        Some(dir) => {
            let path = write_run(&mut result, dir)?;
            log::info!(
                "run {} written to {}",
                result.manifest.run_id,
                path.display()
            );
        }
        None => {
            if let Some(first) = result.artifacts.first() {
                stdout.write_all(&first.bytes).map_err(stdout_error)?;
            }
        }
    }
    Ok(())
}

fn stdout_error(e: std::io::Error) -> Error {
    Error::Config(format!("cannot write to stdout: {e}"))
}

fn serve_blocking(addr: SocketAddr, config: RunConfig) -> Result<()> {
    let ctx = Context::load(config)?;
    let state = AppState::new(ctx.dataset, ctx.params);
    let rt = tokio::runtime::Runtime::new().map_err(|e| Error::Config(format!("runtime: {e}")))?;
    rt.block_on(serve(addr, state))
        .map_err(|e| Error::Config(format!("cannot serve on {addr}: {e}")))
}
