//! Perturbs the first-order shocks and prints daily quantile bands.
//!
//! `cargo run --release --example sensitivity_ensemble [N_RUNS]`

use reopen_core::analysis::{perturbation_ensemble, EnsembleConfig, EnsembleInputs, PerturbMode};
use reopen_core::Dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_runs = std::env::args().nth(1).map_or(Ok(50), |s| s.parse())?;
    let d = Dataset::bundled()?;
    let open = vec![true; d.economy.n()];
    let inputs = EnsembleInputs {
        economy: &d.economy,
        criticality: &d.criticality,
        targets: &d.targets,
        params: &d.params,
        calibration: &d.calibration,
        open: &open,
        horizon: 120,
    };
    for mode in [
        PerturbMode::DemandOnly,
        PerturbMode::SupplyOnly,
        PerturbMode::Both,
    ] {
        let config = EnsembleConfig {
            sigma: 0.2,
            n_runs,
            seed: 42,
            mode,
        };
        let s = perturbation_ensemble(&inputs, &config)?;
        println!("{}", mode.as_str());
        for t in [30, 60, 90, 120] {
            println!(
                "  day {t:>3}  base {:.3}  median {:.3}  50% [{:.3}, {:.3}]  95% [{:.3}, {:.3}]",
                s.base[t], s.median[t], s.q25[t], s.q75[t], s.q025[t], s.q975[t]
            );
        }
    }
    Ok(())
}
