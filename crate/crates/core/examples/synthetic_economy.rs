//! Generates a random consistent economy, writes it out and simulates it.
//!
//! `cargo run --example synthetic_economy [N] [SEED] [DIR]`

use reopen_core::data::generate_synthetic_economy;
use reopen_core::engine::{Model, SimSeries};
use reopen_core::scenario::ShockSchedule;
use reopen_core::{load_dataset, write_synthetic_dataset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(10), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |s| s.parse())?;
    let dir = args.next().map_or_else(
        || std::env::temp_dir().join(format!("synthetic-{n}-{seed}")),
        Into::into,
    );

    let syn = generate_synthetic_economy(n, seed)?;
    for path in write_synthetic_dataset(&syn, &dir)? {
        println!("wrote {}", path.display());
    }
    let d = load_dataset(&dir, true)?;
    let model = Model::new(&d.economy, &d.criticality, &d.targets, &d.params)?;
    let schedule = ShockSchedule::new(&d.economy, &d.calibration, &d.params, &vec![true; n])?;
    let out = SimSeries::relative(&model.run(&schedule, 180)?.output);
    println!(
        "output on days 30/90/180: {:.3} {:.3} {:.3}",
        out[30], out[90], out[180]
    );
    Ok(())
}
