//! Integrates the SIR model at the pre-lockdown R0 and checks early growth.

use reopen_core::epi::sir_integrate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (beta, gamma) = (0.38, 1.0 / 7.0);
    let s = sir_integrate(beta, gamma, 1.0 - 1e-6, 1e-6, 0.0, 200.0, 0.01)?;
    let growth = s.growth_rate(0, 2000);
    println!("R0                  {:.3}", beta / gamma);
    println!(
        "growth over 20 days {growth:.4} (beta - gamma = {:.4})",
        beta - gamma
    );
    let peak = (0..s.len())
        .max_by(|&a, &b| s.i[a].total_cmp(&s.i[b]))
        .unwrap_or(0);
    println!(
        "peak infections     {:.1}% on day {:.0}",
        100.0 * s.i[peak],
        s.t[peak]
    );
    println!("never infected      {:.1}%", 100.0 * s.s[s.len() - 1]);
    Ok(())
}
