//! Runs a named preset through the same configuration path as the `jelab`
//! binary. Usage: `cargo run --example presets -- paper-fig-s7-f90`.

use qutrit_jarzynski::experiment::{je_rows, RunConfig, PRESETS};
use qutrit_jarzynski::Result;

fn main() -> Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "paper-fig4".into());
    if !PRESETS.contains(&name.as_str()) {
        eprintln!("presets: {}", PRESETS.join(", "));
    }
    let mut cfg = RunConfig::preset(&name)?;
    cfg.n_steps = 8_000;
    for r in je_rows(&cfg)? {
        println!(
            "b|l| = {:.2}, tau = {:>6} us: lhs {:.6}, rhs {:.6}, F_A {:.4}",
            r.beta_abs_lambda, r.tau_us, r.lhs, r.rhs, r.adiabaticity
        );
    }
    Ok(())
}
