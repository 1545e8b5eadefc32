//! Adiabaticity factor of the switching protocol against its duration.

use qutrit_jarzynski::protocol::adiabaticity_factor_converged;
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    for tau in [1.0, 5.0, 20.0, 50.0, 125.0, 200.0, 500.0, 2500.0] {
        let est = adiabaticity_factor_converged(&Schedule::standard_us(tau)?)?;
        let regime = if est.factor < 1.0 { "sudden" } else { "adiabatic" };
        println!("tau = {tau:>6} us  F_A = {:>9.5}  ({} points, {regime})", est.factor, est.grid_points);
    }
    Ok(())
}
