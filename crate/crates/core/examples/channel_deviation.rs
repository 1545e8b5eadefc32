//! Jarzynski deviation when both energy measurements suffer readout jumps.

use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::readout::{deviation_from_tpm, JumpModel, MeasurementChannel};
use qutrit_jarzynski::thermo::{beta_from_dimensionless, IdealTpm};
use qutrit_jarzynski::{Level, Result, Schedule};

fn main() -> Result<()> {
    let beta = beta_from_dimensionless(0.7, LAMBDA);
    let models = [
        ("ideal", JumpModel::ideal()),
        ("F = 0.98", JumpModel::f98()),
        ("F = 0.90", JumpModel::f90()),
    ];
    for (name, jm) in models {
        let ch = MeasurementChannel::new(jm);
        println!(
            "{name}: P(+1 recorded | +1 prepared, stays +1) = {:.4}, excluded mass {:.4}",
            ch.get(Level::Plus, Level::Plus, Level::Plus),
            ch.expected_excluded_plus()
        );
        for tau in [5.0, 50.0, 125.0, 200.0, 2500.0] {
            let tpm = IdealTpm::run(&Schedule::standard_us(tau)?, beta, 20_000)?;
            let d = deviation_from_tpm(&tpm, &ch, true)?;
            println!("  tau = {tau:>6} us: delta = {:+.5}, retained {:.4}", d.delta, d.retained_mass);
        }
    }
    Ok(())
}
