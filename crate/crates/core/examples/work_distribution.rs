//! Work distributions for a sudden and an adiabatic switch at b|l| = 0.5.

use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::thermo::{beta_from_dimensionless, jarzynski_lhs, IdealTpm};
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    let beta = beta_from_dimensionless(0.5, LAMBDA);
    for tau in [5.0, 2500.0] {
        let tpm = IdealTpm::run(&Schedule::standard_us(tau)?, beta, 20_000)?;
        println!("tau = {tau} us, <W> = {:.2} rad/s", tpm.distribution.mean_work());
        for atom in &tpm.distribution.atoms {
            println!("  W = {:>12.2}  p = {:.6}", atom.w, atom.probability);
        }
        println!(
            "  <e^-bW> = {:.8}, Z_t/Z_0 = {:.8}",
            jarzynski_lhs(&tpm.distribution, beta),
            tpm.free_energy_ratio()
        );
        tpm.distribution.write_csv(std::io::stdout().lock())?;
    }
    Ok(())
}
