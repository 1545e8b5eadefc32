//! Both sides of the Jarzynski equality under ideal projective measurements,
//! over the three temperatures and five switching times of the experiment.

use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::thermo::{beta_from_dimensionless, je_check};
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    println!("{:>8} {:>8} {:>14} {:>14} {:>10}", "b|l|", "tau/us", "<e^-bW>", "Z_t/Z_0", "diff");
    for bl in [0.0, 0.5, 0.7] {
        let beta = beta_from_dimensionless(bl, LAMBDA);
        for tau in [5.0, 50.0, 125.0, 200.0, 2500.0] {
            let c = je_check(&Schedule::standard_us(tau)?, beta, 20_000)?;
            println!("{bl:>8.2} {tau:>8} {:>14.10} {:>14.10} {:>10.1e}", c.lhs, c.rhs, c.difference);
        }
    }
    Ok(())
}
