//! Coherent preparation of a thermal state from |+1>: two selective rotations
//! followed by dephasing, compared with the Gibbs populations.

use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::thermo::{beta_from_dimensionless, coherent_gibbs_prep, thermal_populations};
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    let s = Schedule::standard_us(200.0)?;
    for bl in [0.0, 0.5, 0.7, 1.0] {
        let beta = beta_from_dimensionless(bl, LAMBDA);
        let prep = coherent_gibbs_prep(beta, &s)?;
        let p = prep.dephased.populations();
        let g = thermal_populations(&s.h_initial(), beta)?;
        println!(
            "b|l| = {bl:.1}: theta = {:.5}, theta' = {:.5}, populations [{:.5} {:.5} {:.5}], gibbs [{:.5} {:.5} {:.5}]",
            prep.angles.theta, prep.angles.theta_prime, p[0], p[1], p[2], g[0], g[1], g[2]
        );
    }
    Ok(())
}
