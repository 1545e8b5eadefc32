//! Experimental temperature from measured populations by maximum fidelity with
//! a Gibbs state.

use qutrit_jarzynski::analysis::fit_beta;
use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    let h0 = Schedule::standard_us(200.0)?.h_initial();
    let cases = [
        ("measured", [0.519, 0.276, 0.204]),
        ("uniform", [1.0 / 3.0; 3]),
        ("inverted", [0.204, 0.276, 0.519]),
    ];
    for (name, p) in cases {
        let fit = fit_beta(&p, &h0)?;
        println!(
            "{name:>9}: b|l| = {:.4}, fidelity {:.6}, anti-thermal {}",
            fit.beta * LAMBDA.abs(),
            fit.fidelity,
            fit.anti_thermal
        );
    }
    Ok(())
}
