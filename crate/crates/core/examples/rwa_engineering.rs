//! Lab-frame propagation under the two-tone drive, mapped back through the
//! rotating frame and compared with the target protocol.

use qutrit_jarzynski::pulses::{rwa_fidelity, rwa_fidelity_default, LabFrameParams};
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    let s = Schedule::standard_us(200.0)?;
    for ratio in [100.0, 50.0, 25.0] {
        let params = LabFrameParams::with_carrier_ratio(s, ratio);
        let r = rwa_fidelity_default(&params)?;
        let fine = rwa_fidelity(&params, 2 * r.n_steps)?;
        println!(
            "carrier/|lambda| = {:>5.1}: fidelity {:.8} ({} steps), doubled steps {:.8}",
            r.carrier_over_lambda, r.fidelity, r.n_steps, fine.fidelity
        );
    }
    match rwa_fidelity_default(&LabFrameParams::with_carrier_ratio(s, 10.0)) {
        Err(e) => println!("ratio 10 rejected: {e}"),
        Ok(r) => println!("ratio 10 accepted: {}", r.fidelity),
    }
    Ok(())
}
