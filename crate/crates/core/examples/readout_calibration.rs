//! Repeated single-shot readout: simulate photon-count traces, then pick the
//! bundle size and threshold with the best fidelity.

use qutrit_jarzynski::readout::{aggregate, calibrate, histogram, simulate_traces, TraceModel};
use qutrit_jarzynski::{Level, Result};

fn main() -> Result<()> {
    let model = TraceModel::standard();
    let traces = simulate_traces(&model, 12, 20_000, Level::Plus, 2024)?;
    let cal = calibrate(&traces, 20)?;
    for p in &cal.points {
        println!(
            "b = {:>2}: threshold {:>5}, F = {:.4} (below {:.4}, above {:.4})",
            p.bundle_size, p.threshold, p.fidelity, p.fidelity_below, p.fidelity_above
        );
    }
    println!(
        "best b = {}, F = {:.4}, interior maximum: {}",
        cal.best.bundle_size,
        cal.best.fidelity,
        cal.has_interior_maximum()
    );

    let readouts: Vec<u64> = traces.iter().flat_map(|t| aggregate(&t.counts, cal.best.bundle_size)).collect();
    let h = histogram(&readouts);
    let peak = h.iter().max_by_key(|(_, n)| **n).map(|(c, _)| *c).unwrap_or(0);
    println!("{} readouts, most common count {peak}", readouts.len());
    Ok(())
}
