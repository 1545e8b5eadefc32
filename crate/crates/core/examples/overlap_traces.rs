//! Overlap of the evolving state with the instantaneous eigenstates, for a
//! fast and a slow switch. Writes one CSV per run into the temp directory.

use std::fs::File;
use std::io::BufWriter;

use qutrit_jarzynski::evolution::overlap_trace;
use qutrit_jarzynski::{Level, Result, Schedule};

fn main() -> Result<()> {
    let dir = std::env::temp_dir();
    for tau in [5.0, 2500.0] {
        let s = Schedule::standard_us(tau)?;
        for level in Level::ALL {
            let tr = overlap_trace(&s, level, 20_000)?;
            let f = tr.final_overlaps();
            println!(
                "tau = {tau:>6} us, from {level:>2}: final [{:.4} {:.4} {:.4}], min on own label {:.4}",
                f[0],
                f[1],
                f[2],
                tr.min_overlap(level)
            );
            let path = dir.join(format!("overlap_{tau}us_{}.csv", level.index()));
            tr.write_csv(BufWriter::new(File::create(&path)?))?;
        }
    }
    println!("traces written to {}", dir.display());
    Ok(())
}
