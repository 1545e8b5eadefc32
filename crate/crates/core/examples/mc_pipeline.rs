//! Error propagation from a measured joint distribution: each run resamples
//! the nine probabilities, fits a temperature and evaluates both sides.

use qutrit_jarzynski::analysis::{mc_pipeline, JointMeasurement, NegativePolicy};
use qutrit_jarzynski::protocol::LAMBDA;
use qutrit_jarzynski::thermo::{beta_from_dimensionless, IdealTpm};
use qutrit_jarzynski::{Result, Schedule};

fn main() -> Result<()> {
    let s = Schedule::standard_us(125.0)?;
    let tpm = IdealTpm::run(&s, beta_from_dimensionless(0.5, LAMBDA), 20_000)?;
    let measured = JointMeasurement::from_ideal(&tpm, 2_000);
    let (sum, runs) = mc_pipeline(&measured, &s.h_initial(), &s.h_final(), 10_000, 7, NegativePolicy::Clamp)?;
    println!("{}", serde_json::to_string_pretty(&sum).expect("summary serialises"));
    let ratios: Vec<f64> = runs.iter().map(|r| r.lhs / r.rhs).collect();
    let within = ratios.iter().filter(|x| (*x - 1.0).abs() < 0.05).count();
    println!("{within} of {} runs within 5 % of the equality", runs.len());
    Ok(())
}
