//! Numerical laboratory for the Jarzynski equality on a spin-1 system.
//!
//! The crate covers the full chain of a two-point-measurement work experiment
//! on a three-level nuclear spin:
//!
//! * [`qutrit`]: dense 3x3 algebra, spin-1 operators, Gibbs states, dephasing.
//! * [`protocol`]: the switching Hamiltonian `H(t) = lambda [a(t) I_z + b(t) I_x]`
//!   and its adiabaticity factor.
//! * [`evolution`]: time-ordered propagators and instantaneous-eigenstate overlaps.
//! * [`thermo`]: thermal preparation, conditional probabilities, work
//!   distributions and the Jarzynski check.
//! * [`readout`]: photon-count traces, threshold calibration, and the
//!   quantum-jump measurement channel with its effect on the work statistics.
//! * [`pulses`]: lab-frame RF engineering of the switching Hamiltonian.
//! * [`analysis`]: Monte Carlo resampling of measured joint probabilities.
//! * [`experiment`]: presets, configuration and CSV/JSON emitters used by the
//!   `jelab` binary.
//!
//! Units: hbar = 1, Hamiltonians in rad/s, times and inverse temperatures in
//! seconds. User-facing temperatures are given as the dimensionless `beta |lambda|`.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod protocol;
pub mod pulses;
pub mod qutrit;
pub mod readout;
pub mod thermo;

pub use error::{Error, Result};
pub use protocol::Schedule;
pub use qutrit::{DensityMatrix, EigenSystem, Level, Operator, StateVector};

/// Independent random stream `stream` of `seed`, so per-run results do not
/// depend on how work is split across threads.
pub fn stream_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
