use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max |H - H^dagger| = {defect:.3e})")]
    NonHermitian { defect: f64 },

    #[error("time {t:.6e} s lies outside the schedule interval [0, {tau:.6e}] s")]
    TimeOutOfRange { t: f64, tau: f64 },

    #[error("ramp derivative is undefined at the kink t = {t:.6e} s")]
    AtKink { t: f64 },

    #[error("readout fidelity {0} outside (0.5, 1]")]
    InvalidFidelity(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate photon trace: {0}")]
    DegenerateTrace(String),

    #[error("{given} steps are too few to resolve the carrier; need at least {required}")]
    InsufficientSteps { required: usize, given: usize },

    #[error(
        "rotating-wave guard violated: minimum carrier is {ratio:.2} x |lambda|, \
         need at least {min:.0} x |lambda|"
    )]
    RwaGuard { ratio: f64, min: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
