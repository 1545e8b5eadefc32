//! The switching protocol `H(t) = lambda [a(t) I_z + b(t) I_x]` on `[0, tau]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::{eigh, spin1_operator, Axis, Operator};

/// Default coupling, `-sqrt(2) * pi * 5 kHz` in rad/s.
pub const LAMBDA: f64 = -std::f64::consts::SQRT_2 * std::f64::consts::PI * 5000.0;

/// Default grid size for the adiabaticity minimisation.
pub const DEFAULT_ADIABATICITY_GRID: usize = 10_001;

/// Relative slack when checking that `t` lies in `[0, tau]`.
const TIME_SLACK: f64 = 1e-12;

/// Dimensionless ramp profile on `[0, tau]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    /// `1 - t / (4 tau)`, falling from 1 to 3/4.
    QuarterDecay,
    /// `1 - |2 t / tau - 1|`, zero at both ends with a kink at `tau/2`.
    Triangle,
    Constant(f64),
}

impl Ramp {
    pub fn value(&self, t: f64, tau: f64) -> f64 {
        match *self {
            Ramp::QuarterDecay => 1.0 - t / (4.0 * tau),
            Ramp::Triangle => 1.0 - (2.0 * t / tau - 1.0).abs(),
            Ramp::Constant(v) => v,
        }
    }

    /// `None` exactly at a kink.
    pub fn derivative(&self, t: f64, tau: f64) -> Option<f64> {
        match *self {
            Ramp::QuarterDecay => Some(-1.0 / (4.0 * tau)),
            Ramp::Triangle => {
                let half = 0.5 * tau;
                if t == half {
                    None
                } else if t < half {
                    Some(2.0 / tau)
                } else {
                    Some(-2.0 / tau)
                }
            }
            Ramp::Constant(_) => Some(0.0),
        }
    }

    /// `int_0^t ramp(s) ds`
    pub fn integral(&self, t: f64, tau: f64) -> f64 {
        match *self {
            Ramp::QuarterDecay => t - t * t / (8.0 * tau),
            Ramp::Triangle => {
                let half = 0.5 * tau;
                if t <= half {
                    t * t / tau
                } else {
                    0.25 * tau + 2.0 * (t - half) - (t * t - half * half) / tau
                }
            }
            Ramp::Constant(v) => v * t,
        }
    }

    pub fn kink(&self, tau: f64) -> Option<f64> {
        match self {
            Ramp::Triangle => Some(0.5 * tau),
            _ => None,
        }
    }
}

/// A switching schedule: coupling `lambda` (rad/s), duration `tau` (s) and two ramps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lambda: f64,
    pub tau: f64,
    pub a: Ramp,
    pub b: Ramp,
}

impl Schedule {
    pub fn new(lambda: f64, tau: f64, a: Ramp, b: Ramp) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "switching time must be positive, got {tau}"
            )));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument("lambda must be finite".into()));
        }
        Ok(Schedule { lambda, tau, a, b })
    }

    /// The reference protocol with duration `tau` seconds.
    pub fn standard(tau: f64) -> Result<Self> {
        Self::new(LAMBDA, tau, Ramp::QuarterDecay, Ramp::Triangle)
    }

    /// Convenience: the reference protocol with duration given in microseconds.
    pub fn standard_us(tau_us: f64) -> Result<Self> {
        Self::standard(tau_us * 1e-6)
    }

    pub fn with_ramps(mut self, a: Ramp, b: Ramp) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = TIME_SLACK * self.tau;
        if !(t >= -slack && t <= self.tau + slack) {
            return Err(Error::TimeOutOfRange { t, tau: self.tau });
        }
        Ok(t.clamp(0.0, self.tau))
    }

    /// `(a(t), b(t))`.
    pub fn ramp(&self, t: f64) -> Result<(f64, f64)> {
        let t = self.check_time(t)?;
        Ok((self.a.value(t, self.tau), self.b.value(t, self.tau)))
    }

    pub fn h_of_t(&self, t: f64) -> Result<Operator> {
        let (a, b) = self.ramp(t)?;
        Ok(self.combine(a, b))
    }

    /// Analytic `dH/dt`; rejected exactly at a ramp kink.
    pub fn dh_dt(&self, t: f64) -> Result<Operator> {
        let t = self.check_time(t)?;
        let da = self.a.derivative(t, self.tau).ok_or(Error::AtKink { t })?;
        let db = self.b.derivative(t, self.tau).ok_or(Error::AtKink { t })?;
        Ok(self.combine(da, db))
    }

    pub fn h_initial(&self) -> Operator {
        self.h_of_t(0.0).expect("t = 0 is always in range")
    }

    pub fn h_final(&self) -> Operator {
        self.h_of_t(self.tau).expect("t = tau is always in range")
    }

    /// Times where a ramp has a derivative discontinuity.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = [self.a.kink(self.tau), self.b.kink(self.tau)]
            .into_iter()
            .flatten()
            .collect();
        k.dedup();
        k
    }

    fn combine(&self, a: f64, b: f64) -> Operator {
        spin1_operator(Axis::Z).scale(self.lambda * a) + spin1_operator(Axis::X).scale(self.lambda * b)
    }
}

/// Adiabaticity factor: the minimum over sample times and eigenpairs `m != n` of
/// `(e_m - e_n)^2 / |<m|dH/dt|n>|`.
///
/// Samples sit on a uniform grid of `grid_points` over `[0, tau]`; a grid point
/// landing exactly on a kink is skipped so its neighbours act as one-sided
/// samples. Pairs with a vanishing matrix element do not constrain the minimum.
pub fn adiabaticity_factor(schedule: &Schedule, grid_points: usize) -> Result<f64> {
    if grid_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "adiabaticity grid needs at least 100 points, got {grid_points}"
        )));
    }
    let last = (grid_points - 1) as f64;
    (0..grid_points)
        .into_par_iter()
        .map(|k| local_factor(schedule, schedule.tau * (k as f64 / last)))
        .try_reduce(|| f64::INFINITY, |x, y| Ok(x.min(y)))
}

fn local_factor(schedule: &Schedule, t: f64) -> Result<f64> {
    let dh = match schedule.dh_dt(t) {
        Ok(d) => d,
        Err(Error::AtKink { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    let es = eigh(&schedule.h_of_t(t)?)?;
    let floor = 1e-12 * dh.max_norm();
    let mut best = f64::INFINITY;
    for m in 0..3 {
        for n in 0..3 {
            if m == n {
                continue;
            }
            let element = dh.matrix_element(&es.vectors[m], &es.vectors[n]).norm();
            if element > floor {
                let gap = es.values[m] - es.values[n];
                best = best.min(gap * gap / element);
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdiabaticityEstimate {
    pub factor: f64,
    pub grid_points: usize,
}

/// Starts at [`DEFAULT_ADIABATICITY_GRID`] points and refines the (nested)
/// grid until the minimum moves by less than 0.1 %.
pub fn adiabaticity_factor_converged(schedule: &Schedule) -> Result<AdiabaticityEstimate> {
    let mut n = DEFAULT_ADIABATICITY_GRID;
    let mut prev = adiabaticity_factor(schedule, n)?;
    for _ in 0..8 {
        let next_n = 2 * n - 1;
        let next = adiabaticity_factor(schedule, next_n)?;
        let settled = (next - prev).abs() < 1e-3 * next.abs();
        n = next_n;
        prev = next;
        if settled {
            break;
        }
    }
    Ok(AdiabaticityEstimate { factor: prev, grid_points: n })
}
