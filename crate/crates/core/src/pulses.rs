//! Lab-frame RF engineering of the switching Hamiltonian.
//!
//! The nuclear spin sits in `H_0 = P I_z^2 + omega_n I_z`. Two RF tones near
//! the `|+1> <-> |0>` and `|0> <-> |-1>` transitions, detuned by `-lambda a(t)`
//! and `+lambda a(t)` and with amplitude following `b(t)`, reproduce
//! `lambda [a I_z + b I_x]` in the interaction picture once the counter-rotating
//! terms are dropped.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{effective_steps, propagate, propagate_with, DEFAULT_STEPS};
use crate::protocol::Schedule;
use crate::qutrit::{expm_minus_i_h_dt, spin1_operator, Axis, Operator};

/// rad/s
pub const QUADRUPOLE: f64 = -2.0 * PI * 4.95e6;
/// rad/s, at 7400 G with a 0.3077 kHz/G gyromagnetic ratio.
pub const NUCLEAR_ZEEMAN: f64 = 2.0 * PI * 2.277e6;

/// Smallest carrier allowed, in units of `|lambda|`.
pub const RWA_MIN_RATIO: f64 = 20.0;
pub const MIN_SAMPLES_PER_PERIOD: f64 = 20.0;
pub const DEFAULT_SAMPLES_PER_PERIOD: f64 = 200.0;

const GUARD_GRID: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabFrameParams {
    /// rad/s, before scaling
    pub quadrupole: f64,
    /// rad/s, before scaling
    pub omega_n: f64,
    pub schedule: Schedule,
    /// Common factor applied to `P` and `omega_n`.
    pub carrier_scale: f64,
}

impl LabFrameParams {
    pub fn standard(schedule: Schedule) -> Self {
        LabFrameParams {
            quadrupole: QUADRUPOLE,
            omega_n: NUCLEAR_ZEEMAN,
            schedule,
            carrier_scale: 1.0,
        }
    }

    /// Scales the carriers so that the slower tone sits at `ratio |lambda|`
    /// when `a = 1`.
    pub fn with_carrier_ratio(schedule: Schedule, ratio: f64) -> Self {
        let base = Self::standard(schedule);
        let scale = (ratio + 1.0) * schedule.lambda.abs() / (base.quadrupole + base.omega_n).abs();
        LabFrameParams { carrier_scale: scale, ..base }
    }

    pub fn p(&self) -> f64 {
        self.quadrupole * self.carrier_scale
    }

    pub fn wn(&self) -> f64 {
        self.omega_n * self.carrier_scale
    }

    pub fn h0(&self) -> Operator {
        let iz = spin1_operator(Axis::Z);
        iz * iz * self.p() + iz * self.wn()
    }

    /// `(omega_1, omega_2) = (P + omega_n - lambda a, P - omega_n + lambda a)`.
    pub fn carriers(&self, t: f64) -> Result<(f64, f64)> {
        let (a, _) = self.schedule.ramp(t)?;
        let l = self.schedule.lambda;
        Ok((self.p() + self.wn() - l * a, self.p() - self.wn() + l * a))
    }

    fn carrier_extremes(&self) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for k in 0..GUARD_GRID {
            let t = self.schedule.tau * k as f64 / (GUARD_GRID - 1) as f64;
            let (w1, w2) = self.carriers(t)?;
            lo = lo.min(w1.abs()).min(w2.abs());
            hi = hi.max(w1.abs()).max(w2.abs());
        }
        Ok((lo, hi))
    }

    /// Slowest carrier over the schedule, in units of `|lambda|`.
    pub fn min_carrier_ratio(&self) -> Result<f64> {
        Ok(self.carrier_extremes()?.0 / self.schedule.lambda.abs())
    }

    pub fn check_guard(&self) -> Result<()> {
        let ratio = self.min_carrier_ratio()?;
        if ratio < RWA_MIN_RATIO {
            return Err(Error::RwaGuard { ratio, min: RWA_MIN_RATIO });
        }
        Ok(())
    }

    /// Step count giving `samples` steps per period of the fastest carrier.
    pub fn steps_for(&self, samples_per_period: f64) -> Result<usize> {
        let (_, hi) = self.carrier_extremes()?;
        let periods = self.schedule.tau * hi / (2.0 * PI);
        Ok(effective_steps(&self.schedule, (periods * samples_per_period).ceil() as usize))
    }

    fn phases(&self, t: f64) -> (f64, f64) {
        let l = self.schedule.lambda;
        let acc = l * self.schedule.a.integral(t, self.schedule.tau);
        ((self.p() + self.wn()) * t - acc, (self.p() - self.wn()) * t + acc)
    }
}

/// `H_0 + 2 lambda b(t) (cos phi_1 + cos phi_2) I_x`, where `phi_i` are the
/// accumulated carrier phases.
pub fn lab_hamiltonian(t: f64, params: &LabFrameParams) -> Result<Operator> {
    let (_, b) = params.schedule.ramp(t)?;
    let h0 = params.h0();
    if b == 0.0 {
        return Ok(h0);
    }
    let (phi1, phi2) = params.phases(t);
    let drive = 2.0 * params.schedule.lambda * b * (phi1.cos() + phi2.cos());
    Ok(h0 + spin1_operator(Axis::X) * drive)
}

/// `exp(i [H_0 t - lambda A(t) I_z])` with `A(t) = int_0^t a`.
pub fn rotating_transform(t: f64, params: &LabFrameParams) -> Result<Operator> {
    params.schedule.ramp(t)?;
    let acc = params.schedule.lambda * params.schedule.a.integral(t, params.schedule.tau);
    let g = params.h0() * t - spin1_operator(Axis::Z) * acc;
    expm_minus_i_h_dt(&g, -1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RwaResult {
    pub carrier_over_lambda: f64,
    pub fidelity: f64,
    pub n_steps: usize,
    pub unitarity_defect: f64,
}

/// `|Tr(U_target^dagger U_eng)| / 3` with `U_eng = U_rot(tau) U_lab(tau)`.
pub fn rwa_fidelity(params: &LabFrameParams, n_steps: usize) -> Result<RwaResult> {
    params.check_guard()?;
    let required = params.steps_for(MIN_SAMPLES_PER_PERIOD)?;
    if n_steps < required {
        return Err(Error::InsufficientSteps { required, given: n_steps });
    }
    let tau = params.schedule.tau;
    let u_lab = propagate_with(|t| lab_hamiltonian(t, params), 0.0, tau, n_steps)?;
    let u_eng = rotating_transform(tau, params)? * u_lab;
    let target = propagate(&params.schedule, DEFAULT_STEPS.max(n_steps))?.unitary;
    Ok(RwaResult {
        carrier_over_lambda: params.min_carrier_ratio()?,
        fidelity: (target.dagger() * u_eng).trace().norm() / 3.0,
        n_steps,
        unitarity_defect: u_eng.unitarity_defect(),
    })
}

/// [`rwa_fidelity`] at [`DEFAULT_SAMPLES_PER_PERIOD`].
pub fn rwa_fidelity_default(params: &LabFrameParams) -> Result<RwaResult> {
    params.check_guard()?;
    rwa_fidelity(params, params.steps_for(DEFAULT_SAMPLES_PER_PERIOD)?)
}
