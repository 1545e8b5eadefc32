//! Time-ordered propagation with midpoint piecewise-constant exponentials.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::Schedule;
use crate::qutrit::{
    eigh, expm_minus_i_h_dt, EigenSystem, LabelledBasis, Level, Operator, StateVector,
};

pub const DEFAULT_STEPS: usize = 20_000;

/// Doubling stops once the propagator moves by less than this (max-norm).
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Upper bound for [`propagate_converged`].
pub const MAX_STEPS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationResult {
    pub unitary: Operator,
    pub step_count: usize,
    pub unitarity_defect: f64,
}

/// Ordered product `U = prod_k exp(-i H(t_k) dt)` with later times on the left.
///
/// Works backwards in time too (`t_end < t_start`), which yields the inverse of
/// the forward propagator over the same grid.
pub fn propagate_with<F>(hamiltonian: F, t_start: f64, t_end: f64, n_steps: usize) -> Result<Operator>
where
    F: Fn(f64) -> Result<Operator>,
{
    if n_steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let dt = (t_end - t_start) / n_steps as f64;
    let mut u = Operator::identity();
    for k in 0..n_steps {
        let t_mid = t_start + (k as f64 + 0.5) * dt;
        u = expm_minus_i_h_dt(&hamiltonian(t_mid)?, dt)? * u;
    }
    Ok(u)
}

/// Rounds up to an even step count when the schedule has a kink, so that
/// `tau/2` falls on a step boundary.
pub fn effective_steps(schedule: &Schedule, n_steps: usize) -> usize {
    let n = n_steps.max(1);
    if !schedule.kinks().is_empty() && n % 2 == 1 {
        n + 1
    } else {
        n
    }
}

pub fn propagate(schedule: &Schedule, n_steps: usize) -> Result<PropagationResult> {
    let n = effective_steps(schedule, n_steps);
    let unitary = propagate_with(|t| schedule.h_of_t(t), 0.0, schedule.tau, n)?;
    Ok(PropagationResult {
        unitary,
        step_count: n,
        unitarity_defect: unitarity_defect(&unitary),
    })
}

fn unitarity_defect(u: &Operator) -> f64 {
    u.unitarity_defect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergedPropagation {
    pub result: PropagationResult,
    /// Max-norm change of the last doubling.
    pub last_change: f64,
    pub converged: bool,
}

/// Doubles the step count from [`DEFAULT_STEPS`] until the propagator changes
/// by less than [`CONVERGENCE_TOL`], or [`MAX_STEPS`] is reached.
pub fn propagate_converged(schedule: &Schedule) -> Result<ConvergedPropagation> {
    let mut prev = propagate(schedule, DEFAULT_STEPS)?;
    loop {
        let next = propagate(schedule, prev.step_count * 2)?;
        let change = (next.unitary - prev.unitary).max_norm();
        let converged = change < CONVERGENCE_TOL;
        if converged || next.step_count >= MAX_STEPS {
            return Ok(ConvergedPropagation {
                result: next,
                last_change: change,
                converged,
            });
        }
        prev = next;
    }
}

/// Overlaps `|<m(t)|psi(t)>|^2` with the instantaneous eigenstates, indexed by
/// label `(+1, 0, -1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapTrace {
    pub times: Vec<f64>,
    pub overlaps: Vec<[f64; 3]>,
}

impl OverlapTrace {
    pub fn final_overlaps(&self) -> [f64; 3] {
        *self.overlaps.last().expect("trace holds at least the initial point")
    }

    /// Smallest overlap with a given label over the whole trace.
    pub fn min_overlap(&self, label: Level) -> f64 {
        self.overlaps
            .iter()
            .map(|o| o[label.index()])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "time_s,p_plus1,p_0,p_minus1")?;
        for (t, o) in self.times.iter().zip(&self.overlaps) {
            writeln!(
                w,
                "{},{},{},{}",
                crate::experiment::fmt_num(*t),
                crate::experiment::fmt_num(o[0]),
                crate::experiment::fmt_num(o[1]),
                crate::experiment::fmt_num(o[2])
            )?;
        }
        Ok(())
    }
}

/// Label carried by each energy rank, fixed by the eigenbasis of `H(0)`.
///
/// The gap never closes along a schedule of this family, so the ordering of
/// eigenvalues carries the label continuously.
fn rank_labels(h0: &EigenSystem) -> [Level; 3] {
    let basis = LabelledBasis::from_eigensystem(h0);
    let mut labels = [Level::Plus; 3];
    for level in Level::ALL {
        labels[basis.rank_of[level.index()]] = level;
    }
    labels
}

pub fn overlap_trace(schedule: &Schedule, initial: Level, n_steps: usize) -> Result<OverlapTrace> {
    let n = effective_steps(schedule, n_steps);
    let es0 = eigh(&schedule.h_initial())?;
    let labels = rank_labels(&es0);
    let mut psi = es0.vectors[labels.iter().position(|&l| l == initial).expect("label present")];

    let dt = schedule.tau / n as f64;
    let mut times = Vec::with_capacity(n + 1);
    let mut overlaps = Vec::with_capacity(n + 1);
    let record = |t: f64, psi: &StateVector| -> Result<[f64; 3]> {
        let es = eigh(&schedule.h_of_t(t)?)?;
        let mut o = [0.0; 3];
        for (rank, label) in labels.iter().enumerate() {
            o[label.index()] = es.vectors[rank].inner(psi).norm_sqr();
        }
        Ok(o)
    };

    times.push(0.0);
    overlaps.push(record(0.0, &psi)?);
    for k in 0..n {
        let t_mid = (k as f64 + 0.5) * dt;
        psi = expm_minus_i_h_dt(&schedule.h_of_t(t_mid)?, dt)?.apply(&psi);
        let t = if k + 1 == n { schedule.tau } else { (k + 1) as f64 * dt };
        times.push(t);
        overlaps.push(record(t, &psi)?);
    }
    Ok(OverlapTrace { times, overlaps })
}
