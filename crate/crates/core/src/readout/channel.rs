//! Quantum-jump measurement channel and its effect on two-point statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::Schedule;
use crate::qutrit::Level;
use crate::thermo::{check_probabilities, ConditionalMatrix, IdealTpm};

/// Survival and branching probabilities of a single readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpModel {
    pub p_plus: f64,
    pub p_zero: f64,
    pub p_minus: f64,
    /// `|0> -> |+1>`
    pub p_zero_up: f64,
    /// `|0> -> |-1>`
    pub p_zero_down: f64,
}

impl JumpModel {
    pub fn new(p_plus: f64, p_zero: f64, p_minus: f64, p_zero_up: f64, p_zero_down: f64) -> Result<Self> {
        let jm = JumpModel { p_plus, p_zero, p_minus, p_zero_up, p_zero_down };
        for (name, v) in [
            ("p_plus", p_plus),
            ("p_zero", p_zero),
            ("p_minus", p_minus),
            ("p_zero_up", p_zero_up),
            ("p_zero_down", p_zero_down),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidDistribution(format!("{name} = {v} not in [0, 1]")));
            }
        }
        let s = p_zero + p_zero_up + p_zero_down;
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "p_zero + p_zero_up + p_zero_down = {s}, not 1"
            )));
        }
        Ok(jm)
    }

    /// `p = 2F - 1` for every level, the remainder of `|0>` split evenly.
    pub fn from_fidelity(f: f64) -> Result<Self> {
        if !(f > 0.5 && f <= 1.0) {
            return Err(Error::InvalidFidelity(f));
        }
        let p = 2.0 * f - 1.0;
        let q = (1.0 - p) / 2.0;
        Self::new(p, p, p, q, q)
    }

    pub fn ideal() -> Self {
        JumpModel { p_plus: 1.0, p_zero: 1.0, p_minus: 1.0, p_zero_up: 0.0, p_zero_down: 0.0 }
    }

    /// The set quoted for a 90 % readout: `p = 0.81`, `p_0^± = 0.095`.
    pub fn f90() -> Self {
        JumpModel { p_plus: 0.81, p_zero: 0.81, p_minus: 0.81, p_zero_up: 0.095, p_zero_down: 0.095 }
    }

    /// The set quoted for a 98 % readout: `p = 0.96`, `p_0^± = 0.02`.
    pub fn f98() -> Self {
        JumpModel { p_plus: 0.96, p_zero: 0.96, p_minus: 0.96, p_zero_up: 0.02, p_zero_down: 0.02 }
    }
}

/// `table[i][j][k]`: probability that pre-state `i` gives outcome `j` and
/// leaves the spin in `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementChannel {
    pub jump_model: JumpModel,
    pub table: [[[f64; 3]; 3]; 3],
    /// Per pre-state probability of events rejected by post-selection.
    pub excluded_mass: [f64; 3],
}

impl MeasurementChannel {
    pub fn new(jm: JumpModel) -> Self {
        let JumpModel {
            p_plus: pp,
            p_zero: p0,
            p_minus: pm,
            p_zero_up: pu,
            p_zero_down: pd,
        } = jm;
        let mut t = [[[0.0; 3]; 3]; 3];
        // pre |+1>
        t[0][0][0] = pp * pp + pu * (1.0 - pp) / 2.0;
        t[0][1][0] = pu * (1.0 - pp) / 2.0;
        t[0][0][1] = pp * (1.0 - pp) + p0 * (1.0 - pp) / 2.0;
        t[0][1][1] = p0 * (1.0 - pp) / 2.0;
        for j in 0..3 {
            t[0][j][2] = pd * (1.0 - pp) / 4.0;
        }
        // pre |0>
        t[1][0][0] = pp * pu / 2.0;
        t[1][1][0] = p0 * pu + pp * pu / 2.0;
        t[1][0][1] = pu * (1.0 - pp) / 2.0;
        t[1][1][1] = p0 * p0 + pu * (1.0 - pp) / 2.0 + pd * (1.0 - pm) / 2.0;
        t[1][2][1] = pd * (1.0 - pm) / 2.0;
        t[1][1][2] = p0 * pd / 2.0;
        t[1][2][2] = p0 * pd / 2.0 + pm * pd;
        // pre |-1>
        t[2][1][0] = pu * (1.0 - pm);
        t[2][1][1] = pm * (1.0 - pm) / 2.0 + p0 * (1.0 - pm);
        t[2][2][1] = pm * (1.0 - pm) / 2.0;
        t[2][1][2] = pd * (1.0 - pm) / 2.0;
        t[2][2][2] = pm * pm + pd * (1.0 - pm) / 2.0;

        let mut excluded = [0.0; 3];
        for (i, e) in excluded.iter_mut().enumerate() {
            let s: f64 = t[i].iter().flatten().sum();
            *e = 1.0 - s;
        }
        MeasurementChannel { jump_model: jm, table: t, excluded_mass: excluded }
    }

    pub fn get(&self, pre: Level, outcome: Level, post: Level) -> f64 {
        self.table[pre.index()][outcome.index()][post.index()]
    }

    /// Closed form of the pre-`|+1>` deficit, `p_0^- (1 - p_{+1}) / 4`.
    pub fn expected_excluded_plus(&self) -> f64 {
        self.jump_model.p_zero_down * (1.0 - self.jump_model.p_plus) / 4.0
    }
}

/// Revised joint distribution of the two measured labels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoisyJoint {
    /// `p[x][y]`: first outcome `x`, second outcome `y`.
    pub p: [[f64; 3]; 3],
    /// Mass kept before any renormalisation.
    pub retained_mass: f64,
    pub renormalized: bool,
}

impl NoisyJoint {
    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }
}

/// `P_{x->y} = sum_{i,j,k,l} p0_i P^i_{x,j} P(k|j) P^k_{y,l}`.
pub fn noisy_joint_distribution(
    p0: &[f64; 3],
    cond: &ConditionalMatrix,
    channel: &MeasurementChannel,
    renormalize: bool,
) -> Result<NoisyJoint> {
    check_probabilities(p0, "initial populations")?;
    let t = &channel.table;
    // post-state distribution of the second readout, marginalised over l
    let mut second = [[0.0; 3]; 3]; // [k][y]
    for (k, row) in second.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            *v = t[k][y].iter().sum();
        }
    }
    let mut p = [[0.0; 3]; 3];
    for i in 0..3 {
        for x in 0..3 {
            for j in 0..3 {
                let w = p0[i] * t[i][x][j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    let wk = w * cond.entries[k][j];
                    for y in 0..3 {
                        p[x][y] += wk * second[k][y];
                    }
                }
            }
        }
    }
    let retained: f64 = p.iter().flatten().sum();
    if renormalize {
        for v in p.iter_mut().flatten() {
            *v /= retained;
        }
    }
    Ok(NoisyJoint { p, retained_mass: retained, renormalized: renormalize })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`
    pub delta: f64,
    pub retained_mass: f64,
}

/// Jarzynski deviation when both energy measurements pass through `channel`
/// and work is assigned from the recorded labels.
pub fn deviation(
    schedule: &Schedule,
    beta: f64,
    channel: &MeasurementChannel,
    n_steps: usize,
    renormalize: bool,
) -> Result<Deviation> {
    let tpm = IdealTpm::run(schedule, beta, n_steps)?;
    deviation_from_tpm(&tpm, channel, renormalize)
}

pub fn deviation_from_tpm(tpm: &IdealTpm, channel: &MeasurementChannel, renormalize: bool) -> Result<Deviation> {
    let joint = noisy_joint_distribution(&tpm.populations, &tpm.conditional, channel, renormalize)?;
    let w = tpm.work_matrix();
    let mut lhs = 0.0;
    for x in 0..3 {
        for y in 0..3 {
            lhs += joint.p[x][y] * (-tpm.beta * w[x][y]).exp();
        }
    }
    let rhs = tpm.free_energy_ratio();
    Ok(Deviation { lhs, rhs, delta: lhs - rhs, retained_mass: joint.retained_mass })
}

/// Total-variation distance between a noisy joint and the ideal one.
pub fn total_variation_from_ideal(joint: &NoisyJoint, p0: &[f64; 3], cond: &ConditionalMatrix) -> f64 {
    let mut tv = 0.0;
    for x in 0..3 {
        for y in 0..3 {
            tv += (joint.p[x][y] - p0[x] * cond.entries[y][x]).abs();
        }
    }
    tv / 2.0
}
