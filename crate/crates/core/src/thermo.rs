//! Thermal preparation, two-point-measurement statistics and the Jarzynski check.
//!
//! Everything here is indexed by spin label `(+1, 0, -1)` through
//! [`LabelledBasis`], so for the diagonal endpoint Hamiltonians of the
//! switching protocol the labels coincide with the lab basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::propagate;
use crate::protocol::Schedule;
use crate::qutrit::{
    boltzmann_weights, dephase_pair, pair_rotation, DensityMatrix, LabelledBasis,
    Level, Operator, StateVector,
};

/// Converts the dimensionless `beta |lambda|` into an inverse temperature in seconds.
pub fn beta_from_dimensionless(beta_abs_lambda: f64, lambda: f64) -> f64 {
    beta_abs_lambda / lambda.abs()
}

/// `entries[m][n] = P(m at tau | n at 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionalMatrix {
    pub entries: [[f64; 3]; 3],
}

impl ConditionalMatrix {
    pub fn identity() -> Self {
        let mut e = [[0.0; 3]; 3];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        ConditionalMatrix { entries: e }
    }

    pub fn get(&self, m: Level, n: Level) -> f64 {
        self.entries[m.index()][n.index()]
    }

    /// Largest deviation of any row or column sum from one.
    pub fn stochasticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            let row: f64 = self.entries[i].iter().sum();
            let col: f64 = (0..3).map(|m| self.entries[m][i]).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        worst
    }
}

/// `|<m(tau)| U |n(0)>|^2` in the labelled eigenbases of `H(0)` and `H(tau)`.
pub fn tpm_conditional(u: &Operator, h0: &Operator, htau: &Operator) -> Result<ConditionalMatrix> {
    let b0 = LabelledBasis::new(h0)?;
    let bt = LabelledBasis::new(htau)?;
    Ok(conditional_in_bases(u, &b0, &bt))
}

fn conditional_in_bases(u: &Operator, b0: &LabelledBasis, bt: &LabelledBasis) -> ConditionalMatrix {
    let mut e = [[0.0; 3]; 3];
    for (m, row) in e.iter_mut().enumerate() {
        for (n, x) in row.iter_mut().enumerate() {
            *x = u.matrix_element(&bt.vectors[m], &b0.vectors[n]).norm_sqr();
        }
    }
    ConditionalMatrix { entries: e }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkAtom {
    /// rad/s
    pub w: f64,
    pub probability: f64,
    /// `(n, m)` trajectories contributing to this atom.
    pub labels: Vec<(Level, Level)>,
}

/// Discrete work distribution, atoms sorted by work value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkDistribution {
    pub atoms: Vec<WorkAtom>,
}

impl WorkDistribution {
    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|a| a.probability).sum()
    }

    pub fn mean_work(&self) -> f64 {
        self.atoms.iter().map(|a| a.probability * a.w).sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::experiment::fmt_num;
        writeln!(w, "w_rad_per_s,probability,n_label,m_label")?;
        for atom in &self.atoms {
            let ns: Vec<String> = atom.labels.iter().map(|(n, _)| n.to_string()).collect();
            let ms: Vec<String> = atom.labels.iter().map(|(_, m)| m.to_string()).collect();
            writeln!(
                w,
                "{},{},{},{}",
                fmt_num(atom.w),
                fmt_num(atom.probability),
                ns.join(";"),
                ms.join(";")
            )?;
        }
        Ok(())
    }
}

/// Relative tolerance under which two work values count as the same atom.
const MERGE_TOL: f64 = 1e-12;

pub(crate) fn check_probabilities(p: &[f64; 3], what: &str) -> Result<()> {
    if p.iter().any(|x| !(*x >= 0.0) || *x > 1.0 + 1e-12) {
        return Err(Error::InvalidDistribution(format!("{what} entries {p:?} not in [0, 1]")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Work distribution from initial energies/populations and conditional
/// probabilities, `P(W) = sum_{n,m} p0_n P(m|n) delta(W - (e_tau_m - e0_n))`.
pub fn work_distribution_from_energies(
    p0: &[f64; 3],
    cond: &ConditionalMatrix,
    e0: &[f64; 3],
    etau: &[f64; 3],
) -> Result<WorkDistribution> {
    check_probabilities(p0, "initial populations")?;
    let mut raw: Vec<WorkAtom> = Vec::with_capacity(9);
    for n in Level::ALL {
        for m in Level::ALL {
            raw.push(WorkAtom {
                w: etau[m.index()] - e0[n.index()],
                probability: p0[n.index()] * cond.get(m, n),
                labels: vec![(n, m)],
            });
        }
    }
    raw.sort_by(|a, b| a.w.total_cmp(&b.w));

    let scale = raw.iter().map(|a| a.w.abs()).fold(1.0, f64::max);
    let mut atoms: Vec<WorkAtom> = Vec::with_capacity(9);
    for atom in raw {
        match atoms.last_mut() {
            Some(last) if (atom.w - last.w).abs() <= MERGE_TOL * scale => {
                last.probability += atom.probability;
                last.labels.extend(atom.labels);
            }
            _ => atoms.push(atom),
        }
    }
    Ok(WorkDistribution { atoms })
}

pub fn work_distribution(
    p0: &[f64; 3],
    cond: &ConditionalMatrix,
    h0: &Operator,
    htau: &Operator,
) -> Result<WorkDistribution> {
    let b0 = LabelledBasis::new(h0)?;
    let bt = LabelledBasis::new(htau)?;
    work_distribution_from_energies(p0, cond, &b0.energies, &bt.energies)
}

/// `<exp(-beta W)>` over the distribution.
pub fn jarzynski_lhs(dist: &WorkDistribution, beta: f64) -> f64 {
    dist.atoms
        .iter()
        .map(|a| a.probability * (-beta * a.w).exp())
        .sum()
}

/// `Z(tau) / Z(0)` from two spectra, shifted for overflow safety.
pub fn partition_ratio(e0: &[f64; 3], etau: &[f64; 3], beta: f64) -> f64 {
    let shift = e0.iter().chain(etau.iter()).copied().fold(f64::INFINITY, f64::min);
    let z = |e: &[f64; 3]| e.iter().map(|x| (-beta * (x - shift)).exp()).sum::<f64>();
    z(etau) / z(e0)
}

/// `exp(-beta dF) = Tr exp(-beta H(tau)) / Tr exp(-beta H(0))`.
pub fn free_energy_ratio(h0: &Operator, htau: &Operator, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {beta}")));
    }
    let e0 = LabelledBasis::new(h0)?.energies;
    let et = LabelledBasis::new(htau)?.energies;
    Ok(partition_ratio(&e0, &et, beta))
}

/// Rotation angles of the coherent Gibbs preparation, radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrepAngles {
    pub theta: f64,
    pub theta_prime: f64,
}

impl PrepAngles {
    /// `theta = 2 acos sqrt(e^{-lambda beta} / (1 + 2 cosh(beta lambda)))`,
    /// `theta' = 2 acos sqrt(1 / (1 + e^{-lambda beta}))`.
    pub fn for_coupling(lambda: f64, beta: f64) -> Self {
        let x = lambda * beta;
        let first = ((-x).exp() / (1.0 + 2.0 * x.cosh())).sqrt().min(1.0);
        let second = (1.0 / (1.0 + (-x).exp())).sqrt().min(1.0);
        PrepAngles {
            theta: 2.0 * first.acos(),
            theta_prime: 2.0 * second.acos(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentGibbsPrep {
    pub angles: PrepAngles,
    /// Pure state with amplitudes `sqrt(p_n)` on the eigenstates of `H(0)`.
    pub state: StateVector,
    /// The state after dephasing `|+1>` and then `|-1>` from the rest.
    pub dephased: DensityMatrix,
}

/// Coherent Gibbs preparation of `H(0) = lambda I_z` starting from `|+1>`.
///
/// The first rotation splits `|+1>` into `|+1>, |0>` by `theta`. The second
/// acts on `(|0>, |-1>)` with angle `pi - theta'`: under the sigma_y rotation
/// convention of [`pair_rotation`] this leaves the `cos^2(theta'/2)` share on
/// `|-1>`, which is what makes the dephased state thermal.
pub fn coherent_gibbs_prep(beta: f64, schedule: &Schedule) -> Result<CoherentGibbsPrep> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {beta}")));
    }
    let angles = PrepAngles::for_coupling(schedule.lambda, beta);
    let r1 = pair_rotation(angles.theta, Level::Plus, Level::Zero);
    let r2 = pair_rotation(std::f64::consts::PI - angles.theta_prime, Level::Zero, Level::Minus);
    let state = (r2 * r1).apply(&StateVector::basis(Level::Plus));
    let rho = DensityMatrix::pure(&state);
    let dephased = dephase_pair(&dephase_pair(&rho, Level::Plus), Level::Minus);
    Ok(CoherentGibbsPrep { angles, state, dephased })
}

/// Thermal populations of `h` indexed by label.
pub fn thermal_populations(h: &Operator, beta: f64) -> Result<[f64; 3]> {
    let b = LabelledBasis::new(h)?;
    Ok(boltzmann_weights(&b.energies, beta))
}

/// All ideal two-point-measurement quantities for one schedule and temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealTpm {
    pub beta: f64,
    pub unitary: Operator,
    pub initial: LabelledBasis,
    pub final_basis: LabelledBasis,
    pub populations: [f64; 3],
    pub conditional: ConditionalMatrix,
    pub distribution: WorkDistribution,
}

impl IdealTpm {
    pub fn run(schedule: &Schedule, beta: f64, n_steps: usize) -> Result<Self> {
        let u = propagate(schedule, n_steps)?.unitary;
        Self::from_unitary(schedule, beta, u)
    }

    pub fn from_unitary(schedule: &Schedule, beta: f64, unitary: Operator) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be non-negative, got {beta}")));
        }
        let initial = LabelledBasis::new(&schedule.h_initial())?;
        let final_basis = LabelledBasis::new(&schedule.h_final())?;
        let populations = boltzmann_weights(&initial.energies, beta);
        let conditional = conditional_in_bases(&unitary, &initial, &final_basis);
        let distribution = work_distribution_from_energies(
            &populations,
            &conditional,
            &initial.energies,
            &final_basis.energies,
        )?;
        Ok(IdealTpm {
            beta,
            unitary,
            initial,
            final_basis,
            populations,
            conditional,
            distribution,
        })
    }

    /// `W[n][m] = e_tau_m - e0_n`.
    pub fn work_matrix(&self) -> [[f64; 3]; 3] {
        let mut w = [[0.0; 3]; 3];
        for (n, row) in w.iter_mut().enumerate() {
            for (m, x) in row.iter_mut().enumerate() {
                *x = self.final_basis.energies[m] - self.initial.energies[n];
            }
        }
        w
    }

    /// Joint probabilities `P[m][n] = p0_n P(m|n)`.
    pub fn joint(&self) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        for (m, row) in j.iter_mut().enumerate() {
            for (n, x) in row.iter_mut().enumerate() {
                *x = self.populations[n] * self.conditional.entries[m][n];
            }
        }
        j
    }

    pub fn free_energy_ratio(&self) -> f64 {
        partition_ratio(&self.initial.energies, &self.final_basis.energies, self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
}

/// Both sides of the Jarzynski equality under ideal projective measurements.
pub fn je_check(schedule: &Schedule, beta: f64, n_steps: usize) -> Result<JeCheck> {
    let tpm = IdealTpm::run(schedule, beta, n_steps)?;
    let lhs = jarzynski_lhs(&tpm.distribution, beta);
    let rhs = tpm.free_energy_ratio();
    Ok(JeCheck { lhs, rhs, difference: lhs - rhs })
}
