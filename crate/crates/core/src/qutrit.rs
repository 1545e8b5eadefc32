//! Dense three-level linear algebra.
//!
//! Rows and columns are always ordered `(|+1>, |0>, |-1>)`. Hamiltonians are
//! angular frequencies (rad/s, hbar = 1) and inverse temperatures are seconds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative Hermiticity tolerance accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Spin-1 magnetic sublevel, doubling as a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Plus,
    Zero,
    Minus,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Plus, Level::Zero, Level::Minus];

    pub fn index(self) -> usize {
        match self {
            Level::Plus => 0,
            Level::Zero => 1,
            Level::Minus => 2,
        }
    }

    pub fn from_index(i: usize) -> Level {
        match i {
            0 => Level::Plus,
            1 => Level::Zero,
            2 => Level::Minus,
            _ => panic!("basis index {i} out of range"),
        }
    }

    /// Magnetic quantum number m in {+1, 0, -1}.
    pub fn m(self) -> i32 {
        1 - self.index() as i32
    }

    pub fn from_m(m: i32) -> Option<Level> {
        match m {
            1 => Some(Level::Plus),
            0 => Some(Level::Zero),
            -1 => Some(Level::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Zero => f.write_str("0"),
            _ => write!(f, "{:+}", self.m()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A 3x3 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator(pub [[C64; 3]; 3]);

impl Operator {
    pub fn zeros() -> Self {
        Operator([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag_real([1.0, 1.0, 1.0])
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = f(i, j);
            }
        }
        out
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(d: [C64; 3]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { ZERO })
    }

    pub fn diag_real(d: [f64; 3]) -> Self {
        Self::diag([C64::new(d[0], 0.0), C64::new(d[1], 0.0), C64::new(d[2], 0.0)])
    }

    /// Matrix whose k-th column is `cols[k]`.
    pub fn from_columns(cols: &[StateVector; 3]) -> Self {
        Self::from_fn(|i, j| cols[j].0[i])
    }

    pub fn outer(ket: &StateVector, bra: &StateVector) -> Self {
        Self::from_fn(|i, j| ket.0[i] * bra.0[j].conj())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        StateVector(out)
    }

    /// `<bra| self |ket>`
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> C64 {
        bra.inner(&self.apply(ket))
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.dagger()).max_norm()
    }

    /// `max |U^dagger U - I|`
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self - Operator::identity()).max_norm()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_norm().max(1.0)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.0[i][j].norm() <= tol))
    }

    pub fn diagonal_real(&self) -> [f64; 3] {
        [self.0[0][0].re, self.0[1][1].re, self.0[2][2].re]
    }

    fn hermitian_part(&self) -> Operator {
        (*self + self.dagger()).scale(0.5)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator::from_fn(|i, j| {
            self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j] + self.0[i][2] * rhs.0[2][j]
        })
    }
}

impl Mul<f64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<C64> for Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        Operator::from_fn(|i, j| self.0[i][j] * rhs)
    }
}

/// Three complex amplitudes in the `(|+1>, |0>, |-1>)` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector(pub [C64; 3]);

impl StateVector {
    pub fn basis(level: Level) -> Self {
        let mut a = [ZERO; 3];
        a[level.index()] = ONE;
        StateVector(a)
    }

    pub fn from_real(a: [f64; 3]) -> Self {
        StateVector([C64::new(a[0], 0.0), C64::new(a[1], 0.0), C64::new(a[2], 0.0)])
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        StateVector([self.0[0] / n, self.0[1] / n, self.0[2] / n])
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    pub fn scale(&self, s: C64) -> Self {
        StateVector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// A unit-trace, positive semidefinite Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-12;
    pub const POSITIVITY_TOL: f64 = 1e-12;

    pub fn new(op: Operator) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NonHermitian { defect });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > Self::TRACE_TOL || tr.im.abs() > Self::TRACE_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min_eig = eigh(&op)?.values[0];
        if min_eig < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix(op))
    }

    pub fn pure(state: &StateVector) -> Self {
        let s = state.normalized();
        DensityMatrix(Operator::outer(&s, &s))
    }

    pub fn diagonal(populations: [f64; 3]) -> Result<Self> {
        Self::new(Operator::diag_real(populations))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn populations(&self) -> [f64; 3] {
        self.0.diagonal_real()
    }

    /// Populations in an arbitrary orthonormal basis.
    pub fn populations_in(&self, basis: &[StateVector; 3]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for (k, v) in basis.iter().enumerate() {
            p[k] = self.0.matrix_element(v, v).re;
        }
        p
    }

    /// `U rho U^dagger`
    pub fn evolve(&self, u: &Operator) -> DensityMatrix {
        DensityMatrix(*u * self.0 * u.dagger())
    }
}

/// Sorted spectral decomposition of a Hermitian operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    /// Ascending.
    pub values: [f64; 3],
    pub vectors: [StateVector; 3],
}

impl EigenSystem {
    pub fn reconstruct(&self) -> Operator {
        let v = Operator::from_columns(&self.vectors);
        v * Operator::diag_real(self.values) * v.dagger()
    }

    pub fn vector_matrix(&self) -> Operator {
        Operator::from_columns(&self.vectors)
    }
}

/// Eigenbasis re-indexed by spin label instead of energy rank.
///
/// Each eigenvector is assigned the basis level it overlaps most with; the
/// assignment is the permutation maximising the product of overlaps, so it is
/// well defined even when a vector has no single dominant component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelledBasis {
    /// `energies[level.index()]`
    pub energies: [f64; 3],
    pub vectors: [StateVector; 3],
    /// `rank_of[level.index()]` is the ascending-energy position of that label.
    pub rank_of: [usize; 3],
}

impl LabelledBasis {
    pub fn new(h: &Operator) -> Result<Self> {
        Ok(Self::from_eigensystem(&eigh(h)?))
    }

    pub fn from_eigensystem(es: &EigenSystem) -> Self {
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        // perm[level] = rank
        let score = |perm: &[usize; 3]| -> f64 {
            (0..3).map(|l| es.vectors[perm[l]].0[l].norm_sqr()).product()
        };
        let mut best = PERMS[0];
        let mut best_score = score(&best);
        for perm in &PERMS[1..] {
            let sc = score(perm);
            if sc > best_score {
                best = *perm;
                best_score = sc;
            }
        }
        LabelledBasis {
            energies: best.map(|r| es.values[r]),
            vectors: best.map(|r| es.vectors[r]),
            rank_of: best,
        }
    }

    pub fn vector(&self, level: Level) -> &StateVector {
        &self.vectors[level.index()]
    }

    pub fn energy(&self, level: Level) -> f64 {
        self.energies[level.index()]
    }
}

/// Canonical spin-1 operators in the `(|+1>, |0>, |-1>)` basis.
pub fn spin1_operator(axis: Axis) -> Operator {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        Axis::Z => Operator::diag_real([1.0, 0.0, -1.0]),
        Axis::X => Operator::from_real([[0.0, r, 0.0], [r, 0.0, r], [0.0, r, 0.0]]),
        Axis::Y => {
            let m = C64::new(0.0, -r);
            let p = C64::new(0.0, r);
            Operator([[ZERO, m, ZERO], [p, ZERO, m], [ZERO, p, ZERO]])
        }
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is rephased so that its
/// largest-modulus component is real and positive; exactly degenerate
/// eigenvalues are ordered by the index of that component.
pub fn eigh(h: &Operator) -> Result<EigenSystem> {
    let scale = h.max_norm();
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NonHermitian { defect });
    }
    let mut a = h.hermitian_part();
    let mut v = Operator::identity();

    if scale > 0.0 {
        let target = (f64::EPSILON * scale).powi(2) * 1e-2;
        for _sweep in 0..64 {
            let off: f64 = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(p, q)| a.0[p][q].norm_sqr())
                .sum();
            if off <= target {
                break;
            }
            for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<(f64, StateVector)> = (0..3)
        .map(|k| {
            let col = StateVector([v.0[0][k], v.0[1][k], v.0[2][k]]);
            (a.0[k][k].re, fix_phase(&col))
        })
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Exact ties: order by the position of the dominant component.
    let tie = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (order[end].0 - order[start].0).abs() <= tie {
            end += 1;
        }
        order[start..end].sort_by_key(|(_, vec)| dominant_index(vec));
        start = end;
    }

    Ok(EigenSystem {
        values: [order[0].0, order[1].0, order[2].0],
        vectors: [order[0].1, order[1].1, order[2].1],
    })
}

fn jacobi_rotate(a: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = D R, with D removing the phase of a_pq and R the real rotation.
    let mut j = Operator::identity();
    j.0[p][p] = C64::new(c, 0.0);
    j.0[p][q] = C64::new(s, 0.0);
    j.0[q][p] = -phase.conj() * s;
    j.0[q][q] = phase.conj() * c;

    *a = j.dagger() * *a * j;
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    for k in 0..3 {
        a.0[k][k].im = 0.0;
    }
    *v = *v * j;
}

fn dominant_index(v: &StateVector) -> usize {
    let max = v.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.0.iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

fn fix_phase(v: &StateVector) -> StateVector {
    let v = v.normalized();
    let k = dominant_index(&v);
    let z = v.0[k];
    let mut out = v.scale(z.conj() / z.norm());
    out.0[k] = C64::new(out.0[k].norm(), 0.0);
    out
}

/// `exp(-i H dt)` through the eigendecomposition of `H`.
///
/// Negative `dt` yields the inverse step.
pub fn expm_minus_i_h_dt(h: &Operator, dt: f64) -> Result<Operator> {
    if dt == 0.0 {
        return Ok(Operator::identity());
    }
    let es = eigh(h)?;
    let v = es.vector_matrix();
    let phases = es.values.map(|e| C64::from_polar(1.0, -e * dt));
    Ok(v * Operator::diag(phases) * v.dagger())
}

/// Boltzmann weights of an energy list, normalised to sum to one.
pub fn boltzmann_weights(energies: &[f64; 3], beta: f64) -> [f64; 3] {
    let emin = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w = energies.map(|e| (-beta * (e - emin)).exp());
    let z: f64 = w.iter().sum();
    w.map(|x| x / z)
}

/// Partition function `Tr exp(-beta H)` from the spectrum.
pub fn partition_function(energies: &[f64; 3], beta: f64) -> f64 {
    energies.iter().map(|e| (-beta * e).exp()).sum()
}

/// `exp(-beta H) / Tr exp(-beta H)`
pub fn gibbs_state(h: &Operator, beta: f64) -> Result<DensityMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "inverse temperature must be finite and non-negative, got {beta}"
        )));
    }
    let es = eigh(h)?;
    let w = boltzmann_weights(&es.values, beta);
    let v = es.vector_matrix();
    let rho = v * Operator::diag_real(w) * v.dagger();
    Ok(DensityMatrix(rho.hermitian_part()))
}

/// Removes every coherence between `level` and the other two levels.
pub fn dephase_pair(rho: &DensityMatrix, level: Level) -> DensityMatrix {
    let l = level.index();
    let mut op = rho.0;
    for j in 0..3 {
        if j != l {
            op.0[l][j] = ZERO;
            op.0[j][l] = ZERO;
        }
    }
    DensityMatrix(op)
}

/// `exp(-i (theta/2) sigma_y)` acting on the `(first, second)` subspace.
///
/// Sends `|first>` to `cos(theta/2)|first> + sin(theta/2)|second>`.
pub fn pair_rotation(theta: f64, first: Level, second: Level) -> Operator {
    assert_ne!(first, second, "rotation needs two distinct levels");
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let (p, q) = (first.index(), second.index());
    let mut u = Operator::identity();
    u.0[p][p] = C64::new(c, 0.0);
    u.0[q][q] = C64::new(c, 0.0);
    u.0[q][p] = C64::new(s, 0.0);
    u.0[p][q] = C64::new(-s, 0.0);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(vals: &[f64]) -> Operator {
        // 3 real diagonal + 3 complex upper entries
        let mut h = Operator::zeros();
        h.0[0][0] = C64::new(vals[0], 0.0);
        h.0[1][1] = C64::new(vals[1], 0.0);
        h.0[2][2] = C64::new(vals[2], 0.0);
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let z = C64::new(vals[3 + 2 * k], vals[4 + 2 * k]);
            h.0[i][j] = z;
            h.0[j][i] = z.conj();
        }
        h
    }

    #[test]
    fn spin_z_is_diagonal() {
        assert_eq!(spin1_operator(Axis::Z), Operator::diag_real([1.0, 0.0, -1.0]));
    }

    #[test]
    fn su2_commutators() {
        let (x, y, z) = (
            spin1_operator(Axis::X),
            spin1_operator(Axis::Y),
            spin1_operator(Axis::Z),
        );
        let i = C64::new(0.0, 1.0);
        assert!((z.commutator(&x) - y * i).max_norm() < 1e-15);
        assert!((x.commutator(&y) - z * i).max_norm() < 1e-15);
        assert!((y.commutator(&z) - x * i).max_norm() < 1e-15);
        let casimir = x * x + y * y + z * z;
        assert!((casimir - Operator::identity().scale(2.0)).max_norm() < 1e-15);
    }

    #[test]
    fn eigh_of_diagonal_permutes_identity() {
        let es = eigh(&Operator::diag_real([3.0, 1.0, 2.0])).unwrap();
        assert_eq!(es.values, [1.0, 2.0, 3.0]);
        assert_eq!(es.vectors[0], StateVector::basis(Level::Zero));
        assert_eq!(es.vectors[1], StateVector::basis(Level::Minus));
        assert_eq!(es.vectors[2], StateVector::basis(Level::Plus));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut h = spin1_operator(Axis::X);
        h.0[0][1] = C64::new(2.0, 0.0);
        match eigh(&h) {
            Err(Error::NonHermitian { defect }) => assert!((defect - (2.0 - 0.5f64.sqrt())).abs() < 1e-12),
            other => panic!("expected NonHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eigh_degenerate_is_deterministic() {
        let es = eigh(&Operator::identity()).unwrap();
        assert_eq!(es.vectors[0], StateVector::basis(Level::Plus));
        assert_eq!(es.vectors[2], StateVector::basis(Level::Minus));
    }

    #[test]
    fn phase_convention_largest_component_real_positive() {
        let es = eigh(&spin1_operator(Axis::Y)).unwrap();
        for v in &es.vectors {
            let k = dominant_index(v);
            assert!(v.0[k].im == 0.0 && v.0[k].re > 0.0);
        }
    }

    #[test]
    fn expm_zero_step_and_diagonal_case() {
        let lam = -std::f64::consts::SQRT_2 * std::f64::consts::PI * 5000.0;
        let h = spin1_operator(Axis::Z).scale(lam);
        assert_eq!(expm_minus_i_h_dt(&h, 0.0).unwrap(), Operator::identity());
        let dt = 3.7e-5;
        let u = expm_minus_i_h_dt(&h, dt).unwrap();
        let expect = Operator::diag([
            C64::from_polar(1.0, -lam * dt),
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, lam * dt),
        ]);
        assert!((u - expect).max_norm() < 1e-13);
    }

    #[test]
    fn gibbs_infinite_temperature() {
        let h = spin1_operator(Axis::X).scale(4.0);
        let rho = gibbs_state(&h, 0.0).unwrap();
        assert!((rho.operator().clone() - Operator::identity().scale(1.0 / 3.0)).max_norm() < 1e-15);
    }

    #[test]
    fn gibbs_rejects_negative_beta() {
        assert!(gibbs_state(&Operator::identity(), -1.0).is_err());
    }

    #[test]
    fn dephasing_kills_coherence_keeps_populations() {
        let psi = StateVector([
            C64::new(0.0, 0.6),
            C64::new(0.48, 0.0),
            C64::from_polar(0.64, 0.3),
        ]);
        let rho = DensityMatrix::pure(&psi);
        let d = dephase_pair(&dephase_pair(&rho, Level::Plus), Level::Minus);
        assert!(d.operator().is_diagonal(0.0));
        assert_eq!(d.populations(), rho.populations());
        let diag = DensityMatrix::diagonal([0.2, 0.3, 0.5]).unwrap();
        assert_eq!(dephase_pair(&diag, Level::Plus), diag);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::diagonal([0.5, 0.6, -0.1]).is_err());
        assert!(DensityMatrix::diagonal([0.5, 0.6, 0.1]).is_err());
        assert!(DensityMatrix::diagonal([0.5, 0.4, 0.1]).is_ok());
    }

    #[test]
    fn pair_rotation_moves_amplitude() {
        let u = pair_rotation(1.0, Level::Plus, Level::Zero);
        let out = u.apply(&StateVector::basis(Level::Plus));
        assert!((out.0[0].re - 0.5f64.cos()).abs() < 1e-15);
        assert!((out.0[1].re - 0.5f64.sin()).abs() < 1e-15);
        assert!(u.unitarity_defect() < 1e-15);
    }

    fn herm_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, 9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigh_round_trip(vals in herm_strategy()) {
            let h = random_hermitian(&vals);
            let es = eigh(&h).unwrap();
            let norm = h.max_norm().max(1e-300);
            prop_assert!((es.reconstruct() - h).max_norm() <= 1e-10 * norm);
            prop_assert!(es.values[0] <= es.values[1] && es.values[1] <= es.values[2]);
            for k in 0..3 {
                let r = h.apply(&es.vectors[k]);
                let lhs = StateVector([
                    r.0[0] - es.vectors[k].0[0] * es.values[k],
                    r.0[1] - es.vectors[k].0[1] * es.values[k],
                    r.0[2] - es.vectors[k].0[2] * es.values[k],
                ]);
                prop_assert!(lhs.norm() <= 1e-10 * norm);
                for l in 0..3 {
                    let ip = es.vectors[k].inner(&es.vectors[l]).norm();
                    let expect = if k == l { 1.0 } else { 0.0 };
                    prop_assert!((ip - expect).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn expm_is_unitary_and_composes(vals in herm_strategy(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
            let h = random_hermitian(&vals);
            let u1 = expm_minus_i_h_dt(&h, t1).unwrap();
            let u2 = expm_minus_i_h_dt(&h, t2).unwrap();
            let u12 = expm_minus_i_h_dt(&h, t1 + t2).unwrap();
            prop_assert!(u1.unitarity_defect() < 1e-10);
            prop_assert!((u1 * u2 - u12).max_norm() < 1e-10);
        }

        #[test]
        fn gibbs_commutes_and_is_a_state(vals in herm_strategy(), beta in 0.0f64..3.0) {
            let h = random_hermitian(&vals);
            let rho = gibbs_state(&h, beta).unwrap();
            prop_assert!(rho.operator().commutator(&h).max_norm() < 1e-10 * h.max_norm().max(1.0));
            prop_assert!((rho.operator().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(eigh(rho.operator()).unwrap().values[0] > -1e-12);
        }

        #[test]
        fn dephasing_idempotent_trace_preserving(vals in herm_strategy(), beta in 0.0f64..1.0) {
            let rho = gibbs_state(&random_hermitian(&vals), beta).unwrap();
            for level in [Level::Plus, Level::Minus] {
                let once = dephase_pair(&rho, level);
                prop_assert_eq!(dephase_pair(&once, level), once);
                prop_assert!((once.operator().trace() - rho.operator().trace()).norm() < 1e-15);
            }
        }
    }
}
