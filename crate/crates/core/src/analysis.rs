//! Monte Carlo propagation of measured joint probabilities into the two sides
//! of the Jarzynski equality.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{Ramp, Schedule, LAMBDA};
use crate::qutrit::{boltzmann_weights, LabelledBasis, Operator};
use crate::stream_rng;
use crate::thermo::{partition_ratio, IdealTpm};

/// Search window for `beta * scale`, `scale` being the largest `|eigenvalue|`
/// of `H(0)`.
pub const BETA_SEARCH_MAX: f64 = 5.0;
pub const BETA_GRID_POINTS: usize = 501;
/// Golden-section stop, in `beta * scale`.
pub const BETA_TOL: f64 = 1e-10;

/// Joint counts `counts[m][n]`, final label `m`, initial label `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointCounts {
    pub counts: [[u64; 3]; 3],
}

impl JointCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn probabilities(&self) -> Result<[[f64; 3]; 3]> {
        let n = self.total();
        if n == 0 {
            return Err(Error::InvalidArgument("joint counts are all zero".into()));
        }
        Ok(self.counts.map(|row| row.map(|c| c as f64 / n as f64)))
    }
}

/// `sigma = sqrt(P (1 - P) / N)` with `N` the global total.
pub fn binomial_sigma(counts: &JointCounts) -> Result<[[f64; 3]; 3]> {
    let p = counts.probabilities()?;
    let n = counts.total() as f64;
    Ok(p.map(|row| row.map(|x| (x * (1.0 - x) / n).sqrt())))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaFit {
    /// seconds
    pub beta: f64,
    /// `beta * scale`
    pub beta_scaled: f64,
    pub fidelity: f64,
    /// Populations favour higher energies, so no `beta >= 0` fits; `beta` is 0.
    pub anti_thermal: bool,
}

fn bhattacharyya(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    s * s
}

/// Inverse temperature of the diagonal Gibbs state of `h0` closest in fidelity
/// to `populations` (indexed by label). For commuting states the Uhlmann
/// fidelity is the squared Bhattacharyya coefficient used here.
pub fn fit_beta(populations: &[f64; 3], h0: &Operator) -> Result<BetaFit> {
    let energies = LabelledBasis::new(h0)?.energies;
    fit_beta_energies(populations, &energies)
}

pub fn fit_beta_energies(populations: &[f64; 3], energies: &[f64; 3]) -> Result<BetaFit> {
    if populations.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidDistribution(format!("non-finite populations {populations:?}")));
    }
    let clamped = populations.map(|p| p.max(0.0));
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("populations vanish after clamping".into()));
    }
    let p = clamped.map(|x| x / total);
    let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if scale == 0.0 {
        return Ok(BetaFit { beta: 0.0, beta_scaled: 0.0, fidelity: 1.0, anti_thermal: false });
    }
    let f = |x: f64| bhattacharyya(&p, &boltzmann_weights(energies, x / scale));

    let step = BETA_SEARCH_MAX / (BETA_GRID_POINTS - 1) as f64;
    let (mut k_best, mut f_best) = (0, f(0.0));
    for k in 1..BETA_GRID_POINTS {
        let v = f(k as f64 * step);
        if v > f_best {
            k_best = k;
            f_best = v;
        }
    }

    if k_best == 0 {
        let mean = energies.iter().sum::<f64>() / 3.0;
        let slope: f64 = p.iter().zip(energies).map(|(pi, e)| pi.sqrt() * (e - mean)).sum();
        // the fidelity does not rise away from beta = 0
        if slope >= 0.0 {
            return Ok(BetaFit { beta: 0.0, beta_scaled: 0.0, fidelity: f_best, anti_thermal: slope > 0.0 });
        }
    }

    let mut lo = (k_best as f64 - 1.0).max(0.0) * step;
    let mut hi = ((k_best + 1) as f64 * step).min(BETA_SEARCH_MAX);
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > BETA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    // the bracket may sit on the edge of the search window
    for edge in [0.0, BETA_SEARCH_MAX] {
        let fe = f(edge);
        if fe > fx {
            x = edge;
            fx = fe;
        }
    }
    Ok(BetaFit { beta: x / scale, beta_scaled: x, fidelity: fx, anti_thermal: false })
}

/// Measured joint probabilities `[m][n]` with their standard deviations.
///
/// On input either `sigmas` is given, or `counts` from which missing
/// probabilities and binomial sigmas are derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McInput {
    #[serde(default)]
    pub probabilities: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub sigmas: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    pub counts: Option<[[u64; 3]; 3]>,
    /// rad/s; the switching-protocol coupling, the standard value if absent.
    #[serde(default)]
    pub lambda: Option<f64>,
}

/// Fully resolved pipeline input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointMeasurement {
    pub probabilities: [[f64; 3]; 3],
    pub sigmas: [[f64; 3]; 3],
}

impl McInput {
    pub fn resolve(&self) -> Result<JointMeasurement> {
        let (probabilities, sigmas) = match (self.probabilities, self.sigmas, self.counts) {
            (Some(p), Some(s), _) => (p, s),
            (p, None, Some(c)) => {
                let jc = JointCounts { counts: c };
                (p.map_or_else(|| jc.probabilities(), Ok)?, binomial_sigma(&jc)?)
            }
            (None, Some(_), None) => {
                return Err(Error::Config("`sigmas` given without `probabilities`".into()))
            }
            (_, None, None) => {
                return Err(Error::Config("need `sigmas` or `counts` alongside the probabilities".into()))
            }
            (None, Some(_), Some(_)) => {
                return Err(Error::Config("`sigmas` given without `probabilities`".into()))
            }
        };
        for (name, m) in [("probabilities", &probabilities), ("sigmas", &sigmas)] {
            if m.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Config(format!("`{name}` entries must be finite and non-negative")));
            }
        }
        Ok(JointMeasurement { probabilities, sigmas })
    }

    /// Endpoint Hamiltonians `lambda I_z` and `0.75 lambda I_z`.
    pub fn hamiltonians(&self) -> Result<(Operator, Operator)> {
        let s = Schedule::new(self.lambda.unwrap_or(LAMBDA), 1.0, Ramp::QuarterDecay, Ramp::Triangle)?;
        Ok((s.h_initial(), s.h_final()))
    }
}

impl JointMeasurement {
    /// Ideal joint probabilities with the binomial errors of `shots` trials.
    pub fn from_ideal(tpm: &IdealTpm, shots: u64) -> Self {
        let probabilities = tpm.joint();
        let n = shots as f64;
        let sigmas = probabilities.map(|row| row.map(|p| (p * (1.0 - p) / n).sqrt()));
        JointMeasurement { probabilities, sigmas }
    }

    pub fn populations(&self) -> [f64; 3] {
        let mut p = [0.0; 3];
        for row in &self.probabilities {
            for (n, x) in row.iter().enumerate() {
                p[n] += x;
            }
        }
        p
    }
}

/// Entrywise mean of several joint measurements; sigmas combine as the
/// standard error of that mean.
pub fn average_joints(joints: &[JointMeasurement]) -> Result<JointMeasurement> {
    if joints.is_empty() {
        return Err(Error::InvalidArgument("nothing to average".into()));
    }
    let k = joints.len() as f64;
    let mut p = [[0.0; 3]; 3];
    let mut v = [[0.0; 3]; 3];
    for j in joints {
        for m in 0..3 {
            for n in 0..3 {
                p[m][n] += j.probabilities[m][n] / k;
                v[m][n] += j.sigmas[m][n].powi(2);
            }
        }
    }
    Ok(JointMeasurement { probabilities: p, sigmas: v.map(|row| row.map(|x| x.sqrt() / k)) })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativePolicy {
    /// Negative draws become 0.
    #[default]
    Clamp,
    /// Redraw an entry until it is non-negative.
    Resample,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McRun {
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub anti_thermal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McSummary {
    /// seconds
    pub beta_exp_mean: f64,
    pub beta_exp_std: f64,
    pub beta_abs_lambda_mean: f64,
    pub beta_abs_lambda_std: f64,
    pub lhs_mean: f64,
    pub lhs_std: f64,
    pub rhs_mean: f64,
    pub rhs_std: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub anti_thermal_runs: usize,
}

const MAX_REDRAWS: usize = 10_000;

fn draw<R: Rng>(mean: f64, sigma: f64, policy: NegativePolicy, rng: &mut R) -> f64 {
    if sigma == 0.0 {
        return mean.max(0.0);
    }
    let z: f64 = StandardNormal.sample(rng);
    let x = mean + sigma * z;
    match policy {
        NegativePolicy::Clamp => x.max(0.0),
        NegativePolicy::Resample => {
            let mut x = x;
            for _ in 0..MAX_REDRAWS {
                if x >= 0.0 {
                    return x;
                }
                let z: f64 = StandardNormal.sample(rng);
                x = mean + sigma * z;
            }
            x.max(0.0)
        }
    }
}

/// Mean and sample standard deviation, computed on offsets from the first
/// value so identical samples give exactly zero spread.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let x0 = xs[0];
    let md = xs.iter().map(|x| x - x0).sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x - x0 - md).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    (x0 + md, var.sqrt())
}

pub const MIN_RUNS: usize = 100;

/// Resamples `measured` `k` times. Run `i` draws from stream `i` of `seed`,
/// so the summary is independent of the thread pool.
pub fn mc_pipeline(
    measured: &JointMeasurement,
    h0: &Operator,
    htau: &Operator,
    k: usize,
    seed: u64,
    policy: NegativePolicy,
) -> Result<(McSummary, Vec<McRun>)> {
    if k < MIN_RUNS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_RUNS} runs, got {k}")));
    }
    let e0 = LabelledBasis::new(h0)?.energies;
    let et = LabelledBasis::new(htau)?.energies;
    let scale = e0.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let mut w = [[0.0; 3]; 3];
    for (m, row) in w.iter_mut().enumerate() {
        for (n, x) in row.iter_mut().enumerate() {
            *x = et[m] - e0[n];
        }
    }

    let runs: Vec<McRun> = (0..k)
        .into_par_iter()
        .map(|i| -> Result<McRun> {
            let mut rng = stream_rng(seed, i as u64);
            let mut p = [[0.0; 3]; 3];
            for m in 0..3 {
                for n in 0..3 {
                    p[m][n] = draw(measured.probabilities[m][n], measured.sigmas[m][n], policy, &mut rng);
                }
            }
            let mut pops = [0.0; 3];
            for row in &p {
                for (n, x) in row.iter().enumerate() {
                    pops[n] += x;
                }
            }
            let fit = fit_beta_energies(&pops, &e0)?;
            let mut lhs = 0.0;
            for m in 0..3 {
                for n in 0..3 {
                    lhs += p[m][n] * (-fit.beta * w[m][n]).exp();
                }
            }
            Ok(McRun { beta: fit.beta, lhs, rhs: partition_ratio(&e0, &et, fit.beta), anti_thermal: fit.anti_thermal })
        })
        .collect::<Result<_>>()?;

    let col = |f: fn(&McRun) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    let (bm, bs) = mean_std(&col(|r| r.beta));
    let (lm, ls) = mean_std(&col(|r| r.lhs));
    let (rm, rs) = mean_std(&col(|r| r.rhs));
    let summary = McSummary {
        beta_exp_mean: bm,
        beta_exp_std: bs,
        beta_abs_lambda_mean: bm * scale,
        beta_abs_lambda_std: bs * scale,
        lhs_mean: lm,
        lhs_std: ls,
        rhs_mean: rm,
        rhs_std: rs,
        k,
        seed,
        anti_thermal_runs: runs.iter().filter(|r| r.anti_thermal).count(),
    };
    Ok((summary, runs))
}
