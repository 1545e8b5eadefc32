//! Photon-count traces of repeated single-shot readout and threshold calibration.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qutrit::Level;
use crate::stream_rng;

/// Photon statistics and nuclear-spin jump dynamics of a repeated readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceModel {
    /// counts/s
    pub rate_bright: f64,
    /// counts/s
    pub rate_dark: f64,
    /// Photon collection window per repeat, seconds.
    pub unit_duration: f64,
    pub repeats_per_bundle: usize,
    /// Probability that a level survives one readout repeat.
    pub survival_per_unit: [f64; 3],
    /// `jump_targets[from][to]`, used once a jump has happened.
    pub jump_targets: [[f64; 3]; 3],
}

/// Destinations after a jump: `|±1> -> |0>`, `|0> -> |±1>` evenly.
pub const NEAREST_NEIGHBOUR_JUMPS: [[f64; 3]; 3] =
    [[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]];

impl TraceModel {
    /// 700 kcps bright, 30 % contrast, 100 repeats per bundle with a 1 us
    /// window, and laser-induced flips with `T1 = 3.8, 3.5, 4.2 ms` for
    /// `+1, 0, -1` under a 0.2 ms / 900 laser exposure per repeat.
    pub fn standard() -> Self {
        let t_laser = 0.2e-3 / 900.0;
        let t1: [f64; 3] = [3.8e-3, 3.5e-3, 4.2e-3];
        TraceModel {
            rate_bright: 700e3,
            rate_dark: 700e3 / 1.3,
            unit_duration: 1e-6,
            repeats_per_bundle: 100,
            survival_per_unit: t1.map(|t| (-t_laser / t).exp()),
            jump_targets: NEAREST_NEIGHBOUR_JUMPS,
        }
    }

    /// The standard model without any spin flips.
    pub fn no_jumps() -> Self {
        TraceModel { survival_per_unit: [1.0; 3], ..Self::standard() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_dark > 0.0 && self.rate_bright > self.rate_dark) {
            return Err(Error::InvalidArgument(format!(
                "need rate_bright > rate_dark > 0, got {} and {}",
                self.rate_bright, self.rate_dark
            )));
        }
        self.validate_common()
    }

    /// Like [`validate`](Self::validate) but accepts equal rates, which is
    /// useful for null tests of the estimator.
    pub fn validate_common(&self) -> Result<()> {
        if !(self.rate_dark > 0.0 && self.rate_bright > 0.0) {
            return Err(Error::InvalidArgument("photon rates must be positive".into()));
        }
        if !(self.unit_duration > 0.0) || self.repeats_per_bundle == 0 {
            return Err(Error::InvalidArgument("empty readout bundle".into()));
        }
        for (i, q) in self.survival_per_unit.iter().enumerate() {
            if !(*q > 0.0 && *q <= 1.0) {
                return Err(Error::InvalidArgument(format!("survival {q} of level {i} not in (0, 1]")));
            }
            let row = &self.jump_targets[i];
            let s: f64 = row.iter().sum();
            if *q < 1.0 && ((s - 1.0).abs() > 1e-12 || row[i] != 0.0 || row.iter().any(|x| *x < 0.0)) {
                return Err(Error::InvalidDistribution(format!(
                    "jump targets of level {i} must be a distribution over the other levels"
                )));
            }
        }
        Ok(())
    }

    pub fn bundle_survival(&self, level: Level) -> f64 {
        self.survival_per_unit[level.index()].powi(self.repeats_per_bundle as i32)
    }

    /// Expected photons per bundle.
    pub fn mean_counts(&self, level: Level, target: Level) -> f64 {
        let rate = if level == target { self.rate_dark } else { self.rate_bright };
        self.repeats_per_bundle as f64 * self.unit_duration * rate
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub target: Level,
    pub counts: Vec<u64>,
    pub states: Vec<Level>,
}

impl Trace {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bundle_index,photon_count,true_state")?;
        for (i, (c, s)) in self.counts.iter().zip(&self.states).enumerate() {
            writeln!(w, "{i},{c},{s}")?;
        }
        Ok(())
    }
}

fn check_target(target: Level) -> Result<()> {
    if target == Level::Zero {
        return Err(Error::InvalidArgument("readout target must be +1 or -1".into()));
    }
    Ok(())
}

pub fn simulate_trace_with_rng<R: Rng + ?Sized>(
    model: &TraceModel,
    n_bundles: usize,
    target: Level,
    initial: Level,
    rng: &mut R,
) -> Result<Trace> {
    model.validate_common()?;
    check_target(target)?;
    let poisson = Level::ALL.map(|l| Poisson::new(model.mean_counts(l, target)).expect("positive mean"));
    let survival = Level::ALL.map(|l| model.bundle_survival(l));
    let mut state = initial;
    let mut counts = Vec::with_capacity(n_bundles);
    let mut states = Vec::with_capacity(n_bundles);
    for _ in 0..n_bundles {
        states.push(state);
        counts.push(poisson[state.index()].sample(rng) as u64);
        let i = state.index();
        if rng.random::<f64>() >= survival[i] {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut next = state;
            for to in Level::ALL {
                acc += model.jump_targets[i][to.index()];
                if u < acc {
                    next = to;
                    break;
                }
            }
            state = next;
        }
    }
    Ok(Trace { target, counts, states })
}

pub fn simulate_trace(
    model: &TraceModel,
    n_bundles: usize,
    target: Level,
    initial: Level,
    seed: u64,
) -> Result<Trace> {
    simulate_trace_with_rng(model, n_bundles, target, initial, &mut stream_rng(seed, 0))
}

/// Independent traces; trace `k` uses stream `k` of `seed` and starts in
/// `Level::ALL[k % 3]`.
pub fn simulate_traces(
    model: &TraceModel,
    n_traces: usize,
    n_bundles: usize,
    target: Level,
    seed: u64,
) -> Result<Vec<Trace>> {
    (0..n_traces)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            simulate_trace_with_rng(model, n_bundles, target, Level::ALL[k % 3], &mut rng)
        })
        .collect()
}

/// Non-overlapping sums of `b` consecutive bundles; a trailing partial
/// readout is dropped.
pub fn aggregate(counts: &[u64], b: usize) -> Vec<u64> {
    counts.chunks_exact(b).map(|c| c.iter().sum()).collect()
}

pub fn histogram(counts: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &c in counts {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

pub fn write_histogram_csv<W: std::io::Write>(h: &BTreeMap<u64, u64>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "photon_count,frequency")?;
    for (c, f) in h {
        writeln!(w, "{c},{f}")?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
struct RunStats {
    below_total: u64,
    below_runs: u64,
    above_total: u64,
    above_runs: u64,
}

fn accumulate_runs(readouts: &[u64], threshold: u64, s: &mut RunStats) {
    let mut prev: Option<bool> = None;
    for &c in readouts {
        let below = c < threshold;
        if prev != Some(below) {
            if below {
                s.below_runs += 1;
            } else {
                s.above_runs += 1;
            }
        }
        if below {
            s.below_total += 1;
        } else {
            s.above_total += 1;
        }
        prev = Some(below);
    }
}

/// Best threshold for one bundle size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub bundle_size: usize,
    pub threshold: u64,
    pub fidelity: f64,
    pub fidelity_below: f64,
    pub fidelity_above: f64,
    pub mean_run_below: f64,
    pub mean_run_above: f64,
}

/// Centres of the two count clusters (1-D two-means).
pub fn peak_centres(readouts: &[u64]) -> (f64, f64) {
    let lo = *readouts.iter().min().unwrap_or(&0) as f64;
    let hi = *readouts.iter().max().unwrap_or(&0) as f64;
    let (mut c1, mut c2) = (lo, hi);
    for _ in 0..100 {
        let cut = 0.5 * (c1 + c2);
        let (mut s1, mut n1, mut s2, mut n2) = (0.0, 0u64, 0.0, 0u64);
        for &r in readouts {
            let r = r as f64;
            if r < cut {
                s1 += r;
                n1 += 1;
            } else {
                s2 += r;
                n2 += 1;
            }
        }
        let (new1, new2) = (
            if n1 > 0 { s1 / n1 as f64 } else { c1 },
            if n2 > 0 { s2 / n2 as f64 } else { c2 },
        );
        if new1 == c1 && new2 == c2 {
            break;
        }
        c1 = new1;
        c2 = new2;
    }
    (c1, c2)
}

/// Scans every integer threshold between the smallest and largest aggregated
/// count and maximises `F = (F_1 + F_2) / 2`, `F_i = 1 - 1 / (2 n_i)` with
/// `n_i` the mean run length of readouts below / at-or-above the threshold.
pub fn optimize_threshold(traces: &[Trace], b: usize) -> Result<ThresholdFit> {
    if b == 0 {
        return Err(Error::InvalidArgument("bundle size must be at least 1".into()));
    }
    let readouts: Vec<Vec<u64>> = traces.iter().map(|t| aggregate(&t.counts, b)).collect();
    let all: Vec<u64> = readouts.iter().flatten().copied().collect();
    let (Some(&lo), Some(&hi)) = (all.iter().min(), all.iter().max()) else {
        return Err(Error::DegenerateTrace(format!("no complete readouts of {b} bundles")));
    };
    if lo == hi {
        return Err(Error::DegenerateTrace(format!("every readout has {lo} photons")));
    }
    let (c1, c2) = peak_centres(&all);
    let mid = 0.5 * (c1 + c2);

    let candidates: Vec<ThresholdFit> = (lo + 1..=hi)
        .into_par_iter()
        .map(|t| {
            let mut s = RunStats::default();
            for r in &readouts {
                accumulate_runs(r, t, &mut s);
            }
            let n1 = s.below_total as f64 / s.below_runs as f64;
            let n2 = s.above_total as f64 / s.above_runs as f64;
            let f1 = 1.0 - 1.0 / (2.0 * n1);
            let f2 = 1.0 - 1.0 / (2.0 * n2);
            ThresholdFit {
                bundle_size: b,
                threshold: t,
                fidelity: 0.5 * (f1 + f2),
                fidelity_below: f1,
                fidelity_above: f2,
                mean_run_below: n1,
                mean_run_above: n2,
            }
        })
        .collect();

    let best = candidates
        .iter()
        .map(|c| c.fidelity)
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs();
    candidates
        .into_iter()
        .filter(|c| c.fidelity >= best - tol)
        .min_by(|a, b| {
            let da = (a.threshold as f64 - mid).abs();
            let db = (b.threshold as f64 - mid).abs();
            da.total_cmp(&db).then(a.threshold.cmp(&b.threshold))
        })
        .ok_or_else(|| Error::DegenerateTrace("no threshold separates two platforms".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub points: Vec<ThresholdFit>,
    pub best: ThresholdFit,
}

impl Calibration {
    pub fn has_interior_maximum(&self) -> bool {
        let first = self.points.first().map(|p| p.bundle_size);
        let last = self.points.last().map(|p| p.bundle_size);
        Some(self.best.bundle_size) != first && Some(self.best.bundle_size) != last
    }
}

/// Optimal threshold for every bundle size in `1..=b_max`.
pub fn calibrate(traces: &[Trace], b_max: usize) -> Result<Calibration> {
    let points = (1..=b_max)
        .map(|b| optimize_threshold(traces, b))
        .collect::<Result<Vec<_>>>()?;
    let best = *points
        .iter()
        .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
        .ok_or_else(|| Error::InvalidArgument("b_max must be at least 1".into()))?;
    Ok(Calibration { points, best })
}
