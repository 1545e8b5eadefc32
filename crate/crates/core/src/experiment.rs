//! Run configuration, presets and the file-emitting commands behind `jelab`.
//!
//! A configuration is resolved in layers: built-in defaults, then a named
//! preset, then a JSON file, then command-line overrides. Every CSV starts with
//! a `#` comment line echoing the command, the seed and the resolved
//! configuration; JSON outputs carry the same information as fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{mc_pipeline, McInput, McSummary, NegativePolicy};
use crate::error::{Error, Result};
use crate::evolution::{overlap_trace, DEFAULT_STEPS};
use crate::protocol::{adiabaticity_factor_converged, Ramp, Schedule};
use crate::pulses::{rwa_fidelity_default, LabFrameParams};
use crate::qutrit::Level;
use crate::readout::{
    aggregate, calibrate, deviation_from_tpm, histogram, optimize_threshold, simulate_traces,
    write_histogram_csv, JumpModel, MeasurementChannel, TraceModel,
};
use crate::thermo::{beta_from_dimensionless, jarzynski_lhs, IdealTpm};

pub const SEED_ENV: &str = "JELAB_SEED";
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const SWITCHING_TIMES_US: [f64; 5] = [5.0, 50.0, 125.0, 200.0, 2500.0];

/// Twelve significant digits, locale independent.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Seed from the environment, falling back to [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpPreset {
    F90,
    F98,
}

impl JumpPreset {
    pub fn model(self) -> JumpModel {
        match self {
            JumpPreset::F90 => JumpModel::f90(),
            JumpPreset::F98 => JumpModel::f98(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TracePreset {
    Standard,
    NoJumps,
}

impl TracePreset {
    pub fn model(self) -> TraceModel {
        match self {
            TracePreset::Standard => TraceModel::standard(),
            TracePreset::NoJumps => TraceModel::no_jumps(),
        }
    }
}

/// Fully resolved configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub beta_abs_lambda: Vec<f64>,
    pub tau_us: Vec<f64>,
    pub n_steps: usize,
    pub seed: u64,
    pub readout_fidelity: Option<f64>,
    pub jump_preset: Option<JumpPreset>,
    pub renormalize_excluded: bool,
    pub output_dir: PathBuf,
    pub mc_runs: usize,
    pub negative_policy: NegativePolicy,
    pub trace_model: TracePreset,
    pub n_bundles: usize,
    pub n_traces: usize,
    pub b_max: usize,
    pub bundle_size: usize,
    pub carrier_ratios: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            beta_abs_lambda: vec![0.5],
            tau_us: SWITCHING_TIMES_US.to_vec(),
            n_steps: DEFAULT_STEPS,
            seed: default_seed(),
            readout_fidelity: None,
            jump_preset: None,
            renormalize_excluded: true,
            output_dir: PathBuf::from("."),
            mc_runs: 10_000,
            negative_policy: NegativePolicy::Clamp,
            trace_model: TracePreset::Standard,
            n_bundles: 20_000,
            n_traces: 6,
            b_max: 15,
            bundle_size: 9,
            carrier_ratios: vec![100.0, 50.0, 25.0],
        }
    }
}

/// A scalar or a list in JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// One configuration layer; absent fields leave the lower layer untouched.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub preset: Option<String>,
    pub beta_abs_lambda: Option<OneOrMany>,
    pub tau_us: Option<OneOrMany>,
    pub n_steps: Option<usize>,
    pub seed: Option<u64>,
    pub readout_fidelity: Option<f64>,
    pub jump_preset: Option<JumpPreset>,
    pub renormalize_excluded: Option<bool>,
    pub output_dir: Option<PathBuf>,
    pub mc_runs: Option<usize>,
    pub negative_policy: Option<NegativePolicy>,
    pub trace_model: Option<TracePreset>,
    pub n_bundles: Option<usize>,
    pub n_traces: Option<usize>,
    pub b_max: Option<usize>,
    pub bundle_size: Option<usize>,
    pub carrier_ratios: Option<OneOrMany>,
}

impl ConfigLayer {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub const PRESETS: [&str; 6] = [
    "paper-fig4",
    "paper-fig-s7-f90",
    "paper-fig-s7-f98",
    "paper-traces",
    "no-jumps",
    "desk-rwa",
];

fn preset_layer(name: &str) -> Result<ConfigLayer> {
    let taus = Some(OneOrMany::Many(SWITCHING_TIMES_US.to_vec()));
    let layer = match name {
        "paper-fig4" => ConfigLayer {
            beta_abs_lambda: Some(OneOrMany::Many(vec![0.0, 0.5, 0.7])),
            tau_us: taus,
            ..Default::default()
        },
        "paper-fig-s7-f90" | "paper-fig-s7-f98" => ConfigLayer {
            beta_abs_lambda: Some(OneOrMany::One(0.7)),
            tau_us: taus,
            jump_preset: Some(if name.ends_with("f90") { JumpPreset::F90 } else { JumpPreset::F98 }),
            ..Default::default()
        },
        "paper-traces" => ConfigLayer { trace_model: Some(TracePreset::Standard), ..Default::default() },
        "no-jumps" => ConfigLayer { trace_model: Some(TracePreset::NoJumps), ..Default::default() },
        "desk-rwa" => ConfigLayer {
            tau_us: Some(OneOrMany::One(200.0)),
            carrier_ratios: Some(OneOrMany::Many(vec![100.0, 50.0, 25.0])),
            ..Default::default()
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}`; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(layer)
}

impl RunConfig {
    fn apply(&mut self, l: ConfigLayer) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = l.$f { self.$f = v; } )* };
        }
        set!(n_steps, seed, renormalize_excluded, output_dir, mc_runs, negative_policy, trace_model,
             n_bundles, n_traces, b_max, bundle_size);
        if let Some(v) = l.beta_abs_lambda {
            self.beta_abs_lambda = v.into_vec();
        }
        if let Some(v) = l.tau_us {
            self.tau_us = v.into_vec();
        }
        if let Some(v) = l.carrier_ratios {
            self.carrier_ratios = v.into_vec();
        }
        if l.readout_fidelity.is_some() {
            self.readout_fidelity = l.readout_fidelity;
        }
        if l.jump_preset.is_some() {
            self.jump_preset = l.jump_preset;
        }
        if l.preset.is_some() {
            self.preset = l.preset;
        }
    }

    /// Defaults, then the preset named by either layer, then `file`, then `cli`.
    pub fn resolve(file: Option<ConfigLayer>, cli: ConfigLayer) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let preset = cli.preset.clone().or_else(|| file.as_ref().and_then(|f| f.preset.clone()));
        if let Some(name) = &preset {
            cfg.apply(preset_layer(name)?);
            cfg.preset = Some(name.clone());
        }
        if let Some(f) = file {
            cfg.apply(f);
        }
        cfg.apply(cli);
        cfg.preset = preset;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::resolve(None, ConfigLayer { preset: Some(name.into()), ..Default::default() })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.tau_us.is_empty() || self.tau_us.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad(format!("tau_us must be positive, got {:?}", self.tau_us));
        }
        if self.beta_abs_lambda.is_empty() || self.beta_abs_lambda.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return bad(format!("beta_abs_lambda must be non-negative, got {:?}", self.beta_abs_lambda));
        }
        if self.n_steps == 0 {
            return bad("n_steps must be positive".into());
        }
        if let Some(f) = self.readout_fidelity {
            if !(f > 0.5 && f <= 1.0) {
                return bad(format!("readout_fidelity {f} outside (0.5, 1]"));
            }
            if self.jump_preset.is_some() {
                return bad("give either readout_fidelity or jump_preset, not both".into());
            }
        }
        if self.bundle_size == 0 || self.b_max == 0 || self.n_traces == 0 || self.n_bundles == 0 {
            return bad("bundle and trace sizes must be positive".into());
        }
        if self.carrier_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad(format!("carrier_ratios must be positive, got {:?}", self.carrier_ratios));
        }
        Ok(())
    }

    pub fn jump_model(&self) -> Result<Option<JumpModel>> {
        match (self.readout_fidelity, self.jump_preset) {
            (Some(f), _) => Ok(Some(JumpModel::from_fidelity(f)?)),
            (None, Some(p)) => Ok(Some(p.model())),
            (None, None) => Ok(None),
        }
    }

    fn header(&self, command: &str) -> String {
        let echo = serde_json::to_string(self).unwrap_or_default();
        format!("# jelab {command} seed={} config={echo}", self.seed)
    }

    fn sorted_grid(&self) -> Vec<(f64, f64)> {
        let mut betas = self.beta_abs_lambda.clone();
        let mut taus = self.tau_us.clone();
        betas.sort_by(f64::total_cmp);
        taus.sort_by(f64::total_cmp);
        betas.iter().flat_map(|&b| taus.iter().map(move |&t| (b, t))).collect()
    }
}

/// Files written by a command and a short human-readable summary.
#[derive(Clone, Debug, Default)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn create(cfg: &RunConfig, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn write_csv(
    cfg: &RunConfig,
    command: &str,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf> {
    let (path, mut w) = create(cfg, name)?;
    writeln!(w, "{}", cfg.header(command))?;
    body(&mut w)?;
    w.flush()?;
    Ok(path)
}

fn write_json<T: Serialize>(cfg: &RunConfig, command: &str, name: &str, value: &T) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        command: &'a str,
        seed: u64,
        config: &'a RunConfig,
        #[serde(flatten)]
        value: &'a T,
    }
    let (path, mut w) = create(cfg, name)?;
    serde_json::to_writer_pretty(&mut w, &Wrapped { command, seed: cfg.seed, config: cfg, value })?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JeRow {
    pub beta_abs_lambda: f64,
    pub tau_us: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    pub adiabaticity: f64,
}

/// Both sides of the equality over the `(beta, tau)` grid, through the readout
/// channel when one is configured.
pub fn je_rows(cfg: &RunConfig) -> Result<Vec<JeRow>> {
    let channel = cfg.jump_model()?.map(MeasurementChannel::new);
    cfg.sorted_grid()
        .into_par_iter()
        .map(|(bl, tau_us)| {
            let s = Schedule::standard_us(tau_us)?;
            let beta = beta_from_dimensionless(bl, s.lambda);
            let tpm = IdealTpm::run(&s, beta, cfg.n_steps)?;
            let (lhs, rhs) = match &channel {
                Some(ch) => {
                    let d = deviation_from_tpm(&tpm, ch, cfg.renormalize_excluded)?;
                    (d.lhs, d.rhs)
                }
                None => (jarzynski_lhs(&tpm.distribution, beta), tpm.free_energy_ratio()),
            };
            let fa = adiabaticity_factor_converged(&s)?.factor;
            Ok(JeRow { beta_abs_lambda: bl, tau_us, lhs, rhs, diff: lhs - rhs, adiabaticity: fa })
        })
        .collect()
}

pub fn cmd_je_run(cfg: &RunConfig) -> Result<CommandReport> {
    let rows = je_rows(cfg)?;
    let path = write_csv(cfg, "je-run", "je_run.csv", |w| {
        writeln!(w, "beta_abs_lambda,tau_us,lhs,rhs,diff,adiabaticity")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_num(r.beta_abs_lambda),
                fmt_num(r.tau_us),
                fmt_num(r.lhs),
                fmt_num(r.rhs),
                fmt_num(r.diff),
                fmt_num(r.adiabaticity)
            )?;
        }
        Ok(())
    })?;
    let worst = rows.iter().map(|r| r.diff.abs()).fold(0.0, f64::max);
    Ok(CommandReport {
        files: vec![path],
        summary: format!("{} rows, max |lhs - rhs| = {worst:.3e}", rows.len()),
    })
}

pub fn cmd_adiabaticity(cfg: &RunConfig) -> Result<CommandReport> {
    let mut taus = cfg.tau_us.clone();
    taus.sort_by(f64::total_cmp);
    let rows = taus
        .par_iter()
        .map(|&t| Ok((t, adiabaticity_factor_converged(&Schedule::standard_us(t)?)?)))
        .collect::<Result<Vec<_>>>()?;
    let path = write_csv(cfg, "adiabaticity", "adiabaticity.csv", |w| {
        writeln!(w, "tau_us,adiabaticity,grid_points")?;
        for (t, e) in &rows {
            writeln!(w, "{},{},{}", fmt_num(*t), fmt_num(e.factor), e.grid_points)?;
        }
        Ok(())
    })?;
    let summary = rows
        .iter()
        .map(|(t, e)| format!("tau = {t} us: F_A = {:.5}", e.factor))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(CommandReport { files: vec![path], summary })
}

fn label_tag(l: Level) -> &'static str {
    match l {
        Level::Plus => "plus1",
        Level::Zero => "0",
        Level::Minus => "minus1",
    }
}

pub fn cmd_overlap(cfg: &RunConfig) -> Result<CommandReport> {
    let mut report = CommandReport::default();
    let mut lines = Vec::new();
    for &tau in &cfg.tau_us {
        let s = Schedule::standard_us(tau)?;
        for level in Level::ALL {
            let tr = overlap_trace(&s, level, cfg.n_steps)?;
            let name = format!("overlap_tau{tau}us_{}.csv", label_tag(level));
            report.files.push(write_csv(cfg, "overlap", &name, |w| tr.write_csv(w))?);
            lines.push(format!(
                "tau = {tau} us, start {level}: final overlap {:.6}, minimum {:.6}",
                tr.final_overlaps()[level.index()],
                tr.min_overlap(level)
            ));
        }
    }
    report.summary = lines.join("\n");
    Ok(report)
}

fn readout_target() -> Level {
    Level::Plus
}

pub fn cmd_traces(cfg: &RunConfig) -> Result<CommandReport> {
    let model = cfg.trace_model.model();
    let traces = simulate_traces(&model, cfg.n_traces, cfg.n_bundles, readout_target(), cfg.seed)?;
    let fit = optimize_threshold(&traces, cfg.bundle_size)?;
    let readouts: Vec<u64> = traces.iter().flat_map(|t| aggregate(&t.counts, cfg.bundle_size)).collect();
    let hist = histogram(&readouts);
    let h = write_csv(cfg, "traces", "histogram.csv", |w| write_histogram_csv(&hist, w))?;
    let t = write_csv(cfg, "traces", "trace.csv", |w| traces[0].write_csv(w))?;
    Ok(CommandReport {
        files: vec![h, t],
        summary: format!(
            "b = {}: threshold {} photons, fidelity {:.4}",
            fit.bundle_size, fit.threshold, fit.fidelity
        ),
    })
}

pub fn cmd_readout_calibrate(cfg: &RunConfig) -> Result<CommandReport> {
    let model = cfg.trace_model.model();
    let traces = simulate_traces(&model, cfg.n_traces, cfg.n_bundles, readout_target(), cfg.seed)?;
    let cal = calibrate(&traces, cfg.b_max)?;
    let readouts: Vec<u64> = traces.iter().flat_map(|t| aggregate(&t.counts, cal.best.bundle_size)).collect();
    let hist = histogram(&readouts);
    let j = write_json(cfg, "readout-calibrate", "calibration.json", &cal)?;
    let h = write_csv(cfg, "readout-calibrate", "histogram.csv", |w| write_histogram_csv(&hist, w))?;
    Ok(CommandReport {
        files: vec![j, h],
        summary: format!(
            "optimum b = {}, threshold {} photons, fidelity {:.4} (interior maximum: {})",
            cal.best.bundle_size,
            cal.best.threshold,
            cal.best.fidelity,
            cal.has_interior_maximum()
        ),
    })
}

pub fn cmd_channel(cfg: &RunConfig) -> Result<CommandReport> {
    let jm = cfg.jump_model()?.unwrap_or_else(JumpModel::f98);
    let ch = MeasurementChannel::new(jm);
    let table = write_csv(cfg, "channel", "channel.csv", |w| {
        writeln!(w, "pre_state,outcome,post_state,probability")?;
        for i in Level::ALL {
            for j in Level::ALL {
                for k in Level::ALL {
                    writeln!(w, "{i},{j},{k},{}", fmt_num(ch.get(i, j, k)))?;
                }
            }
        }
        Ok(())
    })?;
    let rows = cfg
        .sorted_grid()
        .into_par_iter()
        .map(|(bl, tau_us)| {
            let s = Schedule::standard_us(tau_us)?;
            let tpm = IdealTpm::run(&s, beta_from_dimensionless(bl, s.lambda), cfg.n_steps)?;
            Ok((bl, tau_us, deviation_from_tpm(&tpm, &ch, cfg.renormalize_excluded)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let dev = write_csv(cfg, "channel", "deviation.csv", |w| {
        writeln!(w, "beta_abs_lambda,tau_us,lhs,rhs,delta,retained_mass")?;
        for (bl, t, d) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_num(*bl),
                fmt_num(*t),
                fmt_num(d.lhs),
                fmt_num(d.rhs),
                fmt_num(d.delta),
                fmt_num(d.retained_mass)
            )?;
        }
        Ok(())
    })?;
    let worst = rows.iter().map(|r| r.2.delta.abs()).fold(0.0, f64::max);
    Ok(CommandReport {
        files: vec![table, dev],
        summary: format!(
            "excluded mass per pre-state {:?}; max |delta| = {worst:.4}",
            ch.excluded_mass
        ),
    })
}

pub fn run_mc(cfg: &RunConfig, input: &McInput) -> Result<McSummary> {
    let measured = input.resolve()?;
    let (h0, ht) = input.hamiltonians()?;
    Ok(mc_pipeline(&measured, &h0, &ht, cfg.mc_runs, cfg.seed, cfg.negative_policy)?.0)
}

pub fn cmd_mc(cfg: &RunConfig, input_path: &Path) -> Result<CommandReport> {
    let text = std::fs::read_to_string(input_path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", input_path.display())))?;
    let input: McInput = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", input_path.display())))?;
    let summary = run_mc(cfg, &input)?;
    let path = write_json(cfg, "mc", "mc_summary.json", &summary)?;
    Ok(CommandReport {
        files: vec![path],
        summary: format!(
            "K = {}: beta|lambda| = {:.4} +- {:.4}, lhs = {:.4} +- {:.4}, rhs = {:.4} +- {:.4}",
            summary.k,
            summary.beta_abs_lambda_mean,
            summary.beta_abs_lambda_std,
            summary.lhs_mean,
            summary.lhs_std,
            summary.rhs_mean,
            summary.rhs_std
        ),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RwaRow {
    pub carrier_over_lambda: f64,
    pub tau_us: f64,
    pub fidelity: f64,
    pub driven: bool,
}

pub fn rwa_rows(cfg: &RunConfig) -> Result<Vec<RwaRow>> {
    let mut ratios = cfg.carrier_ratios.clone();
    ratios.sort_by(|a, b| b.total_cmp(a));
    let mut taus = cfg.tau_us.clone();
    taus.sort_by(f64::total_cmp);
    let mut jobs = Vec::new();
    for &t in &taus {
        for &r in &ratios {
            jobs.push((r, t, true));
        }
        jobs.push((ratios[0], t, false));
    }
    jobs.into_par_iter()
        .map(|(r, t, driven)| {
            let mut s = Schedule::standard_us(t)?;
            if !driven {
                s = s.with_ramps(Ramp::QuarterDecay, Ramp::Constant(0.0));
            }
            let res = rwa_fidelity_default(&LabFrameParams::with_carrier_ratio(s, r))?;
            Ok(RwaRow { carrier_over_lambda: res.carrier_over_lambda, tau_us: t, fidelity: res.fidelity, driven })
        })
        .collect()
}

pub fn cmd_rwa_check(cfg: &RunConfig) -> Result<CommandReport> {
    if cfg.carrier_ratios.is_empty() {
        return Err(Error::Config("carrier_ratios is empty".into()));
    }
    let rows = rwa_rows(cfg)?;
    let path = write_csv(cfg, "rwa-check", "rwa.csv", |w| {
        writeln!(w, "carrier_over_lambda,tau_us,fidelity,drive")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_num(r.carrier_over_lambda),
                fmt_num(r.tau_us),
                fmt_num(r.fidelity),
                if r.driven { "on" } else { "off" }
            )?;
        }
        Ok(())
    })?;
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "carrier/|lambda| = {:.1}, tau = {} us, drive {}: fidelity {:.8}",
                r.carrier_over_lambda,
                r.tau_us,
                if r.driven { "on" } else { "off" },
                r.fidelity
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(CommandReport { files: vec![path], summary })
}

/// 2 for bad input, 3 for numerical guards.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RwaGuard { .. }
        | Error::InsufficientSteps { .. }
        | Error::NonHermitian { .. }
        | Error::DegenerateTrace(_) => 3,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_num_has_twelve_digits() {
        assert_eq!(fmt_num(0.9653), "9.65300000000e-1");
        assert_eq!(fmt_num(-1.0), "-1.00000000000e0");
    }

    #[test]
    fn layers_apply_in_order() {
        let file = ConfigLayer { seed: Some(7), n_steps: Some(100), ..Default::default() };
        let cli = ConfigLayer { n_steps: Some(200), preset: Some("paper-fig4".into()), ..Default::default() };
        let cfg = RunConfig::resolve(Some(file), cli).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_steps, 200);
        assert_eq!(cfg.beta_abs_lambda, vec![0.0, 0.5, 0.7]);
        assert_eq!(cfg.tau_us.len(), 5);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(RunConfig::preset("nope").is_err());
        let l = ConfigLayer { tau_us: Some(OneOrMany::One(-1.0)), ..Default::default() };
        assert!(RunConfig::resolve(None, l).is_err());
        let l = ConfigLayer { readout_fidelity: Some(0.4), ..Default::default() };
        assert!(RunConfig::resolve(None, l).is_err());
        assert!(serde_json::from_str::<ConfigLayer>(r#"{"tau": 3}"#).is_err());
    }

    #[test]
    fn scalar_or_list_accepted() {
        let l: ConfigLayer = serde_json::from_str(r#"{"beta_abs_lambda": 0.7, "tau_us": [5, 50]}"#).unwrap();
        let cfg = RunConfig::resolve(Some(l), ConfigLayer::default()).unwrap();
        assert_eq!(cfg.beta_abs_lambda, vec![0.7]);
        assert_eq!(cfg.tau_us, vec![5.0, 50.0]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::RwaGuard { ratio: 3.0, min: 20.0 }), 3);
    }
}
