use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qutrit_jarzynski::experiment::{
    self, exit_code, CommandReport, ConfigLayer, JumpPreset, OneOrMany, RunConfig, TracePreset,
};
use qutrit_jarzynski::Result;

/// Spin-1 Jarzynski-equality laboratory.
#[derive(Parser)]
#[command(name = "jelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Both sides of the equality over a (beta, tau) grid.
    JeRun,
    /// Adiabaticity factor per tau.
    Adiabaticity,
    /// Instantaneous-eigenstate overlap traces.
    Overlap,
    /// Simulated photon-count traces and histogram at one bundle size.
    Traces,
    /// Threshold and fidelity for every bundle size up to b_max.
    ReadoutCalibrate,
    /// Measurement-channel table and the resulting deviation per tau.
    Channel,
    /// Monte Carlo propagation of a measured joint distribution.
    Mc {
        /// JSON with `probabilities` and `sigmas` (or `counts`), indexed [m][n].
        #[arg(long)]
        input: PathBuf,
    },
    /// Lab-frame propagation against the target protocol.
    RwaCheck,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    preset: Option<String>,
    /// beta |lambda|, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Switching durations in microseconds, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    tau_us: Option<Vec<f64>>,
    #[arg(long, global = true)]
    n_steps: Option<usize>,
    /// Defaults to $JELAB_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    readout_fidelity: Option<f64>,
    /// f90 or f98.
    #[arg(long, global = true, value_parser = parse_jump)]
    jump_preset: Option<JumpPreset>,
    /// Keep the excluded readout events out of the normalisation.
    #[arg(long, global = true)]
    raw: bool,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Monte Carlo run count K.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// standard or no-jumps.
    #[arg(long, global = true, value_parser = parse_trace)]
    trace_model: Option<TracePreset>,
    #[arg(long, global = true)]
    n_bundles: Option<usize>,
    #[arg(long, global = true)]
    n_traces: Option<usize>,
    #[arg(long, global = true)]
    b_max: Option<usize>,
    #[arg(long, global = true)]
    bundle_size: Option<usize>,
    /// Minimum carrier over |lambda|, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    carrier_ratio: Option<Vec<f64>>,
}

fn parse_jump(s: &str) -> std::result::Result<JumpPreset, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown jump preset `{s}`"))
}

fn parse_trace(s: &str) -> std::result::Result<TracePreset, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown trace model `{s}`"))
}

impl Common {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            preset: self.preset.clone(),
            beta_abs_lambda: self.beta.clone().map(OneOrMany::Many),
            tau_us: self.tau_us.clone().map(OneOrMany::Many),
            n_steps: self.n_steps,
            seed: self.seed,
            readout_fidelity: self.readout_fidelity,
            jump_preset: self.jump_preset,
            renormalize_excluded: self.raw.then_some(false),
            output_dir: self.output_dir.clone(),
            mc_runs: self.runs,
            negative_policy: None,
            trace_model: self.trace_model,
            n_bundles: self.n_bundles,
            n_traces: self.n_traces,
            b_max: self.b_max,
            bundle_size: self.bundle_size,
            carrier_ratios: self.carrier_ratio.clone().map(OneOrMany::Many),
        }
    }
}

fn run(cli: Cli) -> Result<CommandReport> {
    let file = cli.common.config.as_deref().map(ConfigLayer::from_json_file).transpose()?;
    let cfg = RunConfig::resolve(file, cli.common.layer())?;
    match cli.command {
        Command::JeRun => experiment::cmd_je_run(&cfg),
        Command::Adiabaticity => experiment::cmd_adiabaticity(&cfg),
        Command::Overlap => experiment::cmd_overlap(&cfg),
        Command::Traces => experiment::cmd_traces(&cfg),
        Command::ReadoutCalibrate => experiment::cmd_readout_calibrate(&cfg),
        Command::Channel => experiment::cmd_channel(&cfg),
        Command::Mc { input } => experiment::cmd_mc(&cfg, &input),
        Command::RwaCheck => experiment::cmd_rwa_check(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            println!("{}", report.summary);
            for f in report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
