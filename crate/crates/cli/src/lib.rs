//! Command-line front end: protocol runs, parameter sweeps, device truth
//! tables and the permanent-oracle cross-check.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperconc::devices::{truth_tables, DetectorModel, SpcOptions};
use hyperconc::oracle::cross_check;
use hyperconc::protocol::{self, PpcVariant, ProtocolConfig, RunMode, RunReport, Variant};
use hyperconc::{Complex64, StateParams};

mod format;
mod sweep;

pub use format::fmt_g12;
pub use sweep::{grid_values, render_sweep, sweep, SweepRow, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hyperconc::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for usage problems, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    TwoCopies,
    Auxiliary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PpcArg {
    Plain,
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Pnr,
    Bucket,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::TwoCopies => Variant::TwoCopies,
            VariantArg::Auxiliary => Variant::Auxiliary,
        }
    }
}

impl From<PpcArg> for PpcVariant {
    fn from(v: PpcArg) -> Self {
        match v {
            PpcArg::Plain => PpcVariant::Plain,
            PpcArg::Improved => PpcVariant::Improved,
        }
    }
}

impl From<DetectorArg> for DetectorModel {
    fn from(v: DetectorArg) -> Self {
        match v {
            DetectorArg::Pnr => DetectorModel::Pnr,
            DetectorArg::Bucket => DetectorModel::Bucket,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyperconc", version, about = "Linear-optics simulator for N-photon hyperentanglement concentration")]
pub struct Cli {
    /// Output format (defaults: run json, sweep csv, devices and verify text).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the concentration protocol once.
    Run(RunArgs),
    /// Success probability over a grid of squared amplitudes.
    Sweep(SweepArgs),
    /// Truth tables of the parity-check and measurement devices.
    Devices,
    /// Compare the circuit engine against permanent amplitudes.
    Verify(VerifyArgs),
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is not in [0, 1]"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    /// Number of parties.
    #[arg(long = "n", default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=protocol::MAX_PARTIES as i64))]
    pub parties: u8,
    #[arg(long, value_enum, default_value = "two-copies")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "plain")]
    pub ppc: PpcArg,
    #[arg(long, value_enum, default_value = "pnr")]
    pub detector: DetectorArg,
    /// Split each spatial-check detector path once more onto vacuum taps.
    #[arg(long)]
    pub spc_splitters: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// |alpha|^2; |beta|^2 = 1 - |alpha|^2.
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub alpha2: f64,
    /// |delta|^2; |eta|^2 = 1 - |delta|^2.
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    pub delta2: f64,
    /// Complex amplitudes alpha,beta,delta,eta as eight comma-separated reals
    /// (re,im pairs). Overrides --alpha2/--delta2.
    #[arg(long, num_args = 1, value_delimiter = ',', allow_hyphen_values = true, value_name = "RE,IM,...")]
    pub amplitudes: Option<Vec<f64>>,
    /// Sample this many shots instead of reporting only exact probabilities.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long = "n", default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=protocol::MAX_PARTIES as i64))]
    pub parties: u8,
    #[arg(long, value_enum, default_value = "two-copies")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "plain")]
    pub ppc: PpcArg,
    #[arg(long, value_enum, default_value = "pnr")]
    pub detector: DetectorArg,
    /// Smallest grid value for both axes.
    #[arg(long, default_value_t = 0.05)]
    pub min: f64,
    /// Largest grid value for both axes.
    #[arg(long, default_value_t = 0.95)]
    pub max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Logging is controlled by `HYPERCONC_LOG` (e.g. `HYPERCONC_LOG=debug`).
pub fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("HYPERCONC_LOG"))
        .format_timestamp(None)
        .try_init();
}

impl RunArgs {
    pub fn params(&self) -> CliResult<StateParams> {
        match &self.amplitudes {
            None => Ok(StateParams::from_squared(self.alpha2, self.delta2)?),
            Some(v) if v.len() == 8 => {
                let c = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
                Ok(StateParams::new(c(0), c(1), c(2), c(3))?)
            }
            Some(v) => Err(CliError::Usage(format!("--amplitudes needs 8 numbers, got {}", v.len()))),
        }
    }

    pub fn config(&self) -> CliResult<ProtocolConfig> {
        let mut config = ProtocolConfig::new(self.protocol.parties, self.params()?);
        apply_protocol_args(&mut config, &self.protocol);
        if let Some(count) = self.shots {
            config.mode = RunMode::Shots { count, seed: self.seed };
        }
        Ok(config)
    }
}

fn apply_protocol_args(config: &mut ProtocolConfig, args: &ProtocolArgs) {
    config.variant = args.variant.into();
    config.ppc_variant = args.ppc.into();
    config.detector_model = args.detector.into();
    config.spc_options = SpcOptions {
        extra_splitters: args.spc_splitters,
    };
}

impl SweepArgs {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            parties: self.parties,
            variant: self.variant.into(),
            ppc_variant: self.ppc.into(),
            detector_model: self.detector.into(),
            min: self.min,
            max: self.max,
            step: self.step,
        }
    }
}

pub fn cmd_run(args: &RunArgs, format: Format) -> CliResult<String> {
    let config = args.config()?;
    log::info!("run: N={} variant={:?} mode={:?}", config.parties, config.variant, config.mode);
    let report = protocol::run(&config)?;
    render_report(&report, format)
}

fn opt_bit(b: Option<u8>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

pub fn render_report(report: &RunReport, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(report.to_json() + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["branch_id", "accepted", "false_accept", "probability", "outcomes", "P", "Q", "fidelity"])?;
            for b in &report.branches {
                let outcomes: Vec<String> = b
                    .detections
                    .iter()
                    .map(|d| d.event.tag.map(|t| t.to_string()).unwrap_or_else(|| "reject".into()))
                    .collect();
                let signs = b.signs.as_ref();
                w.write_record([
                    b.branch_id.to_string(),
                    b.accepted.to_string(),
                    b.false_accept.to_string(),
                    fmt_g12(b.probability),
                    outcomes.join(" "),
                    opt_bit(signs.and_then(|s| s.big_p)),
                    opt_bit(signs.map(|s| s.big_q)),
                    b.fidelity_after_correction.map(fmt_g12).unwrap_or_default(),
                ])?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
        }
        Format::Text => {
            let s = &report.summary;
            let mut out = String::new();
            let c = &report.config;
            out += &format!("parties                 {}\n", c.parties);
            out += &format!("variant                 {:?} / {:?} / {:?}\n", c.variant, c.ppc_variant, c.detector_model);
            out += &format!("success probability     {}\n", fmt_g12(s.success_probability));
            out += &format!("formula 4|abde|^2       {}\n", fmt_g12(s.formula_probability));
            out += &format!("false-accept probability {}\n", fmt_g12(s.false_accept_probability));
            out += &format!("branches                {} accept, {} reject\n", s.accept_branches, s.reject_branches);
            if let Some(f) = s.mean_accept_fidelity {
                out += &format!("mean accepted fidelity  {}\n", fmt_g12(f));
            }
            if let Some(shots) = &report.shots {
                out += &format!(
                    "shots                   {} (seed {}), {} accepted, rate {} +/- {}\n",
                    shots.shots,
                    shots.seed,
                    shots.accepted,
                    fmt_g12(shots.empirical_success_rate),
                    fmt_g12(shots.standard_error)
                );
            }
            Ok(out)
        }
    }
}

pub fn cmd_sweep(args: &SweepArgs, format: Format) -> CliResult<String> {
    let rows = sweep(&args.spec())?;
    render_sweep(&rows, format)
}

pub fn cmd_devices(format: Format) -> CliResult<String> {
    let rows = truth_tables()?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&rows).map_err(|e| hyperconc::Error::Serialization(e.to_string()))? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["device", "input", "accept_pnr", "accept_bucket", "false_accept_bucket", "verdict"])?;
            for r in &rows {
                w.write_record([
                    r.device.to_string(),
                    r.input.clone(),
                    fmt_g12(r.accept_pnr),
                    fmt_g12(r.accept_bucket),
                    fmt_g12(r.false_accept_bucket),
                    r.verdict.clone(),
                ])?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
        }
        Format::Text => {
            let mut out = format!(
                "{:<13} {:<28} {:>8} {:>8} {:>8}  {}\n",
                "device", "input", "pnr", "bucket", "false", "verdict"
            );
            for r in &rows {
                out += &format!(
                    "{:<13} {:<28} {:>8} {:>8} {:>8}  {}\n",
                    r.device.to_string(),
                    r.input,
                    fmt_g12(r.accept_pnr),
                    fmt_g12(r.accept_bucket),
                    fmt_g12(r.false_accept_bucket),
                    r.verdict
                );
            }
            Ok(out)
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs, format: Format) -> CliResult<String> {
    let report = cross_check(args.trials as usize, args.seed)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&report).map_err(|e| hyperconc::Error::Serialization(e.to_string()))? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["trials", "seed", "amplitudes", "max_deviation", "max_completeness_error", "max_unitarity_error"])?;
            w.write_record([
                report.trials.to_string(),
                report.seed.to_string(),
                report.amplitudes_compared.to_string(),
                fmt_g12(report.max_amplitude_deviation),
                fmt_g12(report.max_completeness_error),
                fmt_g12(report.max_unitarity_error),
            ])?;
            Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
        }
        Format::Text => Ok(format!(
            "trials {} (seed {}), {} amplitudes compared\nmax amplitude deviation  {:e}\nmax completeness error   {:e}\nmax unitarity error      {:e}\n",
            report.trials,
            report.seed,
            report.amplitudes_compared,
            report.max_amplitude_deviation,
            report.max_completeness_error,
            report.max_unitarity_error
        )),
    }
}

/// Renders the command's output as a string.
pub fn render(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, cli.format.unwrap_or(Format::Json)),
        Command::Sweep(a) => cmd_sweep(a, cli.format.unwrap_or(Format::Csv)),
        Command::Devices => cmd_devices(cli.format.unwrap_or(Format::Text)),
        Command::Verify(a) => cmd_verify(a, cli.format.unwrap_or(Format::Text)),
    }
}

/// Renders and writes to `--out` or stdout.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let output = render(cli)?;
    match &cli.out {
        Some(path) => fs::write(path, output)?,
        None => std::io::stdout().lock().write_all(output.as_bytes())?,
    }
    Ok(())
}
