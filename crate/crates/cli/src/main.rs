mod commands;
mod config;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ppln_core::spdc::ScanAxis;
use ppln_core::Pairing;

use crate::commands::{Output, PolingOverrides, SpectrumOverrides, SweepOverrides};
use crate::config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Physics(ppln_core::Error),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Physics(e) => CliError::Physics(ppln_core::Error::Context {
                context: what.to_string(),
                source: Box::new(e),
            }),
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }
}

impl From<ppln_core::Error> for CliError {
    fn from(e: ppln_core::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Physics(e)
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// Design and analysis of dual-periodically-poled Ti:LiNbO3 waveguides for
/// two-pair frequency-entangled photon sources.
#[derive(Debug, Parser)]
#[command(name = "ppln", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; overrides [output] format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Signal,
    Idler,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairingArg {
    Paired,
    Grid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bulk index, index increment and effective index of the five waves.
    Index,
    /// Periods, overlaps, amplitudes, degree of entanglement and bandwidths.
    Design,
    /// Degree of entanglement and periods over a list of geometries.
    Sweep {
        /// Comma-separated depths in µm; overrides [sweep] depths_um.
        #[arg(long, value_delimiter = ',')]
        depths: Option<Vec<f64>>,
        /// Comma-separated widths in µm; overrides [sweep] widths_um.
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<f64>>,
        /// Pair the lists element-wise or take every combination; overrides [sweep] pairing
        #[arg(long, value_enum)]
        pairing: Option<PairingArg>,
    },
    /// Phase-matching spectrum of one process as wavelength/gain pairs.
    Spectrum {
        /// Process 1 or 2; overrides [scan] process.
        #[arg(long)]
        process: Option<u8>,
        /// Wave whose wavelength is scanned; overrides [scan] axis
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
        /// Scan width in nm; omit to size it from the bandwidth.
        #[arg(long)]
        span: Option<f64>,
        /// Scan points, at least 101, rounded up to odd; overrides [scan] samples
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Domain boundaries of the dual-period grating, one per line in µm.
    Poling {
        #[arg(long)]
        period_1: Option<f64>,
        #[arg(long)]
        period_2: Option<f64>,
    },
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("no configuration given; pass --config <path>".into()))?;
    let config = RunConfig::load(path)?;
    let output_block = config.output.clone();
    let format = cli
        .format
        .or(output_block.as_ref().and_then(|o| o.format))
        .unwrap_or(Format::Text);
    let destination = cli
        .out
        .clone()
        .or_else(|| output_block.and_then(|o| o.path).map(PathBuf::from));

    let execute = || -> Result<Output, CliError> {
        match &cli.command {
            Command::Index => commands::index(&config, format),
            Command::Design => commands::design(&config, format),
            Command::Sweep {
                depths,
                widths,
                pairing,
            } => commands::sweep(
                &config,
                &SweepOverrides {
                    depths_um: depths.clone(),
                    widths_um: widths.clone(),
                    pairing: pairing.map(|p| match p {
                        PairingArg::Paired => Pairing::Paired,
                        PairingArg::Grid => Pairing::Grid,
                    }),
                },
                format,
            ),
            Command::Spectrum {
                process,
                axis,
                span,
                samples,
            } => commands::spectrum(
                &config,
                &SpectrumOverrides {
                    process: *process,
                    axis: axis.map(|a| match a {
                        AxisArg::Signal => ScanAxis::Signal,
                        AxisArg::Idler => ScanAxis::Idler,
                    }),
                    span_nm: *span,
                    samples: *samples,
                },
                format,
            ),
            Command::Poling { period_1, period_2 } => commands::poling(
                &config,
                &PolingOverrides {
                    period_1_um: *period_1,
                    period_2_um: *period_2,
                },
                format,
            ),
        }
    };
    let output = match cli.parallel {
        Some(0) => return Err(CliError::Config("--parallel must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))?
            .install(execute)?,
        None => execute()?,
    };

    match destination {
        Some(path) => {
            std::fs::write(&path, &output.body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            if let Some(summary) = output.summary {
                print!("{summary}");
            }
        }
        None => {
            std::io::stdout()
                .write_all(output.body.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ppln: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
