use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Sideband-cooling spectra, calibration and analysis")]
pub struct Cli {
    /// Output directory for data files and the run manifest.
    #[arg(long, global = true, env = "OPTOMECH_OUT", default_value = "optomech-out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model the intensity or displacement spectrum at one or more powers.
    Spectrum(SpectrumArgs),
    /// Occupation versus intracavity photon number or damping rate.
    Sweep(SweepArgs),
    /// Determine the optomechanical coupling G.
    Calibrate(CalibrateArgs),
    /// Scan the membrane through one standing-wave period.
    CavityScan(CavityScanArgs),
    /// Compare the analytic spectra with the stochastic time-domain oracle.
    Validate(ValidateArgs),
    /// Fit a Lorentzian to a measured spectrum.
    Fit(FitArgs),
    /// Remove cavity-frequency noise from a measured intensity spectrum.
    Deconvolve(DeconvolveArgs),
    /// Write noise-free synthetic data sets derived from a configuration.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Device {
    #[value(name = "device-1")]
    One,
    #[value(name = "device-2")]
    Two,
}

#[derive(Debug, Clone, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct ConfigSource {
    /// TOML configuration file.
    #[arg(long, group = "source")]
    pub config: Option<PathBuf>,
    /// One of the shipped device configurations.
    #[arg(long, group = "source")]
    pub device: Option<Device>,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[command(flatten)]
    pub source: ConfigSource,
    /// Override a configuration value, e.g. `--set drive.photon_number=1e6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Intensity,
    Displacement,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value = "intensity")]
    pub quantity: QuantityArg,
    /// `auto`, or `LO_HZ:HI_HZ:POINTS` for a uniform grid.
    #[arg(long, default_value = "auto")]
    pub grid: String,
    /// Comma-separated photon numbers; defaults to the configured one.
    #[arg(long, value_delimiter = ',')]
    pub photon_numbers: Vec<f64>,
    /// Write every contribution as its own column.
    #[arg(long)]
    pub decompose: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Photon numbers as `LO:HI:COUNT` (log-spaced) or a comma list.
    #[arg(long, conflicts_with = "gamma_list")]
    pub photon_numbers: Option<String>,
    /// Comma-separated total damping rates Γ/2π in Hz.
    #[arg(long, value_delimiter = ',')]
    pub gamma_list: Vec<f64>,
    /// Also report the sweep minimum for Q factors `LO:HI:COUNT` (log-spaced).
    #[arg(long)]
    pub q_range: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Thermal,
    Geometric,
    Damping,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    /// Thermal series index (JSON written by `synth`); defaults to the built-in device-1 series.
    #[arg(long)]
    pub thermal_series: Option<PathBuf>,
    /// Damping data CSV with columns photocurrent_a, gamma_hz; defaults to the built-in device-1 series.
    #[arg(long)]
    pub damping_data: Option<PathBuf>,
    /// Overlap factor used by the geometric method instead of the computed one.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CavityScanArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Samples over one half-wavelength; defaults to the configured count.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Thermal,
    Backaction,
    CavityNoise,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of independent ensemble members.
    #[arg(long, default_value_t = 100)]
    pub ensemble: usize,
    /// Periodogram segments per member.
    #[arg(long, default_value_t = 2)]
    pub segments: usize,
    /// Noise sources to validate, each on its own.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "thermal,backaction,cavity-noise")]
    pub sources: Vec<SourceArg>,
    /// Also write the raw record of member 0 with this many samples.
    #[arg(long)]
    pub dump_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Uniform,
    Relative,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Spectrum CSV as written by this tool, or raw `freq_hz,value` columns.
    #[arg(long)]
    pub data: PathBuf,
    /// Fit window `LO_HZ:HI_HZ`.
    #[arg(long)]
    pub window: String,
    #[arg(long, value_enum, default_value = "uniform")]
    pub weighting: WeightingArg,
    /// Quantity of a raw two-column file that does not declare one.
    #[arg(long, value_enum)]
    pub quantity: Option<QuantityArg>,
    /// Configuration for converting intensity data to displacement and area to occupation.
    #[command(flatten)]
    pub config: OptionalConfigArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptionalConfigArgs {
    #[arg(long, conflicts_with = "device")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub device: Option<Device>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DeconvolveArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Measured one-sided S_I/Ī² spectrum.
    #[arg(long)]
    pub data: PathBuf,
    /// Fit window `LO_HZ:HI_HZ`.
    #[arg(long)]
    pub window: String,
    /// Tabulated S_i/Ī² to use instead of the configured cavity noise.
    #[arg(long)]
    pub noise: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Photon numbers `LO:HI:COUNT` (log-spaced) for the calibration series.
    #[arg(long, default_value = "3e5:6e6:6")]
    pub photon_numbers: String,
}
