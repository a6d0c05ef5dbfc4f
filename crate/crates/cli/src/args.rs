use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussent::ensemble::{Validation, DEFAULT_BINS};
use gaussent::scan::EnergyScale;
use gaussent::{CanonicalConfig, LogBase, Measure, MicrocanonicalConfig};

#[derive(Debug, Parser)]
#[command(
    name = "gaussent",
    version,
    about = "Entanglement statistics of random pure Gaussian states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw an ensemble and summarise the entropy of the first m modes.
    Sample(SampleArgs),
    /// Scan var(S)/mean(S) over the number of modes.
    ScanConcentration(ConcentrationArgs),
    /// Scan the entropy over subsystem sizes.
    ScanMdep(MdepArgs),
    /// Bin the entropies of a per-sample CSV file.
    Histogram(HistogramArgs),
    /// Evaluate a closed-form expression.
    Analytics(AnalyticsArgs),
    /// Linear-programming bounds on the micro-canonical mean entropy of one mode.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Microcanonical,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

impl From<Base> for LogBase {
    fn from(b: Base) -> Self {
        match b {
            Base::Two => LogBase::Two,
            Base::E => LogBase::E,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Logarithm base of entropies.
    #[arg(long, value_enum, default_value = "2")]
    pub log_base: Base,
    /// Output file; results go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureKind,
    /// Total number of modes.
    #[arg(long)]
    pub n: usize,
    /// Modes in the reduced subsystem.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Total energy cap (micro-canonical), in units of ħω/4.
    #[arg(long, conflicts_with = "temperature")]
    pub energy: Option<f64>,
    /// Temperature (canonical).
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Audit every sample instead of every hundredth.
    #[arg(long)]
    pub validate_all: bool,
    #[command(flatten)]
    pub common: Common,
}

impl SampleArgs {
    pub fn measure(&self) -> gaussent::Result<Measure> {
        measure(self.measure, self.n, self.energy, self.temperature)
    }

    pub fn validation(&self) -> Validation {
        if self.validate_all {
            Validation::All
        } else {
            Validation::Spot
        }
    }
}

pub fn measure(
    kind: MeasureKind,
    n: usize,
    energy: Option<f64>,
    temperature: Option<f64>,
) -> gaussent::Result<Measure> {
    match (kind, energy, temperature) {
        (MeasureKind::Microcanonical, Some(e), None) => {
            Ok(Measure::Microcanonical(MicrocanonicalConfig::new(n, e)?))
        }
        (MeasureKind::Canonical, None, Some(t)) => {
            Ok(Measure::Canonical(CanonicalConfig::new(n, t)?))
        }
        (MeasureKind::Microcanonical, _, _) => Err(gaussent::Error::InvalidArgument(
            "the micro-canonical measure needs --energy (and no --temperature)".into(),
        )),
        (MeasureKind::Canonical, _, _) => Err(gaussent::Error::InvalidArgument(
            "the canonical measure needs --temperature (and no --energy)".into(),
        )),
    }
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureKind,
    /// Energy cap per mode, E/n (micro-canonical).
    #[arg(long, conflicts_with = "temperature")]
    pub energy_per_mode: Option<f64>,
    /// Temperature (canonical).
    #[arg(long)]
    pub temperature: Option<f64>,
}

impl ScaleArgs {
    pub fn scale(&self) -> gaussent::Result<EnergyScale> {
        match (self.measure, self.energy_per_mode, self.temperature) {
            (MeasureKind::Microcanonical, Some(e), None) => {
                Ok(EnergyScale::Microcanonical { energy_per_mode: e })
            }
            (MeasureKind::Canonical, None, Some(t)) => {
                Ok(EnergyScale::Canonical { temperature: t })
            }
            (MeasureKind::Microcanonical, _, _) => Err(gaussent::Error::InvalidArgument(
                "the micro-canonical measure needs --energy-per-mode".into(),
            )),
            (MeasureKind::Canonical, _, _) => Err(gaussent::Error::InvalidArgument(
                "the canonical measure needs --temperature".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct ConcentrationArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Fixed subsystem size.
    #[arg(long, conflicts_with = "m_fraction")]
    pub m: Option<usize>,
    /// Subsystem size as a fraction of n.
    #[arg(long)]
    pub m_fraction: Option<f64>,
    #[arg(long, default_value_t = 1500)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MdepArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma-separated subsystem sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 5000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    /// Per-sample CSV written by `sample`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Upper edge of the range; defaults to the maximal entropy recorded in
    /// the input's JSON sidecar, else the largest sampled entropy.
    #[arg(long)]
    pub s_max: Option<f64>,
    /// Output file; results go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    /// Page's mean entropy of an m x n bipartition (nats).
    Page,
    /// Haar moments of μ⁻² at fixed energies (--energies).
    Haar,
    /// Canonical moments of μ⁻² (--n, --temperature).
    Canonical,
    /// Micro-canonical moments of μ⁻² (--n, --energy).
    Microcanonical,
    /// Largest μ⁻² of one mode (--n, --energy).
    MaxInvPurity,
    /// Largest entropy of m out of n modes (--m, --n, --energy).
    MaxEntropy,
    /// m·h(1 + T/2) (--m, --temperature).
    AsymptoticEntropy,
    /// C(m,d)(1 + T/2)^{2d} (--d, --m, --temperature).
    AsymptoticInvariant,
    /// h(1/μ) (--mu).
    EntropyFromPurity,
    /// The entropic function h(x) (--x).
    H,
}

#[derive(Debug, Args)]
pub struct AnalyticsArgs {
    #[arg(long, value_enum)]
    pub formula: Formula,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    /// Comma-separated per-mode energies.
    #[arg(long, value_delimiter = ',')]
    pub energies: Vec<f64>,
    #[arg(long, value_enum, default_value = "2")]
    pub log_base: Base,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Total number of modes (n > 2).
    #[arg(long)]
    pub n: usize,
    /// Total energy cap.
    #[arg(long)]
    pub energy: f64,
    /// Number of bins M.
    #[arg(long = "bins", short = 'M', default_value_t = 10_000)]
    pub bins: usize,
    #[arg(long, value_enum, default_value = "2")]
    pub log_base: Base,
}
