use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use subplanck::analysis::Part;
use subplanck::wigner::Axis;
use subplanck::{Convention, Envelope, SumMask, Tier};

#[derive(Parser, Debug)]
#[command(name = "subplanck", version, about = "Cat-state overlap functions and their Bessel limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep the overlap against |δ| at one tier.
    Overlap(OverlapArgs),
    /// Off-diagonal contribution versus n for several |α|.
    Fig1(Fig1Args),
    /// Exact overlap for several n next to J0(2|α||δ|).
    Fig3(Fig3Args),
    /// Wigner function on a grid, with norm and tile-spacing report.
    Wigner(WignerArgs),
    /// First J0 root C and the displacement C/(2|α|).
    Sensitivity(SensitivityArgs),
    /// Asymptotic overlap next to the ring-source coherence.
    Vcz(VczArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    /// Whitespace-separated value matrix (wigner only).
    Matrix,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TierArg {
    Exact,
    Polar,
    Band,
    Diagonal,
    Asymptotic,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Exact => Tier::ExactCartesian,
            TierArg::Polar => Tier::ExactPolar,
            TierArg::Band => Tier::BandApprox,
            TierArg::Diagonal => Tier::DiagonalApprox,
            TierArg::Asymptotic => Tier::Asymptotic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    /// Bare `1/√n` prefactor, not normalized.
    Prefactor,
    /// Divided by the true norm.
    Normalized,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Prefactor => Convention::Prefactor,
            ConventionArg::Normalized => Convention::TrueNormalized,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnvelopeArg {
    Dropped,
    Kept,
}

impl From<EnvelopeArg> for Envelope {
    fn from(e: EnvelopeArg) -> Self {
        match e {
            EnvelopeArg::Dropped => Envelope::Dropped,
            EnvelopeArg::Kept => Envelope::Kept,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    Real,
    Modulus,
    Intensity,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::Real => Part::Real,
            PartArg::Modulus => Part::Modulus,
            PartArg::Intensity => Part::Intensity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    X,
    P,
    Diagonal,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::P => Axis::P,
            AxisArg::Diagonal => Axis::Diagonal,
        }
    }
}

/// `all`, `diagonal`, `off-diagonal` or `band:W`.
pub fn parse_mask(s: &str) -> Result<SumMask, String> {
    match s {
        "all" => Ok(SumMask::All),
        "diagonal" => Ok(SumMask::DiagonalOnly),
        "off-diagonal" => Ok(SumMask::OffDiagonalOnly),
        _ => {
            let w = s
                .strip_prefix("band:")
                .ok_or_else(|| format!("unknown mask {s:?}; expected all, diagonal, off-diagonal or band:W"))?;
            w.parse().map(SumMask::Band).map_err(|_| format!("band width must be an integer, got {w:?}"))
        }
    }
}

#[derive(Args, Debug)]
pub struct StateArgs {
    /// Number of coherent components.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub alpha_mag: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_phase: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Prefactor)]
    pub convention: ConventionArg,
}

#[derive(Args, Debug)]
pub struct DeltaGridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 401)]
    pub delta_steps: usize,
}

#[derive(Args, Debug)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: DeltaGridArgs,
    /// Absolute phase of δ; perpendicular to α when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_phase: Option<f64>,
    #[arg(long, value_enum, default_value_t = TierArg::Exact)]
    pub tier: TierArg,
    /// Index pairs kept in the exact sum: all, diagonal, off-diagonal, band:W.
    #[arg(long, value_parser = parse_mask, default_value = "all")]
    pub mask: SumMask,
    /// Gaussian envelope handling for the diagonal tier.
    #[arg(long, value_enum)]
    pub envelope: Option<EnvelopeArg>,
    #[arg(long, value_enum, default_value_t = PartArg::Real)]
    pub part: PartArg,
    /// Cross-check every point against the number-basis oracle truncated at this size.
    #[arg(long, value_name = "N_MAX")]
    pub oracle: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Fig1Args {
    #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 10.0, 20.0])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Angle of δ relative to α.
    #[arg(long, default_value_t = PI / 2.0, allow_negative_numbers = true)]
    pub delta_angle: f64,
    /// Largest n; defaults to four times the largest |α|.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Level for the reported crossing n*.
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Fig3Args {
    #[arg(long = "n", value_delimiter = ',', default_values_t = vec![4, 6, 8, 16])]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub alpha_mag: f64,
    #[command(flatten)]
    pub grid: DeltaGridArgs,
    #[arg(long, value_enum, default_value_t = PartArg::Real)]
    pub part: PartArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub alpha_mag: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_phase: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Normalized)]
    pub convention: ConventionArg,
    /// Grid bounds default to ±(|α| + 4).
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_max: Option<f64>,
    #[arg(long, default_value_t = 321)]
    pub nx: usize,
    #[arg(long, default_value_t = 321)]
    pub np: usize,
    /// Line through the origin for the tile-spacing report.
    #[arg(long, value_enum, default_value_t = AxisArg::Diagonal)]
    pub axis: AxisArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SensitivityArgs {
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub alpha_mag: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VczArgs {
    /// Ring radius, identified with |α|.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub alpha_mag: f64,
    /// Wavelength; at π both series coincide with J0(2|α|d).
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sep_max: f64,
    #[arg(long, default_value_t = 501)]
    pub sep_steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
