//! Command-line surface. Analysis parameters default to the standard
//! methodology values (20 ms bins, Daubechies 3, 1000 B / 10-packet video
//! heuristic); a TOML config file can restate any of them and flags win
//! over the file.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "wavetrace",
    version,
    about = "Packet-trace analysis: session classification, signaling ratios, \
             wavelet logscale diagrams, stationarity checks, flow ranking, and \
             synthetic fixtures"
)]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalize a capture into canonical packet-record CSV.
    Convert(ConvertArgs),
    /// Volume, duration, and per-direction transport breakdown.
    Summary(SummaryArgs),
    /// Split sessions into video and signaling; report byte ratios.
    Classify(ClassifyArgs),
    /// Video download bitrate implied by volume, ratio, and duration inputs.
    Bitrate(BitrateArgs),
    /// Logscale diagrams for (overall|video) x (upload|download).
    Ldiag(LdiagArgs),
    /// Three-way split stationarity check on one arrival series.
    Stationarity(StationarityArgs),
    /// Rank download flows by bytes and analyze one flow's diagrams.
    Topflows(TopflowsArgs),
    /// Generate seeded synthetic series and packet traces.
    Synth(SynthArgs),
}

/// Packet input plus the monitored-host set pcap decoding needs.
#[derive(Args, Debug)]
pub struct InputArgs {
    /// Packet input: pcap (.pcap/.cap) or canonical record CSV.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Monitored host IPv4 address; repeat for several. Required for pcap
    /// input, ignored for record CSV (direction is already tagged there).
    #[arg(long, value_name = "ADDR")]
    pub monitored: Vec<String>,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Output directory for report artifacts; created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Default)]
pub struct ThresholdArgs {
    /// Minimum IP total length for a packet to count as large (video).
    #[arg(long, value_name = "BYTES")]
    pub large_packet_bytes: Option<u32>,

    /// Large packets needed before a session counts as video.
    #[arg(long, value_name = "COUNT")]
    pub min_large_packets: Option<u32>,
}

#[derive(Args, Debug, Default)]
pub struct SeriesArgs {
    /// Bin width in seconds for arrival counting.
    #[arg(long, value_name = "SECONDS")]
    pub bin_width: Option<f64>,

    /// Daubechies vanishing moments for the wavelet transform.
    #[arg(long, value_name = "COUNT")]
    pub vanishing_moments: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct FitArgs {
    /// Scaling-fit start octave; default picked per diagram.
    #[arg(long, value_name = "OCTAVE")]
    pub j1: Option<usize>,

    /// Scaling-fit end octave; default is the deepest well-populated one.
    #[arg(long, value_name = "OCTAVE")]
    pub j2: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Up,
    Down,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SummaryArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct BitrateArgs {
    /// Two-way trace volume in MiB (2^20 bytes).
    #[arg(long, value_name = "MIB")]
    pub total_mb: f64,

    /// Download share of total bytes, in [0, 1].
    #[arg(long, value_name = "RATIO")]
    pub download_fraction: f64,

    /// Signaling share of download bytes, in [0, 1].
    #[arg(long, value_name = "RATIO")]
    pub signaling_ratio: f64,

    /// Trace duration in seconds.
    #[arg(long, value_name = "SECONDS")]
    pub duration_s: f64,

    /// Known inactive time to subtract from the duration, in seconds.
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    pub dead_time_s: f64,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct LdiagArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["series", "input"])))]
pub struct StationarityArgs {
    /// Pre-binned series CSV (the format synth writes) to split directly.
    #[arg(long, value_name = "FILE")]
    pub series: Option<PathBuf>,

    /// Packet input to bin before splitting; see --direction/--video.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,

    /// Monitored host IPv4 address for pcap input; repeat for several.
    #[arg(long, value_name = "ADDR")]
    pub monitored: Vec<String>,

    /// Direction to analyze when the input is packets.
    #[arg(long, value_enum, default_value_t = DirectionArg::Down)]
    pub direction: DirectionArg,

    /// Analyze video traffic only (after the session heuristic).
    #[arg(long)]
    pub video: bool,

    /// Widening factor for the confidence bands in the agreement test.
    #[arg(long, value_name = "FACTOR")]
    pub widen: Option<f64>,

    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub series_params: SeriesArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct TopflowsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Which download flow to analyze, 1 = biggest by bytes.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub rank: Option<u32>,

    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub fit: FitArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,
}

#[derive(Subcommand, Debug)]
pub enum SynthKind {
    /// Fractional Gaussian noise by circulant embedding (exact covariance).
    Fgn(SynthFgnArgs),
    /// Homogeneous Poisson bin counts.
    Poisson(SynthPoissonArgs),
    /// Square-wave rate-modulated Poisson counts: one periodic component.
    Periodic(SynthPeriodicArgs),
    /// Packet trace rendered from a session-mix TOML blueprint.
    Mix(SynthMixArgs),
}

#[derive(Args, Debug)]
pub struct SynthCommonArgs {
    /// RNG seed; identical seeds reproduce identical output.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Bin width in seconds recorded with the series.
    #[arg(long, value_name = "SECONDS")]
    pub bin_width: Option<f64>,

    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug)]
pub struct SynthFgnArgs {
    /// Series length; must be a power of two.
    #[arg(long, value_name = "LEN")]
    pub n: usize,

    /// Hurst parameter in (0, 1).
    #[arg(long, value_name = "H")]
    pub hurst: f64,

    #[command(flatten)]
    pub common: SynthCommonArgs,
}

#[derive(Args, Debug)]
pub struct SynthPoissonArgs {
    /// Series length.
    #[arg(long, value_name = "LEN")]
    pub n: usize,

    /// Mean arrivals per bin.
    #[arg(long, value_name = "RATE")]
    pub mean: f64,

    #[command(flatten)]
    pub common: SynthCommonArgs,
}

#[derive(Args, Debug)]
pub struct SynthPeriodicArgs {
    /// Series length.
    #[arg(long, value_name = "LEN")]
    pub n: usize,

    /// Square-wave period in bins (>= 2).
    #[arg(long, value_name = "BINS")]
    pub period_bins: usize,

    /// Low-phase arrival rate per bin.
    #[arg(long, value_name = "RATE")]
    pub base: f64,

    /// Extra rate during the high phase.
    #[arg(long, value_name = "RATE")]
    pub amplitude: f64,

    #[command(flatten)]
    pub common: SynthCommonArgs,
}

#[derive(Args, Debug)]
pub struct SynthMixArgs {
    /// Session-mix blueprint (TOML).
    #[arg(long, value_name = "FILE")]
    pub mix_spec: PathBuf,

    /// RNG seed; identical seeds reproduce identical traces.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub out: OutArgs,
}
