//! Packet-trace analysis for P2P video traffic.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`pcap`] / [`record_csv`]: capture files in, canonical packet records
//!    out.
//! 2. [`summary`], [`session`], [`flows`]: volumes, video/signaling
//!    separation, per-peer download ranking.
//! 3. [`timeseries`], [`wavelet`], [`logscale`], [`stationarity`]: binned
//!    arrival counts, wavelet detail pyramid, octave energy diagram with
//!    confidence intervals, scaling estimates, and the three-way split
//!    stationarity check.
//! 4. [`synth`]: seeded generators with known ground truth, the oracle for
//!    everything above.
//!
//! Numeric stages are generic over the scalar type through [`Real`]
//! (`f64` or `f32`); aliases below fix the default `f64` instantiations.
//! Packet-domain types are concrete: a packet record has one shape.

pub mod error;
pub mod flows;
pub mod logscale;
pub mod packet;
pub mod pcap;
pub mod real;
pub mod record_csv;
pub mod session;
pub mod special;
pub mod stationarity;
pub mod summary;
pub mod synth;
pub mod timeseries;
pub mod wavelet;

pub use error::{Error, ErrorClass, Result};
pub use flows::{flow_records, rank_download_flows, FlowSummary};
pub use logscale::{
    choose_fit_range, detect_features, estimate_scaling, logscale_diagram, FeatureConfig,
    FeatureKind, LogscaleDiagram, ScalingEstimate, SpectrumFeature,
};
pub use packet::{Direction, PacketRecord, Transport};
pub use pcap::{read_pcap, Ingest, SkipCounters};
pub use real::Real;
pub use record_csv::{read_records, read_records_path, write_records, write_records_path};
pub use session::{
    classify_sessions, filter_video, group_sessions, signaling_report, video_bitrate, SessionKey,
    SessionLabel, SignalingReport, Thresholds,
};
pub use stationarity::{compare_parts, octave_agreement, split_thirds, StationarityReport};
pub use summary::{summarize, TraceSummary};
pub use synth::{
    gen_fgn, gen_periodic_counts, gen_poisson_counts, gen_session_mix, GroundTruth, Role,
    SessionBlueprint, SessionMixSpec, Timing,
};
pub use timeseries::{bin_counts, read_series_csv, write_series_csv, BinFilter, TimeSeries};
pub use wavelet::{dwt_details, DetailPyramid, Wavelet};

/// Default double-precision instantiations of the numeric pipeline.
pub type TimeSeriesF64 = timeseries::TimeSeries<f64>;
pub type DetailPyramidF64 = wavelet::DetailPyramid<f64>;
pub type LogscaleDiagramF64 = logscale::LogscaleDiagram<f64>;
pub type ScalingEstimateF64 = logscale::ScalingEstimate<f64>;
pub type SpectrumFeatureF64 = logscale::SpectrumFeature<f64>;
pub type StationarityReportF64 = stationarity::StationarityReport<f64>;

/// Single-precision variants for memory-tight batch runs.
pub type TimeSeriesF32 = timeseries::TimeSeries<f32>;
pub type DetailPyramidF32 = wavelet::DetailPyramid<f32>;
pub type LogscaleDiagramF32 = logscale::LogscaleDiagram<f32>;
pub type ScalingEstimateF32 = logscale::ScalingEstimate<f32>;
pub type SpectrumFeatureF32 = logscale::SpectrumFeature<f32>;
pub type StationarityReportF32 = stationarity::StationarityReport<f32>;
