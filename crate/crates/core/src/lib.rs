//! Long-range dependence analysis for packet traffic.
//!
//! The crate turns raw captures (pcap or a plain-text packet log) into
//! per-class packet and byte time series, then quantifies how bursty
//! those series stay under aggregation by estimating their Hurst
//! exponent with four classical estimators: variance-time, rescaled
//! range, log-periodogram regression, and the Whittle likelihood.
//!
//! Pipeline stages, each usable on its own:
//!
//! * [`ingest`] - pcap and text-log readers producing [`ingest::PacketRecord`]s
//! * [`classify`] - a six-class port/protocol traffic classifier
//! * [`series`] - fixed-interval binning and block aggregation
//! * [`hurst`] - Hurst exponent estimators and autocovariance tools
//! * [`synth`] - exact fractional Gaussian noise for calibration
//! * [`calibrate`] - estimator error sweeps over a grid of true H values
//! * [`report`] - volume / H-distribution / activity percentage tables
//! * [`pipeline`] - the end-to-end analysis run

pub mod calibrate;
pub mod classify;
#[doc(hidden)]
pub mod fixtures;
pub mod hurst;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod synth;
