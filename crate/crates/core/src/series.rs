//! Fixed-interval binning of packet streams and the block-mean
//! aggregation operator the variance-time analysis is built on.
//!
//! A binned series counts bytes or packets per interval, with empty
//! bins stored as explicit zeros. Aggregation at level `m` replaces
//! each run of `m` consecutive bins with its arithmetic mean; for
//! self-similar traffic the variance of the aggregated series decays
//! like `m^{-beta}` with `beta = 2 - 2H`, which is what the estimators
//! in [`crate::hurst`] measure.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::TrafficClass;
use crate::ingest::{ActivityPeriod, PacketRecord, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Bytes,
    Packets,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Bytes, Measure::Packets];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Bytes => "bytes",
            Measure::Packets => "packets",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bytes" => Ok(Measure::Bytes),
            "packets" => Ok(Measure::Packets),
            other => Err(format!("unknown measure {other:?} (expected bytes|packets)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("no records to bin")]
    EmptyInput,
    #[error("bin origin {t0} is after the first record at {first}")]
    StartAfterFirst { t0: Timestamp, first: Timestamp },
    #[error("bin interval must be positive")]
    ZeroInterval,
    #[error("aggregation level must be at least 1")]
    LevelZero,
    #[error("aggregation level {m} exceeds series length {len}")]
    BlockTooLarge { m: usize, len: usize },
    #[error("series too short: need {need}, got {got}")]
    TooShort { need: usize, got: usize },
}

/// Bytes or packets per fixed interval for one slice of the traffic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    pub interval_ms: u64,
    /// Timestamp of the left edge of bin 0.
    pub t0: Timestamp,
    pub measure: Measure,
    pub class_id: Option<TrafficClass>,
    pub activity: Option<ActivityPeriod>,
    pub values: Vec<f64>,
}

impl BinnedSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Block means of a base series at one aggregation level.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSeries {
    pub m: usize,
    /// Length of the series the blocks were cut from.
    pub base_len: usize,
    pub values: Vec<f64>,
}

fn measure_value(r: &PacketRecord, measure: Measure) -> f64 {
    match measure {
        Measure::Bytes => f64::from(r.length),
        Measure::Packets => 1.0,
    }
}

/// Bins records into fixed intervals starting at `t0`, covering
/// through the bin of the last record. Records need not be sorted.
pub fn bin_series(
    records: &[PacketRecord],
    interval_ms: u64,
    measure: Measure,
    t0: Timestamp,
    class_id: Option<TrafficClass>,
) -> Result<BinnedSeries, SeriesError> {
    if interval_ms == 0 {
        return Err(SeriesError::ZeroInterval);
    }
    if records.is_empty() {
        return Err(SeriesError::EmptyInput);
    }
    let interval_us = interval_ms * 1000;
    let mut min_ts = records[0].ts;
    let mut max_ts = records[0].ts;
    for r in records {
        min_ts = min_ts.min(r.ts);
        max_ts = max_ts.max(r.ts);
    }
    if t0 > min_ts {
        return Err(SeriesError::StartAfterFirst { t0, first: min_ts });
    }
    let n_bins = (max_ts.as_micros() - t0.as_micros()) / interval_us + 1;
    let mut values = vec![0.0; n_bins as usize];
    for r in records {
        let idx = (r.ts.as_micros() - t0.as_micros()) / interval_us;
        values[idx as usize] += measure_value(r, measure);
    }
    Ok(BinnedSeries {
        interval_ms,
        t0,
        measure,
        class_id,
        activity: None,
        values,
    })
}

/// Bins records into an exact, pre-sized span of `n_bins` intervals.
/// Records outside `[t0, t0 + n_bins * interval)` are ignored, so a
/// span with no traffic comes back as all zeros.
pub fn bin_series_span(
    records: &[PacketRecord],
    interval_ms: u64,
    measure: Measure,
    t0: Timestamp,
    n_bins: usize,
    class_id: Option<TrafficClass>,
) -> Result<BinnedSeries, SeriesError> {
    if interval_ms == 0 {
        return Err(SeriesError::ZeroInterval);
    }
    if n_bins == 0 {
        return Err(SeriesError::EmptyInput);
    }
    let interval_us = interval_ms * 1000;
    let start = t0.as_micros();
    let end = start + interval_us * n_bins as u64;
    let mut values = vec![0.0; n_bins];
    for r in records {
        let ts = r.ts.as_micros();
        if ts < start || ts >= end {
            continue;
        }
        values[((ts - start) / interval_us) as usize] += measure_value(r, measure);
    }
    Ok(BinnedSeries {
        interval_ms,
        t0,
        measure,
        class_id,
        activity: None,
        values,
    })
}

/// Non-overlapping block means at level `m`; the trailing `len mod m`
/// values are discarded so every output value is an exact m-mean.
pub fn aggregate_level(values: &[f64], m: usize) -> Result<AggregatedSeries, SeriesError> {
    if m == 0 {
        return Err(SeriesError::LevelZero);
    }
    if m > values.len() {
        return Err(SeriesError::BlockTooLarge { m, len: values.len() });
    }
    let blocks = values.len() / m;
    let inv_m = 1.0 / m as f64;
    let mut out = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let sum: f64 = values[b * m..(b + 1) * m].iter().sum();
        out.push(sum * inv_m);
    }
    Ok(AggregatedSeries {
        m,
        base_len: values.len(),
        values: out,
    })
}

/// Mean and population (1/n) variance. The variance-time plot compares
/// variances across aggregation levels, so a consistent normalization
/// matters more than unbiasedness here.
pub fn sample_mean_var(values: &[f64]) -> Result<(f64, f64), SeriesError> {
    if values.len() < 2 {
        return Err(SeriesError::TooShort { need: 2, got: values.len() });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok((mean, var))
}

/// Writes `bin_index,value` rows preceded by a metadata comment (and an
/// optional extra comment, e.g. generator parameters).
pub fn write_series_csv<W: Write>(
    series: &BinnedSeries,
    extra_comment: Option<&str>,
    out: &mut W,
) -> io::Result<()> {
    let class = series
        .class_id
        .map(|c| c.id().to_string())
        .unwrap_or_default();
    writeln!(
        out,
        "# interval_ms={},measure={},class={},t0={}",
        series.interval_ms, series.measure, class, series.t0
    )?;
    if let Some(extra) = extra_comment {
        writeln!(out, "# {extra}")?;
    }
    writeln!(out, "bin_index,value")?;
    for (i, v) in series.values.iter().enumerate() {
        writeln!(out, "{i},{v}")?;
    }
    Ok(())
}
