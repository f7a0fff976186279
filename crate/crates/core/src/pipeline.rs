//! End-to-end orchestration: ingest → classify → one-hour samples →
//! multi-interval binning → Hurst estimation → summary reports.
//!
//! Sample windows are aligned to local clock hours (shifted by the
//! configured UTC offset). A partial first or last hour is analyzed
//! when the capture covers at least 30 minutes of it, otherwise the
//! window is skipped with a warning. Within a window, bins are
//! anchored to the window grid and trimmed to whole bins inside the
//! captured span, so a capture that starts mid-bin never manufactures
//! artificial zero bins.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify_stream, RuleSet, TrafficClass};
use crate::hurst::{bucket_h, estimate, HurstEstimate, Method};
use crate::ingest::log::{parse_packet_log, LogError};
use crate::ingest::pcap::{is_pcap_prefix, parse_pcap, PcapError};
use crate::ingest::{period_for_hour, ActivityPeriod, IngestStats, PacketRecord, Timestamp};
use crate::report::{
    activity_report, hurst_distribution_report, volume_report, ActivityReport,
    HurstDistributionReport, SampleSummary, VolumeReport,
};
use crate::series::{bin_series_span, Measure};

const HOUR_US: i64 = 3_600_000_000;
const MIN_WINDOW_OVERLAP_US: i64 = 1_800_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Pcap,
    Log,
    /// Decide per file from the leading bytes.
    Auto,
}

impl std::str::FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pcap" => Ok(InputFormat::Pcap),
            "log" => Ok(InputFormat::Log),
            "auto" => Ok(InputFormat::Auto),
            other => Err(format!("unknown format {other:?} (expected pcap|log|auto)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureSelection {
    Bytes,
    Packets,
    Both,
}

impl MeasureSelection {
    pub fn measures(self) -> &'static [Measure] {
        match self {
            MeasureSelection::Bytes => &[Measure::Bytes],
            MeasureSelection::Packets => &[Measure::Packets],
            MeasureSelection::Both => &[Measure::Bytes, Measure::Packets],
        }
    }
}

impl std::str::FromStr for MeasureSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bytes" => Ok(MeasureSelection::Bytes),
            "packets" => Ok(MeasureSelection::Packets),
            "both" => Ok(MeasureSelection::Both),
            other => Err(format!(
                "unknown measure {other:?} (expected bytes|packets|both)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeConfig {
    pub rules: RuleSet,
    pub intervals_ms: Vec<u64>,
    pub methods: Vec<Method>,
    pub measure: MeasureSelection,
    pub utc_offset_minutes: i32,
    pub format: InputFormat,
}

impl AnalyzeConfig {
    /// Hour samples at 100 ms / 500 ms / 1 s / 10 s, every estimator,
    /// both measures, UTC clock.
    pub fn new(rules: RuleSet) -> AnalyzeConfig {
        AnalyzeConfig {
            rules,
            intervals_ms: vec![100, 500, 1000, 10_000],
            methods: Method::ALL.to_vec(),
            measure: MeasureSelection::Both,
            utc_offset_minutes: 0,
            format: InputFormat::Auto,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.intervals_ms.is_empty() {
            return Err(PipelineError::InvalidConfig("no bin intervals".into()));
        }
        if self.intervals_ms.contains(&0) {
            return Err(PipelineError::InvalidConfig("zero bin interval".into()));
        }
        if self.intervals_ms.iter().any(|&i| i > 3_600_000) {
            return Err(PipelineError::InvalidConfig(
                "bin interval exceeds the one-hour sample window".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(PipelineError::InvalidConfig("no estimation methods".into()));
        }
        if self.utc_offset_minutes.abs() > 24 * 60 {
            return Err(PipelineError::InvalidConfig(
                "utc offset beyond one day".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no input files given")]
    NoInputs,
    #[error("no packet records in input")]
    NoData,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Pcap { path: PathBuf, source: PcapError },
    #[error("{path}: {source}")]
    Log { path: PathBuf, source: LogError },
}

/// Key plus result for one (class, window, interval, measure) series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEstimate {
    pub class_id: u8,
    /// Window start in UTC seconds (may precede the capture for a
    /// partial edge hour).
    pub window_start_utc: i64,
    pub activity: ActivityPeriod,
    pub interval_ms: u64,
    pub measure: Measure,
    pub bins: usize,
    /// Class bytes inside the window; the volume weight for reports.
    pub window_bytes: u64,
    pub estimates: Vec<HurstEstimate>,
}

/// A series that produced no estimate, and why. `method` is `None`
/// when the whole series was unusable (e.g. no traffic at all).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSample {
    pub class_id: u8,
    pub window_start_utc: i64,
    pub interval_ms: u64,
    pub measure: Measure,
    pub method: Option<Method>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub rules_version: String,
    pub intervals_ms: Vec<u64>,
    pub methods: Vec<Method>,
    pub measures: Vec<Measure>,
    pub utc_offset_minutes: i32,
}

/// Everything one analysis produced, serializable as the run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRun {
    pub config: RunConfig,
    pub stats: IngestStats,
    pub volume: VolumeReport,
    /// `None` when no hour sample produced a usable estimate.
    pub distribution: Option<HurstDistributionReport>,
    pub activity: Option<ActivityReport>,
    pub samples: Vec<SampleEstimate>,
    pub skipped: Vec<SkippedSample>,
    pub warnings: Vec<String>,
    /// Fixed methodological notes (period definitions, bucketing
    /// choices) that explain how to read the reports.
    pub notes: Vec<String>,
}

impl AnalysisRun {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("run serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<AnalysisRun, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn load_file(path: &Path, format: InputFormat) -> Result<(Vec<PacketRecord>, IngestStats), PipelineError> {
    let bytes = fs::read(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let use_pcap = match format {
        InputFormat::Pcap => true,
        InputFormat::Log => false,
        InputFormat::Auto => is_pcap_prefix(&bytes),
    };
    if use_pcap {
        parse_pcap(Cursor::new(bytes)).map_err(|source| PipelineError::Pcap {
            path: path.to_path_buf(),
            source,
        })
    } else {
        parse_packet_log(bytes.as_slice()).map_err(|source| PipelineError::Log {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Loads every input (pcap or canonical log) and merges the records
/// and counters.
pub fn load_inputs(
    paths: &[PathBuf],
    format: InputFormat,
) -> Result<(Vec<PacketRecord>, IngestStats), PipelineError> {
    if paths.is_empty() {
        return Err(PipelineError::NoInputs);
    }
    let mut records = Vec::new();
    let mut stats = IngestStats::default();
    for path in paths {
        let (mut r, s) = load_file(path, format)?;
        records.append(&mut r);
        stats.merge(&s);
    }
    Ok((records, stats))
}

/// Full pipeline over capture files.
pub fn run_analysis(paths: &[PathBuf], config: &AnalyzeConfig) -> Result<AnalysisRun, PipelineError> {
    let (records, stats) = load_inputs(paths, config.format)?;
    analyze_records(records, stats, config)
}

/// Full pipeline over already-parsed records.
pub fn analyze_records(
    records: Vec<PacketRecord>,
    stats: IngestStats,
    config: &AnalyzeConfig,
) -> Result<AnalysisRun, PipelineError> {
    config.validate()?;
    if records.is_empty() {
        return Err(PipelineError::NoData);
    }

    let mut intervals = config.intervals_ms.clone();
    intervals.sort_unstable();
    intervals.dedup();
    let mut methods = Vec::new();
    for &m in &config.methods {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let measures = config.measure.measures();

    let mut split = classify_stream(records, &config.rules);
    let volume = volume_report(&split.counters).map_err(|_| PipelineError::NoData)?;
    for class_records in &mut split.per_class {
        class_records.sort_by_key(|r| r.ts);
    }

    let first_us = stats.first_ts.expect("records nonempty").as_micros() as i64;
    let last_us = stats.last_ts.expect("records nonempty").as_micros() as i64;
    let off_us = i64::from(config.utc_offset_minutes) * 60_000_000;
    let first_hour = (first_us + off_us).div_euclid(HOUR_US);
    let last_hour = (last_us + off_us).div_euclid(HOUR_US);

    let mut samples: Vec<SampleEstimate> = Vec::new();
    let mut skipped: Vec<SkippedSample> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    for hour_idx in first_hour..=last_hour {
        let w_start = hour_idx * HOUR_US - off_us;
        let w_end = w_start + HOUR_US;
        let covered_lo = w_start.max(first_us);
        let covered_hi = w_end.min(last_us + 1);
        if covered_hi - covered_lo < MIN_WINDOW_OVERLAP_US {
            warnings.push(format!(
                "skipped partial hour window starting at {}s UTC: only {}s of capture",
                w_start / 1_000_000,
                (covered_hi - covered_lo).max(0) / 1_000_000
            ));
            continue;
        }
        let activity = period_for_hour(hour_idx.rem_euclid(24) as u32);

        for &class in &TrafficClass::ALL {
            let class_records = &split.per_class[class.idx()];
            let lo = class_records.partition_point(|r| (r.ts.as_micros() as i64) < w_start);
            let hi = class_records.partition_point(|r| (r.ts.as_micros() as i64) < w_end);
            let slice = &class_records[lo..hi];
            let window_bytes: u64 = slice.iter().map(|r| u64::from(r.length)).sum();

            for &interval_ms in &intervals {
                let iv_us = interval_ms as i64 * 1000;
                let j_lo = (covered_lo - w_start).div_euclid(iv_us)
                    + i64::from((covered_lo - w_start).rem_euclid(iv_us) != 0);
                let j_hi = (covered_hi - w_start).div_euclid(iv_us);
                let n_bins = j_hi - j_lo;

                for &measure in measures {
                    if slice.is_empty() {
                        skipped.push(SkippedSample {
                            class_id: class.id(),
                            window_start_utc: w_start / 1_000_000,
                            interval_ms,
                            measure,
                            method: None,
                            reason: "no traffic in window".into(),
                        });
                        continue;
                    }
                    if n_bins <= 0 {
                        skipped.push(SkippedSample {
                            class_id: class.id(),
                            window_start_utc: w_start / 1_000_000,
                            interval_ms,
                            measure,
                            method: None,
                            reason: "no complete bins in window".into(),
                        });
                        continue;
                    }
                    let t0 = Timestamp::from_micros((w_start + j_lo * iv_us) as u64);
                    let series = bin_series_span(
                        slice,
                        interval_ms,
                        measure,
                        t0,
                        n_bins as usize,
                        Some(class),
                    )
                    .expect("validated interval and bin count");

                    let mut estimates = Vec::new();
                    for &method in &methods {
                        match estimate(method, &series.values) {
                            Ok(est) => estimates.push(est),
                            Err(err) => skipped.push(SkippedSample {
                                class_id: class.id(),
                                window_start_utc: w_start / 1_000_000,
                                interval_ms,
                                measure,
                                method: Some(method),
                                reason: err.to_string(),
                            }),
                        }
                    }
                    if !estimates.is_empty() {
                        samples.push(SampleEstimate {
                            class_id: class.id(),
                            window_start_utc: w_start / 1_000_000,
                            activity,
                            interval_ms,
                            measure,
                            bins: n_bins as usize,
                            window_bytes,
                            estimates,
                        });
                    }
                }
            }
        }
    }

    samples.sort_by(|a, b| {
        (a.class_id, a.window_start_utc, a.interval_ms, a.measure.name())
            .cmp(&(b.class_id, b.window_start_utc, b.interval_ms, b.measure.name()))
    });
    skipped.sort_by(|a, b| {
        let ka = (a.class_id, a.window_start_utc, a.interval_ms, a.measure.name());
        let kb = (b.class_id, b.window_start_utc, b.interval_ms, b.measure.name());
        ka.cmp(&kb).then_with(|| a.method.cmp(&b.method))
    });

    // One report sample per (class, window): the bucketing estimator at
    // the finest interval, preferring the bytes series.
    let bucket_measure = if measures.contains(&Measure::Bytes) {
        Measure::Bytes
    } else {
        Measure::Packets
    };
    let bucket_method = if methods.contains(&Method::VarianceTime) {
        Method::VarianceTime
    } else {
        methods[0]
    };
    let finest = intervals[0];
    let mut summaries: Vec<SampleSummary> = Vec::new();
    for s in &samples {
        if s.interval_ms != finest || s.measure != bucket_measure {
            continue;
        }
        let Some(est) = s.estimates.iter().find(|e| e.method == bucket_method) else {
            continue;
        };
        summaries.push(SampleSummary {
            class: TrafficClass::from_id(s.class_id).expect("valid id"),
            activity: s.activity,
            h: est.h,
            bytes: s.window_bytes,
        });
        // Cross-check: does the packet-count series land in the same
        // bucket as the byte series?
        if measures.len() == 2 && bucket_measure == Measure::Bytes {
            let other = samples.iter().find(|o| {
                o.class_id == s.class_id
                    && o.window_start_utc == s.window_start_utc
                    && o.interval_ms == finest
                    && o.measure == Measure::Packets
            });
            if let Some(other_est) =
                other.and_then(|o| o.estimates.iter().find(|e| e.method == bucket_method))
            {
                if bucket_h(other_est.h) != bucket_h(est.h) {
                    warnings.push(format!(
                        "class {} window {}s: byte and packet series disagree on the H bucket ({} vs {})",
                        s.class_id,
                        s.window_start_utc,
                        bucket_h(est.h).label(),
                        bucket_h(other_est.h).label(),
                    ));
                }
            }
        }
    }

    let (distribution, activity) = if summaries.is_empty() {
        warnings.push("no hour sample produced a usable estimate".into());
        (None, None)
    } else {
        (
            Some(hurst_distribution_report(&summaries).expect("nonempty")),
            Some(activity_report(&summaries).expect("nonempty")),
        )
    };

    Ok(AnalysisRun {
        config: RunConfig {
            rules_version: config.rules.version.clone(),
            intervals_ms: intervals,
            methods: methods.clone(),
            measures: measures.to_vec(),
            utc_offset_minutes: config.utc_offset_minutes,
        },
        stats,
        volume,
        distribution,
        activity,
        samples,
        skipped,
        warnings,
        notes: vec![
            "activity periods (local): Low 20-08, Medium 08-10 and 13-17, High 10-13 and 17-20; the 13-15 block is taken as Medium".into(),
            format!(
                "distribution and activity tables bucket each (class, hour) by the {} estimate of the {} ms {} series; other estimates are in `samples`",
                bucket_method, finest, bucket_measure
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::RuleSet;
    use std::net::IpAddr;

    fn packet(ts: Timestamp, dst_port: u16, length: u32) -> PacketRecord {
        PacketRecord {
            ts,
            src_addr: IpAddr::from([192, 168, 0, 10]),
            dst_addr: IpAddr::from([10, 1, 2, 3]),
            ip_proto: 6,
            src_port: 42_000,
            dst_port,
            length,
            dscp: 0,
        }
    }

    fn stats_for(records: &[PacketRecord]) -> IngestStats {
        let mut stats = IngestStats::default();
        for r in records {
            // Reuse the ingest bookkeeping path.
            stats.merge(&IngestStats {
                packets_parsed: 1,
                bytes_total: u64::from(r.length),
                first_ts: Some(r.ts),
                last_ts: Some(r.ts),
                ..Default::default()
            });
        }
        stats
    }

    fn fast_config() -> AnalyzeConfig {
        let mut config = AnalyzeConfig::new(RuleSet::default_rules());
        config.intervals_ms = vec![1000];
        config.methods = vec![Method::VarianceTime];
        config.measure = MeasureSelection::Bytes;
        config
    }

    /// Deterministic but non-constant packet size, so one-second bins
    /// keep a usable variance.
    fn varied_len(i: u64) -> u32 {
        200 + (i % 7) as u32 * 130 + (i % 13) as u32 * 17
    }

    /// One port-80 packet per second over [start, end) seconds.
    fn web_capture_span(start: u64, end: u64) -> Vec<PacketRecord> {
        (start..end)
            .map(|i| packet(Timestamp::from_secs(i), 80, varied_len(i)))
            .collect()
    }

    /// Two hours of one-packet-per-second port-80 traffic.
    fn web_capture() -> Vec<PacketRecord> {
        web_capture_span(0, 7200)
    }

    #[test]
    fn single_class_capture_owns_the_volume_table() {
        let records = web_capture();
        let stats = stats_for(&records);
        let run = analyze_records(records, stats, &fast_config()).unwrap();
        assert_eq!(run.volume.rows[2].bytes_pct, 100.0);
        assert_eq!(run.volume.rows[2].packets_pct, 100.0);
        for idx in [0, 1, 3, 4, 5] {
            assert_eq!(run.volume.rows[idx].bytes_pct, 0.0);
        }
        // Two full hour windows, each with a class-3 sample.
        let class3: Vec<_> = run.samples.iter().filter(|s| s.class_id == 3).collect();
        assert_eq!(class3.len(), 2);
        assert_eq!(class3[0].window_start_utc, 0);
        assert_eq!(class3[1].window_start_utc, 3600);
        assert_eq!(class3[0].bins, 3600);
        let dist = run.distribution.as_ref().unwrap();
        assert_eq!(dist.rows[2].samples, 2);
        // The five silent classes are recorded as skipped, not lost.
        assert!(run
            .skipped
            .iter()
            .any(|s| s.class_id == 1 && s.reason == "no traffic in window"));
    }

    #[test]
    fn empty_capture_is_no_data() {
        let err = analyze_records(Vec::new(), IngestStats::default(), &fast_config());
        assert!(matches!(err.unwrap_err(), PipelineError::NoData));
    }

    #[test]
    fn edge_windows_need_thirty_minutes() {
        // 02:29 to 05:45 — the leading 31 min and trailing 45 min
        // windows qualify; nothing is skipped for coverage.
        let records = web_capture_span(8940, 20_700);
        let stats = stats_for(&records);
        let run = analyze_records(records, stats, &fast_config()).unwrap();
        let windows: Vec<i64> = run
            .samples
            .iter()
            .filter(|s| s.class_id == 3)
            .map(|s| s.window_start_utc)
            .collect();
        assert_eq!(windows, vec![7200, 10_800, 14_400, 18_000]);
        assert!(run.warnings.iter().all(|w| !w.starts_with("skipped")));
        // The partial leading window only gets its covered bins.
        assert_eq!(run.samples[0].bins, 3600 - 29 * 60);

        // 02:46 start: the leading window has 14 min and is skipped.
        let records = web_capture_span(9960, 20_700);
        let stats = stats_for(&records);
        let run = analyze_records(records, stats, &fast_config()).unwrap();
        let windows: Vec<i64> = run
            .samples
            .iter()
            .filter(|s| s.class_id == 3)
            .map(|s| s.window_start_utc)
            .collect();
        assert_eq!(windows, vec![10_800, 14_400, 18_000]);
        assert!(run
            .warnings
            .iter()
            .any(|w| w.contains("skipped partial hour window starting at 7200s")));
    }

    #[test]
    fn utc_offset_shifts_window_boundaries_and_periods() {
        // 00:30-02:20 UTC at +60 min = 01:30-03:20 local: hour 1 is a
        // 30-min edge (kept), hour 2 full, hour 3 a 20-min edge
        // (skipped).
        let records = web_capture_span(1800, 8400);
        let stats = stats_for(&records);
        let mut config = fast_config();
        config.utc_offset_minutes = 60;
        let run = analyze_records(records, stats, &config).unwrap();
        let windows: Vec<i64> = run
            .samples
            .iter()
            .filter(|s| s.class_id == 3)
            .map(|s| s.window_start_utc)
            .collect();
        // Local hours 1 and 2 start at UTC 00:00 and 01:00.
        assert_eq!(windows, vec![0, 3600]);
        // Local hours 1-2 are in the Low period.
        assert!(run
            .samples
            .iter()
            .all(|s| s.activity == ActivityPeriod::Low));
        assert_eq!(run.warnings.iter().filter(|w| w.contains("skipped")).count(), 1);
    }

    #[test]
    fn medium_period_labeling() {
        // 08:10-09:50 local, offset 0.
        let records = web_capture_span(29_400, 35_400);
        let stats = stats_for(&records);
        let run = analyze_records(records, stats, &fast_config()).unwrap();
        assert!(!run.samples.is_empty());
        assert!(run
            .samples
            .iter()
            .all(|s| s.activity == ActivityPeriod::Medium));
        let act = run.activity.as_ref().unwrap();
        assert_eq!(act.rows[1].period, ActivityPeriod::Medium);
        assert!(act.rows[1].samples > 0);
    }

    #[test]
    fn run_json_round_trips_and_is_deterministic() {
        let records = web_capture();
        let stats = stats_for(&records);
        let mut config = fast_config();
        config.measure = MeasureSelection::Both;
        config.methods = vec![Method::VarianceTime, Method::Periodogram];
        let run = analyze_records(records.clone(), stats.clone(), &config).unwrap();
        let again = analyze_records(records, stats, &config).unwrap();
        assert_eq!(run.to_json(), again.to_json());
        let back = AnalysisRun::from_json(&run.to_json()).unwrap();
        assert_eq!(run, back);
    }

    #[test]
    fn config_validation() {
        let records = web_capture();
        let stats = stats_for(&records);
        let mut config = fast_config();
        config.intervals_ms = vec![];
        assert!(matches!(
            analyze_records(records.clone(), stats.clone(), &config,).unwrap_err(),
            PipelineError::InvalidConfig(_)
        ));
        let mut config = fast_config();
        config.intervals_ms = vec![0];
        assert!(matches!(
            analyze_records(records.clone(), stats.clone(), &config).unwrap_err(),
            PipelineError::InvalidConfig(_)
        ));
        let mut config = fast_config();
        config.intervals_ms = vec![7_200_000];
        assert!(matches!(
            analyze_records(records, stats, &config).unwrap_err(),
            PipelineError::InvalidConfig(_)
        ));
    }

    #[test]
    fn duplicate_config_entries_collapse() {
        let records = web_capture();
        let stats = stats_for(&records);
        let mut config = fast_config();
        config.intervals_ms = vec![1000, 1000, 500];
        config.methods = vec![Method::VarianceTime, Method::VarianceTime];
        let run = analyze_records(records, stats, &config).unwrap();
        assert_eq!(run.config.intervals_ms, vec![500, 1000]);
        assert_eq!(run.config.methods, vec![Method::VarianceTime]);
        // Finest interval drives the report bucketing: samples exist
        // at both intervals, summaries only from 500 ms.
        assert!(run.samples.iter().any(|s| s.interval_ms == 1000));
    }

    #[test]
    fn mixed_format_inputs_merge() {
        use crate::fixtures::{encode_pcap, ether_ipv4, Encode, L4};
        use crate::ingest::pcap::LINKTYPE_ETHERNET;
        use std::io::Write;

        let frames = vec![
            ether_ipv4(1_000_000, [10, 0, 0, 1], [10, 0, 0, 2], L4::Tcp { src: 40_000, dst: 80 }, 600, 0),
            ether_ipv4(2_000_000, [10, 0, 0, 1], [10, 0, 0, 2], L4::Udp { src: 50_000, dst: 53 }, 120, 0),
        ];
        let pcap_bytes = encode_pcap(&frames, LINKTYPE_ETHERNET, Encode::UsLe);
        let dir = tempfile::tempdir().unwrap();
        let pcap_path = dir.path().join("a.pcap");
        fs::write(&pcap_path, &pcap_bytes).unwrap();
        let log_path = dir.path().join("b.log");
        let mut f = fs::File::create(&log_path).unwrap();
        writeln!(f, "ts,src_addr,dst_addr,ip_proto,src_port,dst_port,length,dscp").unwrap();
        writeln!(f, "3.000000,10.0.0.5,10.0.0.6,6,41000,22,200,0").unwrap();
        drop(f);

        let (records, stats) =
            load_inputs(&[pcap_path, log_path], InputFormat::Auto).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(stats.packets_parsed, 3);
        assert_eq!(stats.first_ts, Some(Timestamp::from_secs(1)));
        assert_eq!(stats.last_ts, Some(Timestamp::from_secs(3)));
        assert_eq!(stats.bytes_total, 600 + 120 + 200);

        assert!(matches!(
            load_inputs(&[], InputFormat::Auto).unwrap_err(),
            PipelineError::NoInputs
        ));
        let missing = dir.path().join("missing.pcap");
        assert!(matches!(
            load_inputs(&[missing], InputFormat::Auto).unwrap_err(),
            PipelineError::Io { .. }
        ));
    }
}
