//! The three summary tables: traffic volume share per class, the
//! distribution of estimated H per class, and persistent-traffic
//! shares per activity period.
//!
//! Rendering conventions shared by all three: percentages are rounded
//! half-up (2 decimals for volume shares, 1 elsewhere); cells whose
//! denominator is zero render as `n/a`, never as `0.0` — a period with
//! no samples and a period whose samples all fall elsewhere are
//! different facts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassCounter, TrafficClass};
use crate::hurst::{bucket_h, HBucket};
use crate::ingest::ActivityPeriod;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("no data to report on")]
    NoData,
}

/// One analyzed sample, reduced to what the tables need: where it came
/// from, its H estimate, and its byte volume (the weight for the
/// volume-percentage metrics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub class: TrafficClass,
    pub activity: ActivityPeriod,
    pub h: f64,
    pub bytes: u64,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn fmt_cell(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "n/a".to_string(),
    }
}

// ---------------------------------------------------------------- volume

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub class_id: u8,
    pub bytes_pct: f64,
    pub packets_pct: f64,
}

/// Share of total traffic carried by each class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub rows: Vec<VolumeRow>,
    /// Sums of the rounded per-class figures; within 0.05 of 100.
    pub total_bytes_pct: f64,
    pub total_packets_pct: f64,
}

pub fn volume_report(counters: &[ClassCounter; 6]) -> Result<VolumeReport, ReportError> {
    let bytes_total: u64 = counters.iter().map(|c| c.bytes).sum();
    let packets_total: u64 = counters.iter().map(|c| c.packets).sum();
    if bytes_total == 0 || packets_total == 0 {
        return Err(ReportError::NoData);
    }
    let rows: Vec<VolumeRow> = TrafficClass::ALL
        .iter()
        .map(|&class| {
            let c = counters[class.idx()];
            VolumeRow {
                class_id: class.id(),
                bytes_pct: round2(100.0 * c.bytes as f64 / bytes_total as f64),
                packets_pct: round2(100.0 * c.packets as f64 / packets_total as f64),
            }
        })
        .collect();
    Ok(VolumeReport {
        total_bytes_pct: round2(rows.iter().map(|r| r.bytes_pct).sum()),
        total_packets_pct: round2(rows.iter().map(|r| r.packets_pct).sum()),
        rows,
    })
}

impl VolumeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,bytes_pct,packets_pct\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.2},{:.2}\n", r.class_id, r.bytes_pct, r.packets_pct));
        }
        out.push_str(&format!(
            "total,{:.2},{:.2}\n",
            self.total_bytes_pct, self.total_packets_pct
        ));
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("Traffic volume by class\n");
        out.push_str(&format!("{:<10} {:>10} {:>12}\n", "class", "bytes %", "packets %"));
        for r in &self.rows {
            out.push_str(&format!(
                "Class {:<4} {:>10.2} {:>12.2}\n",
                r.class_id, r.bytes_pct, r.packets_pct
            ));
        }
        out.push_str(&format!(
            "{:<10} {:>10.2} {:>12.2}\n",
            "total", self.total_bytes_pct, self.total_packets_pct
        ));
        out
    }
}

// ---------------------------------------------------- H distribution

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub class_id: u8,
    pub samples: usize,
    /// Percent of the class's samples per H bucket; `None` when the
    /// class has no samples.
    pub sample_pct: [Option<f64>; 4],
    /// Percent of the class's byte volume per H bucket; `None` when
    /// the class carried no bytes.
    pub volume_pct: [Option<f64>; 4],
}

/// How each class's hour-samples distribute over the H buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstDistributionReport {
    pub rows: Vec<DistributionRow>,
}

pub fn hurst_distribution_report(
    samples: &[SampleSummary],
) -> Result<HurstDistributionReport, ReportError> {
    if samples.is_empty() {
        return Err(ReportError::NoData);
    }
    let mut rows = Vec::with_capacity(6);
    for &class in &TrafficClass::ALL {
        let mut count = [0usize; 4];
        let mut bytes = [0u64; 4];
        let mut total_count = 0usize;
        let mut total_bytes = 0u64;
        for s in samples.iter().filter(|s| s.class == class) {
            let b = bucket_h(s.h).idx();
            count[b] += 1;
            bytes[b] += s.bytes;
            total_count += 1;
            total_bytes += s.bytes;
        }
        let sample_pct = count.map(|c| {
            (total_count > 0).then(|| round1(100.0 * c as f64 / total_count as f64))
        });
        let volume_pct = bytes.map(|b| {
            (total_bytes > 0).then(|| round1(100.0 * b as f64 / total_bytes as f64))
        });
        rows.push(DistributionRow {
            class_id: class.id(),
            samples: total_count,
            sample_pct,
            volume_pct,
        });
    }
    Ok(HurstDistributionReport { rows })
}

impl HurstDistributionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,metric");
        for b in HBucket::ALL {
            out.push(',');
            out.push_str(b.label());
        }
        out.push_str(",samples\n");
        for r in &self.rows {
            out.push_str(&format!("{},sample_pct", r.class_id));
            for cell in r.sample_pct {
                out.push(',');
                out.push_str(&fmt_cell(cell, 1));
            }
            out.push_str(&format!(",{}\n", r.samples));
            out.push_str(&format!("{},volume_pct", r.class_id));
            for cell in r.volume_pct {
                out.push(',');
                out.push_str(&fmt_cell(cell, 1));
            }
            out.push_str(&format!(",{}\n", r.samples));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("H distribution by class (sample % / volume %)\n");
        out.push_str(&format!("{:<10}", "class"));
        for b in HBucket::ALL {
            out.push_str(&format!(" {:>16}", b.label()));
        }
        out.push_str(&format!(" {:>8}\n", "samples"));
        for r in &self.rows {
            out.push_str(&format!("Class {:<4}", r.class_id));
            for i in 0..4 {
                let cell = format!(
                    "{} / {}",
                    fmt_cell(r.sample_pct[i], 1),
                    fmt_cell(r.volume_pct[i], 1)
                );
                out.push_str(&format!(" {cell:>16}"));
            }
            out.push_str(&format!(" {:>8}\n", r.samples));
        }
        out
    }
}

// -------------------------------------------------- activity periods

/// The two persistent buckets reported per activity period.
pub const ACTIVITY_BUCKETS: [HBucket; 2] = [HBucket::Lt07, HBucket::Ge07];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityRow {
    pub period: ActivityPeriod,
    pub samples: usize,
    /// Percent of the period's samples in "0.5 < H < 0.7" and
    /// "H ≥ 0.7". Denominators cover all of the period's samples, so a
    /// row need not total 100 when some samples have H < 0.5.
    pub sample_pct: [Option<f64>; 2],
    pub volume_pct: [Option<f64>; 2],
}

/// Where the persistent (H > 0.5) traffic sits across the day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityReport {
    pub rows: Vec<ActivityRow>,
}

pub fn activity_report(samples: &[SampleSummary]) -> Result<ActivityReport, ReportError> {
    if samples.is_empty() {
        return Err(ReportError::NoData);
    }
    let mut rows = Vec::with_capacity(3);
    for &period in &ActivityPeriod::ALL {
        let mut count = [0usize; 2];
        let mut bytes = [0u64; 2];
        let mut total_count = 0usize;
        let mut total_bytes = 0u64;
        for s in samples.iter().filter(|s| s.activity == period) {
            total_count += 1;
            total_bytes += s.bytes;
            match bucket_h(s.h) {
                HBucket::Lt07 => {
                    count[0] += 1;
                    bytes[0] += s.bytes;
                }
                HBucket::Ge07 => {
                    count[1] += 1;
                    bytes[1] += s.bytes;
                }
                _ => {}
            }
        }
        let sample_pct = count.map(|c| {
            (total_count > 0).then(|| round1(100.0 * c as f64 / total_count as f64))
        });
        let volume_pct = bytes.map(|b| {
            (total_bytes > 0).then(|| round1(100.0 * b as f64 / total_bytes as f64))
        });
        rows.push(ActivityRow { period, samples: total_count, sample_pct, volume_pct });
    }
    Ok(ActivityReport { rows })
}

impl ActivityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,metric");
        for b in ACTIVITY_BUCKETS {
            out.push(',');
            out.push_str(b.label());
        }
        out.push_str(",samples\n");
        for r in &self.rows {
            out.push_str(&format!("{},sample_pct", r.period.name()));
            for cell in r.sample_pct {
                out.push(',');
                out.push_str(&fmt_cell(cell, 1));
            }
            out.push_str(&format!(",{}\n", r.samples));
            out.push_str(&format!("{},volume_pct", r.period.name()));
            for cell in r.volume_pct {
                out.push(',');
                out.push_str(&fmt_cell(cell, 1));
            }
            out.push_str(&format!(",{}\n", r.samples));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("Persistent traffic by activity period (sample % / volume %)\n");
        out.push_str(&format!("{:<8}", "period"));
        for b in ACTIVITY_BUCKETS {
            out.push_str(&format!(" {:>16}", b.label()));
        }
        out.push_str(&format!(" {:>8}\n", "samples"));
        for r in &self.rows {
            out.push_str(&format!("{:<8}", r.period.name()));
            for i in 0..2 {
                let cell = format!(
                    "{} / {}",
                    fmt_cell(r.sample_pct[i], 1),
                    fmt_cell(r.volume_pct[i], 1)
                );
                out.push_str(&format!(" {cell:>16}"));
            }
            out.push_str(&format!(" {:>8}\n", r.samples));
        }
        out
    }
}
