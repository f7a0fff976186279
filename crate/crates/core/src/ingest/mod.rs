//! Packet ingestion: pcap captures and the canonical text packet log.
//!
//! Both readers reduce every IP datagram to the same [`PacketRecord`]
//! shape, so everything downstream (classifier, binning, reports) is
//! agnostic about where the packets came from.

pub mod log;
pub mod pcap;

use std::fmt;
use std::net::IpAddr;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Microsecond-resolution Unix timestamp.
///
/// Captures carry at most microsecond precision here (nanosecond pcap
/// timestamps are truncated on read), so time is stored as integer
/// microseconds: arithmetic stays exact and text round-trips are
/// lossless.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(u64);

impl Timestamp {
    pub const fn from_micros(us: u64) -> Self {
        Timestamp(us)
    }

    pub fn from_secs(secs: u64) -> Self {
        Timestamp(secs * 1_000_000)
    }

    pub const fn as_micros(self) -> u64 {
        self.0
    }

    pub const fn whole_secs(self) -> u64 {
        self.0 / 1_000_000
    }

    pub const fn subsec_micros(self) -> u32 {
        (self.0 % 1_000_000) as u32
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1e6
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.whole_secs(), self.subsec_micros())
    }
}

impl FromStr for Timestamp {
    type Err = String;

    /// Parses decimal seconds with at most six fractional digits.
    fn from_str(s: &str) -> Result<Self, String> {
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (s, None),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad timestamp {s:?}"));
        }
        let secs: u64 = int_part
            .parse()
            .map_err(|_| format!("timestamp {s:?} out of range"))?;
        let mut micros = secs
            .checked_mul(1_000_000)
            .ok_or_else(|| format!("timestamp {s:?} out of range"))?;
        if let Some(frac) = frac_part {
            if frac.is_empty() || frac.len() > 6 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!(
                    "bad timestamp {s:?}: expected at most 6 fractional digits"
                ));
            }
            let mut sub: u64 = frac.parse().unwrap();
            for _ in frac.len()..6 {
                sub *= 10;
            }
            micros = micros
                .checked_add(sub)
                .ok_or_else(|| format!("timestamp {s:?} out of range"))?;
        }
        Ok(Timestamp(micros))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One IP datagram, reduced to the fields the classifier and the
/// time-series pipeline need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketRecord {
    pub ts: Timestamp,
    pub src_addr: IpAddr,
    pub dst_addr: IpAddr,
    /// IP protocol number (6 TCP, 17 UDP, 1 ICMP, ...).
    pub ip_proto: u8,
    /// Zero when the protocol has no ports, and on non-first fragments,
    /// where the transport header is not present.
    pub src_port: u16,
    pub dst_port: u16,
    /// Total IP datagram length in bytes, header included.
    pub length: u32,
    /// Differentiated services code point, 0-63.
    pub dscp: u8,
}

impl PacketRecord {
    /// Checks the record invariants shared by every ingestion path.
    ///
    /// Ports must be zero for protocols without a port concept; TCP and
    /// UDP records may carry zero ports only as a fragment marker (both
    /// zero), never one-sided.
    pub fn validate(&self) -> Result<(), String> {
        if self.src_addr.is_ipv4() != self.dst_addr.is_ipv4() {
            return Err("source and destination address families differ".into());
        }
        let min_len = if self.src_addr.is_ipv4() { 20 } else { 40 };
        if self.length < min_len {
            return Err(format!(
                "length {} below the {min_len}-byte IP header minimum",
                self.length
            ));
        }
        let has_ports = self.ip_proto == 6 || self.ip_proto == 17;
        if !has_ports && (self.src_port != 0 || self.dst_port != 0) {
            return Err(format!(
                "protocol {} has no ports but ports are set",
                self.ip_proto
            ));
        }
        if has_ports && (self.src_port == 0) != (self.dst_port == 0) {
            return Err("one-sided zero port".into());
        }
        if self.dscp > 63 {
            return Err(format!("dscp {} out of range (0-63)", self.dscp));
        }
        Ok(())
    }
}

/// Daily activity periods by local hour, half-open on the hour:
/// [20,24) and [0,8) are Low, [8,10) and [13,17) Medium, [10,13) and
/// [17,20) High.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityPeriod {
    Low,
    Medium,
    High,
}

impl ActivityPeriod {
    pub const ALL: [ActivityPeriod; 3] =
        [ActivityPeriod::Low, ActivityPeriod::Medium, ActivityPeriod::High];

    pub fn name(self) -> &'static str {
        match self {
            ActivityPeriod::Low => "Low",
            ActivityPeriod::Medium => "Medium",
            ActivityPeriod::High => "High",
        }
    }
}

impl fmt::Display for ActivityPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maps a timestamp to the activity period of its local hour of day.
///
/// Local time is UTC shifted by `utc_offset_minutes`. The 13:00-15:00
/// block sits between the documented Medium and High windows and is
/// treated as Medium; report output flags that assumption.
pub fn label_activity(ts: Timestamp, utc_offset_minutes: i32) -> ActivityPeriod {
    let local = ts.whole_secs() as i64 + i64::from(utc_offset_minutes) * 60;
    period_for_hour((local.rem_euclid(86_400) / 3_600) as u32)
}

/// The activity period of a local hour of day (0-23).
pub fn period_for_hour(hour_of_day: u32) -> ActivityPeriod {
    match hour_of_day {
        0..=7 | 20..=23 => ActivityPeriod::Low,
        8..=9 | 13..=16 => ActivityPeriod::Medium,
        _ => ActivityPeriod::High, // 10..=12 and 17..=19
    }
}

/// Per-source bookkeeping shared by both readers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub packets_parsed: u64,
    /// Frames that carried no parseable IP datagram (ARP, truncated
    /// headers, unknown ethertypes, ...).
    pub packets_skipped_non_ip: u64,
    /// Sum of the `length` field over parsed records.
    pub bytes_total: u64,
    pub first_ts: Option<Timestamp>,
    pub last_ts: Option<Timestamp>,
}

impl IngestStats {
    pub(crate) fn record(&mut self, r: &PacketRecord) {
        self.packets_parsed += 1;
        self.bytes_total += u64::from(r.length);
        self.first_ts = Some(match self.first_ts {
            Some(t) => t.min(r.ts),
            None => r.ts,
        });
        self.last_ts = Some(match self.last_ts {
            Some(t) => t.max(r.ts),
            None => r.ts,
        });
    }

    pub(crate) fn skip(&mut self) {
        self.packets_skipped_non_ip += 1;
    }

    /// Folds another source's stats into this one.
    pub fn merge(&mut self, other: &IngestStats) {
        self.packets_parsed += other.packets_parsed;
        self.packets_skipped_non_ip += other.packets_skipped_non_ip;
        self.bytes_total += other.bytes_total;
        self.first_ts = match (self.first_ts, other.first_ts) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.last_ts = match (self.last_ts, other.last_ts) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}
