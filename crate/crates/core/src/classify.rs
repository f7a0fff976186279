//! Six-class QoS traffic classifier driven by a small port/protocol
//! rule table.
//!
//! Classes, in precedence order:
//!
//! 1. interactive TCP (remote shells)
//! 2. bulk-transfer TCP (file transfer, mail)
//! 3. web TCP (HTTP and friends)
//! 4. management and control traffic (routing protocols, DNS, NTP, ...)
//! 5. generic UDP (well-known or listed UDP services)
//! 6. transient/ephemeral traffic: everything else
//!
//! Management matching runs first: a protocol listed in
//! `mgmt_ip_protos`, or a TCP/UDP service port listed in `mgmt_ports`,
//! wins over the per-protocol rules. Non-first fragments carry no ports
//! and fall through to the protocol defaults (UDP to class 5, TCP to
//! class 6).

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::PacketRecord;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(into = "u8", try_from = "u8")]
pub enum TrafficClass {
    Interactive = 1,
    Bulk = 2,
    Http = 3,
    Management = 4,
    GenericUdp = 5,
    Transient = 6,
}

impl From<TrafficClass> for u8 {
    fn from(class: TrafficClass) -> u8 {
        class.id()
    }
}

impl TryFrom<u8> for TrafficClass {
    type Error = String;

    fn try_from(id: u8) -> Result<TrafficClass, String> {
        TrafficClass::from_id(id).ok_or_else(|| format!("class id {id} outside 1..=6"))
    }
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 6] = [
        TrafficClass::Interactive,
        TrafficClass::Bulk,
        TrafficClass::Http,
        TrafficClass::Management,
        TrafficClass::GenericUdp,
        TrafficClass::Transient,
    ];

    /// Stable 1-based class id used in reports.
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<TrafficClass> {
        TrafficClass::ALL.get(id.checked_sub(1)? as usize).copied()
    }

    /// Zero-based index for array-backed counters.
    pub(crate) fn idx(self) -> usize {
        self as usize - 1
    }
}

impl fmt::Display for TrafficClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Class {}", self.id())
    }
}

const SET_NAMES: [&str; 5] = [
    "interactive_tcp_ports",
    "bulk_tcp_ports",
    "http_ports",
    "mgmt_ports",
    "generic_udp_ports",
];

/// The classifier's rule table. The five port sets must be pairwise
/// disjoint so precedence never depends on set iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub version: String,
    pub interactive_tcp_ports: BTreeSet<u16>,
    pub bulk_tcp_ports: BTreeSet<u16>,
    pub http_ports: BTreeSet<u16>,
    /// Applied to both TCP and UDP service ports.
    pub mgmt_ports: BTreeSet<u16>,
    pub generic_udp_ports: BTreeSet<u16>,
    pub mgmt_ip_protos: BTreeSet<u8>,
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("rule file sets no version")]
    MissingVersion,
    #[error("port {port} appears in both {first} and {second}")]
    OverlappingRules {
        port: u16,
        first: &'static str,
        second: &'static str,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl RuleSet {
    /// Built-in defaults: ssh/telnet interactive; ftp, mail and sync
    /// bulk; the common web ports; DNS, NTP, SNMP, BGP, LDAP, syslog and
    /// DHCP as management ports; ICMP, IGMP and OSPF as management
    /// protocols.
    pub fn default_rules() -> RuleSet {
        RuleSet {
            version: "default-1".into(),
            interactive_tcp_ports: [22, 23].into(),
            bulk_tcp_ports: [20, 21, 25, 110, 143, 873, 989, 990].into(),
            http_ports: [80, 443, 8080, 8443].into(),
            mgmt_ports: [53, 67, 68, 123, 161, 162, 179, 389, 514, 546, 547].into(),
            generic_udp_ports: BTreeSet::new(),
            mgmt_ip_protos: [1, 2, 89].into(),
        }
    }

    /// All sets empty: everything falls to classes 4 (by protocol only,
    /// never), 5 or 6.
    pub fn empty() -> RuleSet {
        RuleSet {
            version: String::new(),
            interactive_tcp_ports: BTreeSet::new(),
            bulk_tcp_ports: BTreeSet::new(),
            http_ports: BTreeSet::new(),
            mgmt_ports: BTreeSet::new(),
            generic_udp_ports: BTreeSet::new(),
            mgmt_ip_protos: BTreeSet::new(),
        }
    }

    fn port_sets(&self) -> [(&'static str, &BTreeSet<u16>); 5] {
        [
            (SET_NAMES[0], &self.interactive_tcp_ports),
            (SET_NAMES[1], &self.bulk_tcp_ports),
            (SET_NAMES[2], &self.http_ports),
            (SET_NAMES[3], &self.mgmt_ports),
            (SET_NAMES[4], &self.generic_udp_ports),
        ]
    }

    /// Rejects rule tables whose port sets overlap.
    pub fn validate(&self) -> Result<(), RuleError> {
        let sets = self.port_sets();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if let Some(port) = sets[i].1.intersection(sets[j].1).next() {
                    return Err(RuleError::OverlappingRules {
                        port: *port,
                        first: sets[i].0,
                        second: sets[j].0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Parses the `key=value` rule format.
    ///
    /// Values are comma-separated integers (an empty value is an empty
    /// set). Unknown or repeated keys are rejected. `version=` is
    /// required whenever the file has any content at all; a fully empty
    /// file is the degenerate empty rule set.
    pub fn parse(text: &str) -> Result<RuleSet, RuleError> {
        let mut rules = RuleSet::empty();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RuleError::ParseError {
                    line: line_no,
                    reason: format!("expected key=value, got {line:?}"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(RuleError::ParseError {
                    line: line_no,
                    reason: format!("duplicate key {key:?}"),
                });
            }
            match key {
                "version" => {
                    if value.is_empty() {
                        return Err(RuleError::ParseError {
                            line: line_no,
                            reason: "version must not be empty".into(),
                        });
                    }
                    rules.version = value.to_string();
                }
                "interactive_tcp_ports" => rules.interactive_tcp_ports = parse_set(value, line_no)?,
                "bulk_tcp_ports" => rules.bulk_tcp_ports = parse_set(value, line_no)?,
                "http_ports" => rules.http_ports = parse_set(value, line_no)?,
                "mgmt_ports" => rules.mgmt_ports = parse_set(value, line_no)?,
                "generic_udp_ports" => rules.generic_udp_ports = parse_set(value, line_no)?,
                "mgmt_ip_protos" => rules.mgmt_ip_protos = parse_set(value, line_no)?,
                other => {
                    return Err(RuleError::ParseError {
                        line: line_no,
                        reason: format!("unknown key {other:?}"),
                    });
                }
            }
        }
        if !seen.is_empty() && rules.version.is_empty() {
            return Err(RuleError::MissingVersion);
        }
        rules.validate()?;
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<RuleSet, RuleError> {
        RuleSet::parse(&std::fs::read_to_string(path)?)
    }
}

fn parse_set<T>(value: &str, line: usize) -> Result<BTreeSet<T>, RuleError>
where
    T: std::str::FromStr + Ord,
{
    let mut set = BTreeSet::new();
    if value.is_empty() {
        return Ok(set);
    }
    for item in value.split(',') {
        let item = item.trim();
        let parsed = item.parse().map_err(|_| RuleError::ParseError {
            line,
            reason: format!("bad number {item:?}"),
        })?;
        set.insert(parsed);
    }
    Ok(set)
}

/// The port that names the service: the smaller of the two when both
/// are set, otherwise whichever is nonzero (fragments have neither).
pub fn service_port(r: &PacketRecord) -> u16 {
    match (r.src_port, r.dst_port) {
        (0, p) | (p, 0) => p,
        (a, b) => a.min(b),
    }
}

/// Total classification: every record lands in exactly one class.
pub fn classify(r: &PacketRecord, rules: &RuleSet) -> TrafficClass {
    let sp = service_port(r);
    if rules.mgmt_ip_protos.contains(&r.ip_proto) {
        return TrafficClass::Management;
    }
    let tcp = r.ip_proto == 6;
    let udp = r.ip_proto == 17;
    if (tcp || udp) && sp != 0 && rules.mgmt_ports.contains(&sp) {
        return TrafficClass::Management;
    }
    if tcp {
        if sp != 0 {
            if rules.interactive_tcp_ports.contains(&sp) {
                return TrafficClass::Interactive;
            }
            if rules.bulk_tcp_ports.contains(&sp) {
                return TrafficClass::Bulk;
            }
            if rules.http_ports.contains(&sp) {
                return TrafficClass::Http;
            }
        }
        return TrafficClass::Transient;
    }
    if udp {
        // Fragments (sp == 0) count as generic UDP: 0 < 1024.
        if rules.generic_udp_ports.contains(&sp) || sp < 1024 {
            return TrafficClass::GenericUdp;
        }
        return TrafficClass::Transient;
    }
    TrafficClass::Transient
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounter {
    pub packets: u64,
    pub bytes: u64,
}

/// A record stream split by class, with exact per-class totals.
#[derive(Debug, Clone, Default)]
pub struct ClassifiedStream {
    pub per_class: [Vec<PacketRecord>; 6],
    pub counters: [ClassCounter; 6],
}

impl ClassifiedStream {
    pub fn total_packets(&self) -> u64 {
        self.counters.iter().map(|c| c.packets).sum()
    }

    pub fn total_bytes(&self) -> u64 {
        self.counters.iter().map(|c| c.bytes).sum()
    }
}

pub fn classify_stream<I>(records: I, rules: &RuleSet) -> ClassifiedStream
where
    I: IntoIterator<Item = PacketRecord>,
{
    let mut out = ClassifiedStream::default();
    for r in records {
        let idx = classify(&r, rules).idx();
        out.counters[idx].packets += 1;
        out.counters[idx].bytes += u64::from(r.length);
        out.per_class[idx].push(r);
    }
    out
}
