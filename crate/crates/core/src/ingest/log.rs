//! Canonical text packet log.
//!
//! One CSV line per packet:
//!
//! ```text
//! ts,src_addr,dst_addr,ip_proto,src_port,dst_port,length,dscp
//! 1700000000.000050,10.0.0.1,10.0.0.2,6,41000,22,120,0
//! ```
//!
//! Timestamps are decimal seconds with up to six fractional digits.
//! Lines starting with `#` are comments; a leading header line is
//! optional. Writing always emits the header and six fractional digits,
//! so write→parse reproduces every record exactly.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::{IngestStats, PacketRecord, Timestamp};

pub const LOG_HEADER: &str = "ts,src_addr,dst_addr,ip_proto,src_port,dst_port,length,dscp";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {reason}")]
    SchemaError { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn schema(line: usize, reason: impl Into<String>) -> LogError {
    LogError::SchemaError { line, reason: reason.into() }
}

/// Parses a whole log. Line numbers in errors are 1-based and count
/// every line, comments included.
pub fn parse_packet_log<R: BufRead>(src: R) -> Result<(Vec<PacketRecord>, IngestStats), LogError> {
    let mut records = Vec::new();
    let mut stats = IngestStats::default();
    let mut seen_data = false;
    for (idx, line) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_data && line == LOG_HEADER {
            seen_data = true;
            continue;
        }
        seen_data = true;
        let record = parse_line(line).map_err(|reason| schema(line_no, reason))?;
        stats.record(&record);
        records.push(record);
    }
    Ok((records, stats))
}

fn parse_line(line: &str) -> Result<PacketRecord, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(format!("expected 8 fields, got {}", fields.len()));
    }
    let ts: Timestamp = fields[0].parse()?;
    let src_addr: std::net::IpAddr = fields[1]
        .parse()
        .map_err(|_| format!("bad source address {:?}", fields[1]))?;
    let dst_addr: std::net::IpAddr = fields[2]
        .parse()
        .map_err(|_| format!("bad destination address {:?}", fields[2]))?;
    let ip_proto: u8 = fields[3]
        .parse()
        .map_err(|_| format!("bad ip_proto {:?}", fields[3]))?;
    let src_port: u16 = fields[4]
        .parse()
        .map_err(|_| format!("bad src_port {:?}", fields[4]))?;
    let dst_port: u16 = fields[5]
        .parse()
        .map_err(|_| format!("bad dst_port {:?}", fields[5]))?;
    let length: u32 = fields[6]
        .parse()
        .map_err(|_| format!("bad length {:?}", fields[6]))?;
    let dscp: u8 = fields[7]
        .parse()
        .map_err(|_| format!("bad dscp {:?}", fields[7]))?;
    let record = PacketRecord {
        ts,
        src_addr,
        dst_addr,
        ip_proto,
        src_port,
        dst_port,
        length,
        dscp,
    };
    record.validate()?;
    Ok(record)
}

/// Writes records in the canonical format, header first.
pub fn write_packet_log<'a, W, I>(records: I, out: &mut W) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PacketRecord>,
{
    writeln!(out, "{LOG_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.ts, r.src_addr, r.dst_addr, r.ip_proto, r.src_port, r.dst_port, r.length, r.dscp
        )?;
    }
    Ok(())
}
