//! Classic pcap capture reader.
//!
//! Handles both byte orders and both timestamp resolutions (microsecond
//! magic 0xa1b2c3d4, nanosecond magic 0xa1b23c4d), link types Ethernet
//! and raw IP, one level of 802.1Q VLAN tagging, IPv4 and IPv6 with
//! extension headers. Frames that carry no parseable IP datagram are
//! counted and skipped, never turned into half-valid records.

use std::io::{ErrorKind, Read};

use thiserror::Error;

use super::{IngestStats, PacketRecord, Timestamp};

const MAGIC_US_BE: [u8; 4] = [0xa1, 0xb2, 0xc3, 0xd4];
const MAGIC_US_LE: [u8; 4] = [0xd4, 0xc3, 0xb2, 0xa1];
const MAGIC_NS_BE: [u8; 4] = [0xa1, 0xb2, 0x3c, 0x4d];
const MAGIC_NS_LE: [u8; 4] = [0x4d, 0x3c, 0xb2, 0xa1];

pub const LINKTYPE_ETHERNET: u32 = 1;
pub const LINKTYPE_RAW_IP: u32 = 101;

const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;
const ETH_HLEN: usize = 14;
const ETHERTYPE_IPV4: u16 = 0x0800;
const ETHERTYPE_IPV6: u16 = 0x86dd;
const ETHERTYPE_VLAN: u16 = 0x8100;

/// Upper bound on a single captured frame; larger values mean the
/// record header itself is garbage.
const MAX_FRAME_LEN: u32 = 1 << 20;

#[derive(Debug, Error)]
pub enum PcapError {
    #[error("not a pcap capture: unrecognized magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported link type {0}: only Ethernet (1) and raw IP (101) captures are handled")]
    UnsupportedLinkType(u32),
    #[error("truncated capture: {0}")]
    TruncatedCapture(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Streaming pcap reader; pull records one at a time with
/// [`PcapReader::next_record`], or use [`parse_pcap`] to collect.
pub struct PcapReader<R: Read> {
    src: R,
    big_endian: bool,
    nanosecond: bool,
    linktype: u32,
    stats: IngestStats,
    frame: Vec<u8>,
}

impl<R: Read> PcapReader<R> {
    pub fn new(mut src: R) -> Result<Self, PcapError> {
        let mut header = [0u8; GLOBAL_HEADER_LEN];
        src.read_exact(&mut header).map_err(|e| {
            if e.kind() == ErrorKind::UnexpectedEof {
                PcapError::TruncatedCapture("global header shorter than 24 bytes")
            } else {
                PcapError::Io(e)
            }
        })?;
        let magic: [u8; 4] = header[..4].try_into().unwrap();
        let (big_endian, nanosecond) = match magic {
            MAGIC_US_BE => (true, false),
            MAGIC_US_LE => (false, false),
            MAGIC_NS_BE => (true, true),
            MAGIC_NS_LE => (false, true),
            other => return Err(PcapError::BadMagic(other)),
        };
        let u32_at = |buf: &[u8], off: usize| -> u32 {
            let raw: [u8; 4] = buf[off..off + 4].try_into().unwrap();
            if big_endian {
                u32::from_be_bytes(raw)
            } else {
                u32::from_le_bytes(raw)
            }
        };
        let linktype = u32_at(&header, 20);
        if linktype != LINKTYPE_ETHERNET && linktype != LINKTYPE_RAW_IP {
            return Err(PcapError::UnsupportedLinkType(linktype));
        }
        Ok(PcapReader {
            src,
            big_endian,
            nanosecond,
            linktype,
            stats: IngestStats::default(),
            frame: Vec::new(),
        })
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn linktype(&self) -> u32 {
        self.linktype
    }

    fn read_u32(&self, buf: &[u8], off: usize) -> u32 {
        let raw: [u8; 4] = buf[off..off + 4].try_into().unwrap();
        if self.big_endian {
            u32::from_be_bytes(raw)
        } else {
            u32::from_le_bytes(raw)
        }
    }

    /// Returns the next IP datagram, skipping non-IP frames; `None` at a
    /// clean end of file.
    pub fn next_record(&mut self) -> Result<Option<PacketRecord>, PcapError> {
        loop {
            let mut header = [0u8; RECORD_HEADER_LEN];
            match read_fully(&mut self.src, &mut header)? {
                0 => return Ok(None),
                RECORD_HEADER_LEN => {}
                _ => return Err(PcapError::TruncatedCapture("record header cut short")),
            }
            let ts_sec = self.read_u32(&header, 0);
            let ts_frac = self.read_u32(&header, 4);
            let incl_len = self.read_u32(&header, 8);
            if incl_len > MAX_FRAME_LEN {
                return Err(PcapError::TruncatedCapture(
                    "record header declares an implausible frame length",
                ));
            }
            let micros = if self.nanosecond {
                u64::from(ts_frac) / 1_000
            } else {
                u64::from(ts_frac)
            };
            let ts = Timestamp::from_micros(u64::from(ts_sec) * 1_000_000 + micros);

            self.frame.resize(incl_len as usize, 0);
            match read_fully(&mut self.src, &mut self.frame)? {
                n if n == incl_len as usize => {}
                _ => return Err(PcapError::TruncatedCapture("frame body cut short")),
            }

            match self.decode_frame(ts) {
                Some(record) => {
                    self.stats.record(&record);
                    return Ok(Some(record));
                }
                None => self.stats.skip(),
            }
        }
    }

    fn decode_frame(&self, ts: Timestamp) -> Option<PacketRecord> {
        let data = &self.frame[..];
        match self.linktype {
            LINKTYPE_ETHERNET => {
                if data.len() < ETH_HLEN {
                    return None;
                }
                let mut ethertype = be16(data, 12);
                let mut off = ETH_HLEN;
                if ethertype == ETHERTYPE_VLAN {
                    // One 802.1Q tag: 2 bytes TCI, 2 bytes inner ethertype.
                    if data.len() < off + 4 {
                        return None;
                    }
                    ethertype = be16(data, off + 2);
                    off += 4;
                }
                match ethertype {
                    ETHERTYPE_IPV4 => parse_ipv4(ts, &data[off..]),
                    ETHERTYPE_IPV6 => parse_ipv6(ts, &data[off..]),
                    _ => None,
                }
            }
            LINKTYPE_RAW_IP => match data.first().map(|b| b >> 4) {
                Some(4) => parse_ipv4(ts, data),
                Some(6) => parse_ipv6(ts, data),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Reads until `buf` is full or EOF; returns the number of bytes read.
fn read_fully<R: Read>(src: &mut R, buf: &mut [u8]) -> Result<usize, PcapError> {
    let mut filled = 0;
    while filled < buf.len() {
        match src.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(PcapError::Io(e)),
        }
    }
    Ok(filled)
}

fn be16(data: &[u8], off: usize) -> u16 {
    u16::from_be_bytes([data[off], data[off + 1]])
}

fn parse_ipv4(ts: Timestamp, data: &[u8]) -> Option<PacketRecord> {
    if data.len() < 20 || data[0] >> 4 != 4 {
        return None;
    }
    let ihl = usize::from(data[0] & 0x0f) * 4;
    if ihl < 20 || data.len() < ihl {
        return None;
    }
    let total_len = u32::from(be16(data, 2));
    if total_len < ihl as u32 {
        return None;
    }
    let dscp = data[1] >> 2;
    let proto = data[9];
    let fragment_offset = be16(data, 6) & 0x1fff;
    let src = std::net::Ipv4Addr::new(data[12], data[13], data[14], data[15]);
    let dst = std::net::Ipv4Addr::new(data[16], data[17], data[18], data[19]);

    let mut src_port = 0;
    let mut dst_port = 0;
    // Ports exist only in the first fragment, and only if the capture
    // kept enough of the transport header.
    if fragment_offset == 0 && (proto == 6 || proto == 17) && data.len() >= ihl + 4 {
        src_port = be16(data, ihl);
        dst_port = be16(data, ihl + 2);
    }

    Some(PacketRecord {
        ts,
        src_addr: src.into(),
        dst_addr: dst.into(),
        ip_proto: proto,
        src_port,
        dst_port,
        length: total_len,
        dscp,
    })
}

fn parse_ipv6(ts: Timestamp, data: &[u8]) -> Option<PacketRecord> {
    if data.len() < 40 || data[0] >> 4 != 6 {
        return None;
    }
    // Traffic class straddles the first two bytes; DSCP is its upper six bits.
    let dscp = ((be16(data, 0) >> 6) & 0x3f) as u8;
    let length = 40 + u32::from(be16(data, 4));
    let src = ipv6_at(data, 8);
    let dst = ipv6_at(data, 24);

    let mut next = data[6];
    let mut off = 40usize;
    let mut later_fragment = false;
    loop {
        match next {
            // Hop-by-hop options, routing, destination options: length
            // field counts 8-byte units beyond the first 8 bytes.
            0 | 43 | 60 => {
                if data.len() < off + 8 {
                    break;
                }
                let ext_len = 8 + usize::from(data[off + 1]) * 8;
                next = data[off];
                off += ext_len;
            }
            // Fragment header: fixed 8 bytes; a nonzero offset marks a
            // non-first fragment whose transport header is elsewhere.
            44 => {
                if data.len() < off + 8 {
                    break;
                }
                if be16(data, off + 2) >> 3 != 0 {
                    later_fragment = true;
                }
                next = data[off];
                off += 8;
            }
            _ => break,
        }
        if off > data.len() {
            break;
        }
    }

    let mut src_port = 0;
    let mut dst_port = 0;
    if !later_fragment && (next == 6 || next == 17) && data.len() >= off + 4 {
        src_port = be16(data, off);
        dst_port = be16(data, off + 2);
    }

    Some(PacketRecord {
        ts,
        src_addr: src.into(),
        dst_addr: dst.into(),
        ip_proto: next,
        src_port,
        dst_port,
        length,
        dscp,
    })
}

fn ipv6_at(data: &[u8], off: usize) -> std::net::Ipv6Addr {
    let raw: [u8; 16] = data[off..off + 16].try_into().unwrap();
    raw.into()
}

/// True when the byte prefix carries one of the four capture-file
/// magic numbers, in either endianness and either timestamp
/// resolution.
pub fn is_pcap_prefix(prefix: &[u8]) -> bool {
    prefix.len() >= 4
        && [MAGIC_US_BE, MAGIC_US_LE, MAGIC_NS_BE, MAGIC_NS_LE]
            .iter()
            .any(|m| prefix[..4] == *m)
}

/// Reads a whole capture into memory.
pub fn parse_pcap<R: Read>(src: R) -> Result<(Vec<PacketRecord>, IngestStats), PcapError> {
    let mut reader = PcapReader::new(src)?;
    let mut records = Vec::new();
    while let Some(r) = reader.next_record()? {
        records.push(r);
    }
    Ok((records, reader.stats.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{encode_pcap, ether_ipv4, ether_ipv6, raw_ipv4, vlan_ipv4, Encode};
    use crate::fixtures::{FrameSpec, L4};

    fn tcp_frame(ts_us: u64) -> FrameSpec {
        ether_ipv4(ts_us, [10, 0, 0, 1], [10, 0, 0, 2], L4::Tcp { src: 41000, dst: 22 }, 120, 0)
    }

    #[test]
    fn reads_all_four_header_variants() {
        let frames = vec![tcp_frame(1_700_000_000_000_050)];
        let mut parsed = Vec::new();
        for enc in Encode::ALL {
            let bytes = encode_pcap(&frames, LINKTYPE_ETHERNET, enc);
            let (records, stats) = parse_pcap(&bytes[..]).unwrap();
            assert_eq!(records.len(), 1, "{enc:?}");
            assert_eq!(stats.packets_parsed, 1);
            parsed.push(records);
        }
        // All four encodings describe the same capture.
        assert!(parsed.windows(2).all(|w| w[0] == w[1]));
        let r = &parsed[0][0];
        assert_eq!(r.ts, Timestamp::from_micros(1_700_000_000_000_050));
        assert_eq!(r.ip_proto, 6);
        assert_eq!(r.src_port, 41000);
        assert_eq!(r.dst_port, 22);
        assert_eq!(r.length, 120);
    }

    #[test]
    fn nanosecond_timestamps_truncate_to_micros() {
        let mut f = tcp_frame(0);
        f.ts_us = 3; // encoded as 3999 ns below
        let mut bytes = encode_pcap(&[f], LINKTYPE_ETHERNET, Encode::NsLe);
        // Patch the fractional field to 3999 ns: offset 24 + 4.
        bytes[28..32].copy_from_slice(&3999u32.to_le_bytes());
        let (records, _) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records[0].ts.as_micros(), 3);
    }

    #[test]
    fn vlan_tag_is_unwrapped_once() {
        let f = vlan_ipv4(0, [192, 168, 0, 1], [192, 168, 0, 2], L4::Udp { src: 53, dst: 40000 }, 80, 46);
        let bytes = encode_pcap(&[f], LINKTYPE_ETHERNET, Encode::UsLe);
        let (records, _) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].ip_proto, 17);
        assert_eq!(records[0].src_port, 53);
        assert_eq!(records[0].dscp, 46);
    }

    #[test]
    fn raw_ip_linktype_parses_without_ethernet() {
        let f = raw_ipv4(7_000_000, [172, 16, 0, 1], [172, 16, 0, 9], L4::Proto(89), 64, 0);
        let bytes = encode_pcap(&[f], LINKTYPE_RAW_IP, Encode::UsBe);
        let (records, _) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].ip_proto, 89);
        assert_eq!(records[0].src_port, 0);
        assert_eq!(records[0].length, 64);
    }

    #[test]
    fn ipv6_with_extension_headers_and_fragment() {
        // First fragment: ports visible.
        let first = ether_ipv6(0, 1, 2, L4::Tcp { src: 443, dst: 50000 }, 1400, 10, false);
        // Later fragment: ports zeroed.
        let later = ether_ipv6(1, 1, 2, L4::Tcp { src: 443, dst: 50000 }, 1400, 10, true);
        let bytes = encode_pcap(&[first, later], LINKTYPE_ETHERNET, Encode::UsLe);
        let (records, _) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].src_port, 443);
        assert_eq!(records[0].dscp, 10);
        assert_eq!(records[1].src_port, 0);
        assert_eq!(records[1].dst_port, 0);
        assert_eq!(records[1].ip_proto, 6);
        assert!(records[1].length >= 40);
        for r in &records {
            r.validate().unwrap();
        }
    }

    #[test]
    fn ipv4_later_fragment_loses_ports() {
        let mut f = ether_ipv4(0, [10, 0, 0, 1], [10, 0, 0, 2], L4::Udp { src: 1000, dst: 2000 }, 600, 0);
        f.frag_offset = 185;
        let bytes = encode_pcap(&[f], LINKTYPE_ETHERNET, Encode::UsLe);
        let (records, _) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records[0].ip_proto, 17);
        assert_eq!(records[0].src_port, 0);
        assert_eq!(records[0].dst_port, 0);
    }

    #[test]
    fn non_ip_frames_are_counted_not_returned() {
        let arp = FrameSpec::ether_raw(0, 0x0806, vec![0u8; 28]);
        let frames = vec![arp, tcp_frame(5)];
        let bytes = encode_pcap(&frames, LINKTYPE_ETHERNET, Encode::UsLe);
        let (records, stats) = parse_pcap(&bytes[..]).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(stats.packets_parsed, 1);
        assert_eq!(stats.packets_skipped_non_ip, 1);
        assert_eq!(stats.bytes_total, 120);
    }

    #[test]
    fn bad_magic_is_rejected() {
        let err = parse_pcap(&b"GIF89a..not a capture......."[..]).unwrap_err();
        assert!(matches!(err, PcapError::BadMagic(_)), "{err}");
    }

    #[test]
    fn unsupported_linktype_is_rejected() {
        let bytes = encode_pcap(&[], 228, Encode::UsLe);
        let err = parse_pcap(&bytes[..]).unwrap_err();
        assert!(matches!(err, PcapError::UnsupportedLinkType(228)), "{err}");
    }

    #[test]
    fn truncation_is_reported() {
        let bytes = encode_pcap(&[tcp_frame(0)], LINKTYPE_ETHERNET, Encode::UsLe);
        // Global header cut short.
        let err = parse_pcap(&bytes[..10]).unwrap_err();
        assert!(matches!(err, PcapError::TruncatedCapture(_)), "{err}");
        // Record header cut short.
        let err = parse_pcap(&bytes[..30]).unwrap_err();
        assert!(matches!(err, PcapError::TruncatedCapture(_)), "{err}");
        // Frame body cut short.
        let err = parse_pcap(&bytes[..bytes.len() - 5]).unwrap_err();
        assert!(matches!(err, PcapError::TruncatedCapture(_)), "{err}");
    }

    #[test]
    fn empty_capture_yields_no_records() {
        let bytes = encode_pcap(&[], LINKTYPE_ETHERNET, Encode::UsLe);
        let (records, stats) = parse_pcap(&bytes[..]).unwrap();
        assert!(records.is_empty());
        assert_eq!(stats.packets_parsed, 0);
        assert_eq!(stats.first_ts, None);
    }
}
