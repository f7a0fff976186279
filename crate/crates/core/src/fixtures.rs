//! Synthetic capture and record builders for the test suites.
//!
//! Not part of the stable API: the shapes here exist so unit,
//! property, and acceptance tests can manufacture captures byte by
//! byte without sharing copy-pasted encoders.

use rand::Rng;

use crate::ingest::{PacketRecord, Timestamp};

/// The four legal pcap global-header flavors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encode {
    /// Microsecond timestamps, big-endian headers.
    UsBe,
    /// Microsecond timestamps, little-endian headers.
    UsLe,
    /// Nanosecond timestamps, big-endian headers.
    NsBe,
    /// Nanosecond timestamps, little-endian headers.
    NsLe,
}

impl Encode {
    pub const ALL: [Encode; 4] = [Encode::UsBe, Encode::UsLe, Encode::NsBe, Encode::NsLe];

    fn big_endian(self) -> bool {
        matches!(self, Encode::UsBe | Encode::NsBe)
    }

    fn nanosecond(self) -> bool {
        matches!(self, Encode::NsBe | Encode::NsLe)
    }

    fn magic(self) -> [u8; 4] {
        match self {
            Encode::UsBe => [0xa1, 0xb2, 0xc3, 0xd4],
            Encode::UsLe => [0xd4, 0xc3, 0xb2, 0xa1],
            Encode::NsBe => [0xa1, 0xb2, 0x3c, 0x4d],
            Encode::NsLe => [0x4d, 0x3c, 0xb2, 0xa1],
        }
    }
}

/// Transport layer of a synthetic frame.
#[derive(Debug, Clone, Copy)]
pub enum L4 {
    Tcp { src: u16, dst: u16 },
    Udp { src: u16, dst: u16 },
    /// Any other IP protocol, no transport header encoded.
    Proto(u8),
}

impl L4 {
    fn proto(self) -> u8 {
        match self {
            L4::Tcp { .. } => 6,
            L4::Udp { .. } => 17,
            L4::Proto(p) => p,
        }
    }

    fn ports(self) -> Option<(u16, u16)> {
        match self {
            L4::Tcp { src, dst } | L4::Udp { src, dst } => Some((src, dst)),
            L4::Proto(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum FrameKind {
    Ipv4 {
        src: [u8; 4],
        dst: [u8; 4],
        l4: L4,
        total_len: u16,
        dscp: u8,
        vlan: bool,
    },
    Ipv6 {
        src_last: u8,
        dst_last: u8,
        l4: L4,
        /// Total datagram length including the 40-byte fixed header.
        length: u16,
        dscp: u8,
        later_fragment: bool,
    },
    /// Arbitrary ethertype payload (ARP and friends).
    EtherRaw { ethertype: u16, payload: Vec<u8> },
}

#[derive(Debug, Clone)]
pub struct FrameSpec {
    pub ts_us: u64,
    pub kind: FrameKind,
    /// IPv4 fragment offset in 8-byte units; nonzero marks a non-first
    /// fragment.
    pub frag_offset: u16,
}

impl FrameSpec {
    pub fn ether_raw(ts_us: u64, ethertype: u16, payload: Vec<u8>) -> FrameSpec {
        FrameSpec {
            ts_us,
            kind: FrameKind::EtherRaw { ethertype, payload },
            frag_offset: 0,
        }
    }
}

pub fn ether_ipv4(ts_us: u64, src: [u8; 4], dst: [u8; 4], l4: L4, total_len: u16, dscp: u8) -> FrameSpec {
    FrameSpec {
        ts_us,
        kind: FrameKind::Ipv4 { src, dst, l4, total_len, dscp, vlan: false },
        frag_offset: 0,
    }
}

pub fn vlan_ipv4(ts_us: u64, src: [u8; 4], dst: [u8; 4], l4: L4, total_len: u16, dscp: u8) -> FrameSpec {
    FrameSpec {
        ts_us,
        kind: FrameKind::Ipv4 { src, dst, l4, total_len, dscp, vlan: true },
        frag_offset: 0,
    }
}

/// Same shape as [`ether_ipv4`]; pair with the raw-IP link type.
pub fn raw_ipv4(ts_us: u64, src: [u8; 4], dst: [u8; 4], l4: L4, total_len: u16, dscp: u8) -> FrameSpec {
    ether_ipv4(ts_us, src, dst, l4, total_len, dscp)
}

/// IPv6 frame carrying a hop-by-hop and a fragment extension header,
/// addressed inside 2001:db8::/32. `length` includes the fixed header.
pub fn ether_ipv6(
    ts_us: u64,
    src_last: u8,
    dst_last: u8,
    l4: L4,
    length: u16,
    dscp: u8,
    later_fragment: bool,
) -> FrameSpec {
    assert!(length >= 64, "need room for extension headers");
    FrameSpec {
        ts_us,
        kind: FrameKind::Ipv6 { src_last, dst_last, l4, length, dscp, later_fragment },
        frag_offset: 0,
    }
}

fn push16(out: &mut Vec<u8>, v: u16, big: bool) {
    out.extend_from_slice(&if big { v.to_be_bytes() } else { v.to_le_bytes() });
}

fn push32(out: &mut Vec<u8>, v: u32, big: bool) {
    out.extend_from_slice(&if big { v.to_be_bytes() } else { v.to_le_bytes() });
}

fn ipv4_bytes(spec: &FrameSpec) -> Vec<u8> {
    let FrameKind::Ipv4 { src, dst, l4, total_len, dscp, .. } = &spec.kind else {
        unreachable!()
    };
    let mut b = Vec::with_capacity(28);
    b.push(0x45);
    b.push(dscp << 2);
    b.extend_from_slice(&total_len.to_be_bytes());
    b.extend_from_slice(&[0, 0]); // identification
    b.extend_from_slice(&(spec.frag_offset & 0x1fff).to_be_bytes());
    b.push(64); // ttl
    b.push(l4.proto());
    b.extend_from_slice(&[0, 0]); // checksum, unchecked
    b.extend_from_slice(src);
    b.extend_from_slice(dst);
    if spec.frag_offset == 0 {
        if let Some((sp, dp)) = l4.ports() {
            b.extend_from_slice(&sp.to_be_bytes());
            b.extend_from_slice(&dp.to_be_bytes());
            b.extend_from_slice(&[0, 0, 0, 0]); // rest of transport header
        }
    }
    b
}

fn ipv6_bytes(spec: &FrameSpec) -> Vec<u8> {
    let FrameKind::Ipv6 { src_last, dst_last, l4, length, dscp, later_fragment } = &spec.kind
    else {
        unreachable!()
    };
    let tc = dscp << 2;
    let mut b = Vec::with_capacity(64);
    b.push(0x60 | (tc >> 4));
    b.push((tc & 0x0f) << 4);
    b.extend_from_slice(&[0, 0]); // flow label
    b.extend_from_slice(&(length - 40).to_be_bytes());
    b.push(0); // next header: hop-by-hop options
    b.push(64); // hop limit
    let mut addr = [0u8; 16];
    addr[0] = 0x20;
    addr[1] = 0x01;
    addr[2] = 0x0d;
    addr[3] = 0xb8;
    addr[15] = *src_last;
    b.extend_from_slice(&addr);
    addr[15] = *dst_last;
    b.extend_from_slice(&addr);
    // Hop-by-hop header: next = fragment, zero extra length.
    b.extend_from_slice(&[44, 0, 0, 0, 0, 0, 0, 0]);
    // Fragment header: next = transport, offset chosen by the flag.
    b.push(l4.proto());
    b.push(0);
    let offset_field: u16 = if *later_fragment { (100 << 3) | 1 } else { 1 };
    b.extend_from_slice(&offset_field.to_be_bytes());
    b.extend_from_slice(&[0, 0, 0, 1]); // identification
    if let Some((sp, dp)) = l4.ports() {
        b.extend_from_slice(&sp.to_be_bytes());
        b.extend_from_slice(&dp.to_be_bytes());
        b.extend_from_slice(&[0, 0, 0, 0]);
    }
    b
}

/// Serializes frames into a complete pcap byte stream.
///
/// Frame bodies hold the link and network headers plus the transport
/// ports; payload past that point is omitted (a snaplen-style capture), so
/// the encoded `incl_len` is usually smaller than the IP length field.
pub fn encode_pcap(frames: &[FrameSpec], linktype: u32, enc: Encode) -> Vec<u8> {
    let big = enc.big_endian();
    let mut out = Vec::new();
    out.extend_from_slice(&enc.magic());
    push16(&mut out, 2, big); // version major
    push16(&mut out, 4, big); // version minor
    push32(&mut out, 0, big); // thiszone
    push32(&mut out, 0, big); // sigfigs
    push32(&mut out, 65535, big); // snaplen
    push32(&mut out, linktype, big);

    for spec in frames {
        let net = match &spec.kind {
            FrameKind::Ipv4 { .. } => ipv4_bytes(spec),
            FrameKind::Ipv6 { .. } => ipv6_bytes(spec),
            FrameKind::EtherRaw { payload, .. } => payload.clone(),
        };
        let mut body = Vec::with_capacity(net.len() + 18);
        if linktype == crate::ingest::pcap::LINKTYPE_ETHERNET {
            body.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x01]); // dst mac
            body.extend_from_slice(&[0x02, 0, 0, 0, 0, 0x02]); // src mac
            let (ethertype, vlan) = match &spec.kind {
                FrameKind::Ipv4 { vlan, .. } => (0x0800u16, *vlan),
                FrameKind::Ipv6 { .. } => (0x86dd, false),
                FrameKind::EtherRaw { ethertype, .. } => (*ethertype, false),
            };
            if vlan {
                body.extend_from_slice(&0x8100u16.to_be_bytes());
                body.extend_from_slice(&[0x00, 0x64]); // VLAN 100
            }
            body.extend_from_slice(&ethertype.to_be_bytes());
        }
        body.extend_from_slice(&net);

        push32(&mut out, (spec.ts_us / 1_000_000) as u32, big);
        let frac = spec.ts_us % 1_000_000;
        let frac = if enc.nanosecond() { frac * 1_000 } else { frac };
        push32(&mut out, frac as u32, big);
        push32(&mut out, body.len() as u32, big);
        push32(&mut out, body.len() as u32, big);
        out.extend_from_slice(&body);
    }
    out
}

/// Draws a structurally valid [`PacketRecord`] covering the corner
/// cases every consumer must survive: both address families, port and
/// portless protocols, fragments, full dscp range.
pub fn random_record<R: Rng>(rng: &mut R) -> PacketRecord {
    let v4 = rng.random_bool(0.8);
    let (src_addr, dst_addr) = if v4 {
        (
            std::net::Ipv4Addr::from(rng.random::<u32>()).into(),
            std::net::Ipv4Addr::from(rng.random::<u32>()).into(),
        )
    } else {
        (
            std::net::Ipv6Addr::from(rng.random::<u128>()).into(),
            std::net::Ipv6Addr::from(rng.random::<u128>()).into(),
        )
    };
    let ip_proto: u8 = match rng.random_range(0..10) {
        0..=3 => 6,
        4..=6 => 17,
        7 => 1,
        8 => 89,
        _ => rng.random(),
    };
    let has_ports = ip_proto == 6 || ip_proto == 17;
    // One in five TCP/UDP records is a non-first fragment: ports zero.
    let fragment = has_ports && rng.random_bool(0.2);
    let (src_port, dst_port) = if has_ports && !fragment {
        (rng.random_range(1..=u16::MAX), rng.random_range(1..=u16::MAX))
    } else {
        (0, 0)
    };
    let min_len = if v4 { 20 } else { 40 };
    PacketRecord {
        ts: Timestamp::from_micros(rng.random_range(0..=2_000_000_000_000_000)),
        src_addr,
        dst_addr,
        ip_proto,
        src_port,
        dst_port,
        length: rng.random_range(min_len..=65535),
        dscp: rng.random_range(0..=63),
    }
}
