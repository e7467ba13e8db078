//! Classic pcap ingestion.
//!
//! Scope is deliberately narrow: classic (non-ng) capture files, Ethernet
//! link layer, IPv4 over TCP or UDP. Everything else is skipped and counted.
//! Packet sizes come from the IP and transport header length fields, so a
//! short snap length does not affect them as long as the headers themselves
//! were captured.

use byteorder::{BigEndian, ByteOrder, LittleEndian};
use std::collections::BTreeSet;
use std::io::Read;
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord, Transport};

const GLOBAL_HEADER_LEN: usize = 24;
const RECORD_HEADER_LEN: usize = 16;
const LINKTYPE_ETHERNET: u32 = 1;
const ETHERTYPE_IPV4: u16 = 0x0800;
const ETHERTYPE_IPV6: u16 = 0x86DD;
const ETHERTYPE_VLAN: u16 = 0x8100;
const ETHERTYPE_QINQ: u16 = 0x88A8;

/// Why captured packets were left out of the record stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SkipCounters {
    /// Link payload was not IPv4 (ARP, LLC, unknown ethertypes).
    pub non_ip: u64,
    /// IPv6 datagrams; the pipeline is IPv4-only.
    pub ipv6: u64,
    /// IPv4 protocols other than TCP and UDP.
    pub non_tcp_udp: u64,
    /// Non-first IP fragments, whose transport header is unavailable.
    pub fragmented: u64,
    /// Neither endpoint is in the monitored host set.
    pub third_party: u64,
    /// Capture too short (or header fields inconsistent) to decode.
    pub truncated: u64,
}

impl SkipCounters {
    pub fn total(&self) -> u64 {
        self.non_ip
            + self.ipv6
            + self.non_tcp_udp
            + self.fragmented
            + self.third_party
            + self.truncated
    }
}

#[derive(Clone, Debug)]
pub struct Ingest {
    /// Accepted records, sorted by time and rebased to the first one.
    pub records: Vec<PacketRecord>,
    pub skipped: SkipCounters,
}

#[derive(Clone, Copy)]
enum Endian {
    Little,
    Big,
}

struct RawRecord {
    sec: u32,
    subsec: u32,
    src_addr: Ipv4Addr,
    src_port: u16,
    dst_addr: Ipv4Addr,
    dst_port: u16,
    transport: Transport,
    ip_total_len: u32,
    payload_len: u32,
    direction: Direction,
}

pub fn read_pcap(path: &Path, monitored: &BTreeSet<Ipv4Addr>) -> Result<Ingest> {
    if monitored.is_empty() {
        return Err(Error::InvalidParameter {
            detail: "monitored host set is empty".into(),
        });
    }
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_pcap_from(std::io::BufReader::new(file), path.to_path_buf(), monitored)
}

fn read_pcap_from<R: Read>(
    mut input: R,
    path: PathBuf,
    monitored: &BTreeSet<Ipv4Addr>,
) -> Result<Ingest> {
    let io_err = |source| Error::Io {
        path: path.clone(),
        source,
    };
    let malformed = |detail: String| Error::Malformed {
        path: path.clone(),
        detail,
    };

    let mut header = [0u8; GLOBAL_HEADER_LEN];
    input.read_exact(&mut header).map_err(io_err)?;
    let (endian, subsec_unit) = match header[..4] {
        [0xA1, 0xB2, 0xC3, 0xD4] => (Endian::Big, 1e-6),
        [0xD4, 0xC3, 0xB2, 0xA1] => (Endian::Little, 1e-6),
        [0xA1, 0xB2, 0x3C, 0x4D] => (Endian::Big, 1e-9),
        [0x4D, 0x3C, 0xB2, 0xA1] => (Endian::Little, 1e-9),
        _ => {
            return Err(malformed(format!(
                "unrecognized pcap magic {:02x?}",
                &header[..4]
            )))
        }
    };
    let read_u32 = |buf: &[u8]| match endian {
        Endian::Little => LittleEndian::read_u32(buf),
        Endian::Big => BigEndian::read_u32(buf),
    };
    let link_type = read_u32(&header[20..24]);
    if link_type != LINKTYPE_ETHERNET {
        return Err(malformed(format!(
            "link type {link_type} is not Ethernet; only Ethernet captures are supported"
        )));
    }

    let mut skipped = SkipCounters::default();
    let mut raw: Vec<RawRecord> = Vec::new();
    let mut rec_header = [0u8; RECORD_HEADER_LEN];
    let mut data = Vec::new();
    loop {
        match read_fully(&mut input, &mut rec_header) {
            ReadOutcome::Eof => break,
            ReadOutcome::Partial => {
                skipped.truncated += 1;
                break;
            }
            ReadOutcome::Err(source) => return Err(io_err(source)),
            ReadOutcome::Full => {}
        }
        let sec = read_u32(&rec_header[0..4]);
        let subsec = read_u32(&rec_header[4..8]);
        let incl_len = read_u32(&rec_header[8..12]) as usize;
        data.resize(incl_len, 0);
        match read_fully(&mut input, &mut data) {
            ReadOutcome::Full => {}
            ReadOutcome::Eof | ReadOutcome::Partial => {
                skipped.truncated += 1;
                break;
            }
            ReadOutcome::Err(source) => return Err(io_err(source)),
        }
        if let Some(rec) = decode_frame(&data, sec, subsec, monitored, &mut skipped) {
            raw.push(rec);
        }
    }

    // Sort on the integer timestamp pair, then rebase against the earliest
    // accepted packet so differences stay exact at capture resolution.
    raw.sort_by_key(|r| (r.sec, r.subsec));
    let base = raw.first().map(|r| (r.sec, r.subsec));
    let records = raw
        .iter()
        .map(|r| {
            let (sec0, sub0) = base.expect("nonempty");
            // Sorted, so r.sec >= sec0; the subsecond difference may be negative.
            let dt =
                f64::from(r.sec - sec0) + (f64::from(r.subsec) - f64::from(sub0)) * subsec_unit;
            PacketRecord {
                timestamp: dt,
                src_addr: r.src_addr,
                src_port: r.src_port,
                dst_addr: r.dst_addr,
                dst_port: r.dst_port,
                transport: r.transport,
                ip_total_len: r.ip_total_len,
                payload_len: r.payload_len,
                direction: r.direction,
            }
        })
        .collect();
    Ok(Ingest { records, skipped })
}

enum ReadOutcome {
    Full,
    Eof,
    Partial,
    Err(std::io::Error),
}

fn read_fully<R: Read>(input: &mut R, buf: &mut [u8]) -> ReadOutcome {
    let mut filled = 0;
    while filled < buf.len() {
        match input.read(&mut buf[filled..]) {
            Ok(0) => {
                return if filled == 0 {
                    ReadOutcome::Eof
                } else {
                    ReadOutcome::Partial
                }
            }
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return ReadOutcome::Err(e),
        }
    }
    ReadOutcome::Full
}

fn decode_frame(
    data: &[u8],
    sec: u32,
    subsec: u32,
    monitored: &BTreeSet<Ipv4Addr>,
    skipped: &mut SkipCounters,
) -> Option<RawRecord> {
    if data.len() < 14 {
        skipped.truncated += 1;
        return None;
    }
    let mut offset = 12;
    let mut ethertype = BigEndian::read_u16(&data[offset..offset + 2]);
    offset += 2;
    // Unwrap up to two VLAN tags.
    let mut tags = 0;
    while (ethertype == ETHERTYPE_VLAN || ethertype == ETHERTYPE_QINQ) && tags < 2 {
        if data.len() < offset + 4 {
            skipped.truncated += 1;
            return None;
        }
        ethertype = BigEndian::read_u16(&data[offset + 2..offset + 4]);
        offset += 4;
        tags += 1;
    }
    match ethertype {
        ETHERTYPE_IPV4 => {}
        ETHERTYPE_IPV6 => {
            skipped.ipv6 += 1;
            return None;
        }
        _ => {
            skipped.non_ip += 1;
            return None;
        }
    }

    let ip = &data[offset..];
    if ip.len() < 20 {
        skipped.truncated += 1;
        return None;
    }
    let version = ip[0] >> 4;
    let ihl = usize::from(ip[0] & 0x0F) * 4;
    if version != 4 || ihl < 20 {
        skipped.truncated += 1;
        return None;
    }
    let total_len = usize::from(BigEndian::read_u16(&ip[2..4]));
    let frag_offset = BigEndian::read_u16(&ip[6..8]) & 0x1FFF;
    let protocol = ip[9];
    let src_addr = Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]);
    let dst_addr = Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]);

    let transport = match protocol {
        6 => Transport::Tcp,
        17 => Transport::Udp,
        _ => {
            skipped.non_tcp_udp += 1;
            return None;
        }
    };
    if frag_offset > 0 {
        skipped.fragmented += 1;
        return None;
    }

    let direction = if monitored.contains(&src_addr) {
        Direction::Up
    } else if monitored.contains(&dst_addr) {
        Direction::Down
    } else {
        skipped.third_party += 1;
        return None;
    };

    let th = &ip[ihl.min(ip.len())..];
    let (src_port, dst_port, header_len) = match transport {
        Transport::Tcp => {
            if th.len() < 13 {
                skipped.truncated += 1;
                return None;
            }
            let data_offset = usize::from(th[12] >> 4) * 4;
            if data_offset < 20 {
                skipped.truncated += 1;
                return None;
            }
            (
                BigEndian::read_u16(&th[0..2]),
                BigEndian::read_u16(&th[2..4]),
                data_offset,
            )
        }
        Transport::Udp => {
            if th.len() < 8 {
                skipped.truncated += 1;
                return None;
            }
            (
                BigEndian::read_u16(&th[0..2]),
                BigEndian::read_u16(&th[2..4]),
                8,
            )
        }
    };
    if total_len < ihl + header_len {
        skipped.truncated += 1;
        return None;
    }

    Some(RawRecord {
        sec,
        subsec,
        src_addr,
        src_port,
        dst_addr,
        dst_port,
        transport,
        ip_total_len: total_len as u32,
        payload_len: (total_len - ihl - header_len) as u32,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    /// Minimal classic pcap writer used only to exercise the reader.
    pub struct PcapBuilder {
        bytes: Vec<u8>,
    }

    impl PcapBuilder {
        pub fn new_le_micros() -> Self {
            let mut bytes = Vec::new();
            bytes.extend_from_slice(&0xA1B2C3D4u32.to_le_bytes());
            bytes.extend_from_slice(&2u16.to_le_bytes());
            bytes.extend_from_slice(&4u16.to_le_bytes());
            bytes.extend_from_slice(&0i32.to_le_bytes());
            bytes.extend_from_slice(&0u32.to_le_bytes());
            bytes.extend_from_slice(&65535u32.to_le_bytes());
            bytes.extend_from_slice(&LINKTYPE_ETHERNET.to_le_bytes());
            Self { bytes }
        }

        pub fn frame(&mut self, sec: u32, usec: u32, payload: &[u8]) -> &mut Self {
            self.bytes.extend_from_slice(&sec.to_le_bytes());
            self.bytes.extend_from_slice(&usec.to_le_bytes());
            self.bytes
                .extend_from_slice(&(payload.len() as u32).to_le_bytes());
            self.bytes
                .extend_from_slice(&(payload.len() as u32).to_le_bytes());
            self.bytes.extend_from_slice(payload);
            self
        }

        pub fn write_to(&self, path: &Path) {
            let mut f = std::fs::File::create(path).unwrap();
            f.write_all(&self.bytes).unwrap();
        }
    }

    pub fn udp_frame(
        src: [u8; 4],
        sport: u16,
        dst: [u8; 4],
        dport: u16,
        udp_payload: usize,
    ) -> Vec<u8> {
        let mut f = vec![0u8; 14];
        f[12] = 0x08;
        f[13] = 0x00;
        let total = 20 + 8 + udp_payload;
        let mut ip = vec![0u8; 20];
        ip[0] = 0x45;
        ip[2] = (total >> 8) as u8;
        ip[3] = (total & 0xFF) as u8;
        ip[8] = 64;
        ip[9] = 17;
        ip[12..16].copy_from_slice(&src);
        ip[16..20].copy_from_slice(&dst);
        f.extend_from_slice(&ip);
        let udp_len = 8 + udp_payload;
        f.extend_from_slice(&sport.to_be_bytes());
        f.extend_from_slice(&dport.to_be_bytes());
        f.extend_from_slice(&(udp_len as u16).to_be_bytes());
        f.extend_from_slice(&0u16.to_be_bytes());
        f.extend_from_slice(&vec![0u8; udp_payload]);
        f
    }

    pub fn tcp_frame(
        src: [u8; 4],
        sport: u16,
        dst: [u8; 4],
        dport: u16,
        tcp_payload: usize,
    ) -> Vec<u8> {
        let mut f = vec![0u8; 14];
        f[12] = 0x08;
        f[13] = 0x00;
        let total = 20 + 20 + tcp_payload;
        let mut ip = vec![0u8; 20];
        ip[0] = 0x45;
        ip[2] = (total >> 8) as u8;
        ip[3] = (total & 0xFF) as u8;
        ip[8] = 64;
        ip[9] = 6;
        ip[12..16].copy_from_slice(&src);
        ip[16..20].copy_from_slice(&dst);
        f.extend_from_slice(&ip);
        let mut tcp = vec![0u8; 20];
        tcp[0..2].copy_from_slice(&sport.to_be_bytes());
        tcp[2..4].copy_from_slice(&dport.to_be_bytes());
        tcp[12] = 5 << 4;
        f.extend_from_slice(&tcp);
        f.extend_from_slice(&vec![0u8; tcp_payload]);
        f
    }

    fn monitored() -> BTreeSet<Ipv4Addr> {
        [Ipv4Addr::new(10, 0, 0, 1)].into_iter().collect()
    }

    #[test]
    fn reads_udp_and_tcp_with_sizes_from_header_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut b = PcapBuilder::new_le_micros();
        b.frame(
            100,
            0,
            &udp_frame([9, 9, 9, 9], 4000, [10, 0, 0, 1], 5000, 972),
        );
        b.frame(
            100,
            500_000,
            &tcp_frame([10, 0, 0, 1], 5000, [9, 9, 9, 9], 80, 0),
        );
        b.write_to(&path);

        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert_eq!(ingest.records.len(), 2);
        let udp = &ingest.records[0];
        assert_eq!(udp.direction, Direction::Down);
        assert_eq!(udp.transport, Transport::Udp);
        assert_eq!(udp.ip_total_len, 1000);
        assert_eq!(udp.payload_len, 972);
        assert_eq!(udp.timestamp, 0.0);
        let tcp = &ingest.records[1];
        assert_eq!(tcp.direction, Direction::Up);
        assert_eq!(tcp.payload_len, 0);
        assert!(tcp.is_empty_tcp());
        assert!((tcp.timestamp - 0.5).abs() < 1e-9);
        assert_eq!(ingest.skipped.total(), 0);
    }

    #[test]
    fn snap_truncated_payload_keeps_header_declared_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        // Full headers captured, payload cut to 4 of 1300 bytes.
        let full = udp_frame([9, 9, 9, 9], 4000, [10, 0, 0, 1], 5000, 1300);
        let snapped = &full[..14 + 20 + 8 + 4];
        PcapBuilder::new_le_micros()
            .frame(7, 0, snapped)
            .write_to(&path);
        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert_eq!(ingest.records[0].ip_total_len, 1328);
        assert_eq!(ingest.records[0].payload_len, 1300);
    }

    #[test]
    fn skips_are_counted_by_reason() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut b = PcapBuilder::new_le_micros();
        // ARP
        let mut arp = vec![0u8; 42];
        arp[12] = 0x08;
        arp[13] = 0x06;
        b.frame(1, 0, &arp);
        // IPv6
        let mut v6 = vec![0u8; 60];
        v6[12] = 0x86;
        v6[13] = 0xDD;
        b.frame(1, 1, &v6);
        // ICMP between monitored and remote
        let mut icmp = udp_frame([10, 0, 0, 1], 0, [9, 9, 9, 9], 0, 8);
        icmp[14 + 9] = 1;
        b.frame(1, 2, &icmp);
        // Third-party UDP
        b.frame(1, 3, &udp_frame([8, 8, 8, 8], 53, [9, 9, 9, 9], 53, 10));
        // Accepted
        b.frame(1, 4, &udp_frame([9, 9, 9, 9], 1, [10, 0, 0, 1], 2, 10));
        b.write_to(&path);

        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert_eq!(ingest.records.len(), 1);
        assert_eq!(ingest.skipped.non_ip, 1);
        assert_eq!(ingest.skipped.ipv6, 1);
        assert_eq!(ingest.skipped.non_tcp_udp, 1);
        assert_eq!(ingest.skipped.third_party, 1);
    }

    #[test]
    fn out_of_order_capture_is_sorted_and_rebased() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut b = PcapBuilder::new_le_micros();
        b.frame(50, 10, &udp_frame([9, 9, 9, 9], 1, [10, 0, 0, 1], 2, 10));
        b.frame(50, 4, &udp_frame([9, 9, 9, 9], 1, [10, 0, 0, 1], 2, 10));
        b.write_to(&path);
        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert_eq!(ingest.records[0].timestamp, 0.0);
        assert!((ingest.records[1].timestamp - 6e-6).abs() < 1e-12);
    }

    #[test]
    fn non_ethernet_link_is_a_fatal_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut b = PcapBuilder::new_le_micros();
        // Patch the link type to LINKTYPE_RAW (101).
        b.bytes[20..24].copy_from_slice(&101u32.to_le_bytes());
        b.write_to(&path);
        let err = read_pcap(&path, &monitored()).unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
        assert_eq!(err.class(), crate::error::ErrorClass::Input);
    }

    #[test]
    fn big_endian_magic_is_understood() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&0xA1B2C3D4u32.to_be_bytes());
        bytes.extend_from_slice(&2u16.to_be_bytes());
        bytes.extend_from_slice(&4u16.to_be_bytes());
        bytes.extend_from_slice(&0i32.to_be_bytes());
        bytes.extend_from_slice(&0u32.to_be_bytes());
        bytes.extend_from_slice(&65535u32.to_be_bytes());
        bytes.extend_from_slice(&LINKTYPE_ETHERNET.to_be_bytes());
        let frame = udp_frame([9, 9, 9, 9], 1, [10, 0, 0, 1], 2, 6);
        bytes.extend_from_slice(&3u32.to_be_bytes());
        bytes.extend_from_slice(&0u32.to_be_bytes());
        bytes.extend_from_slice(&(frame.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&(frame.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&frame);
        std::fs::write(&path, &bytes).unwrap();
        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert_eq!(ingest.records.len(), 1);
        assert_eq!(ingest.records[0].ip_total_len, 34);
    }

    #[test]
    fn file_ending_mid_record_counts_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pcap");
        let mut b = PcapBuilder::new_le_micros();
        b.frame(1, 0, &udp_frame([9, 9, 9, 9], 1, [10, 0, 0, 1], 2, 10));
        b.bytes.truncate(b.bytes.len() - 5);
        b.write_to(&path);
        let ingest = read_pcap(&path, &monitored()).unwrap();
        assert!(ingest.records.is_empty());
        assert_eq!(ingest.skipped.truncated, 1);
    }
}
