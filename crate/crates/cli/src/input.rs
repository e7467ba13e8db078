//! Packet input loading: pcap or canonical record CSV, switched on the
//! file extension.

use std::collections::BTreeSet;
use std::net::Ipv4Addr;
use std::path::Path;

use anyhow::{bail, Context, Result};
use wavetrace_core::{read_pcap, read_records_path, PacketRecord};

pub fn parse_monitored(entries: &[String]) -> Result<BTreeSet<Ipv4Addr>> {
    entries
        .iter()
        .map(|s| {
            s.parse()
                .with_context(|| format!("bad monitored address {s:?}"))
        })
        .collect()
}

/// Loads packets from `input`. `.pcap`/`.cap` files are decoded against the
/// monitored set; anything else is read as canonical record CSV, which
/// carries directions already.
pub fn load_records(input: &Path, monitored: &[String]) -> Result<Vec<PacketRecord>> {
    let ext = input
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    if matches!(ext.as_deref(), Some("pcap" | "cap")) {
        if monitored.is_empty() {
            bail!("pcap input needs at least one monitored address (--monitored)");
        }
        let hosts = parse_monitored(monitored)?;
        let ingest = read_pcap(input, &hosts)?;
        let skipped = ingest.skipped;
        if skipped.total() > 0 {
            eprintln!(
                "note: skipped {} packets (non-ip {}, ipv6 {}, non-tcp/udp {}, \
                 fragmented {}, third-party {}, truncated {})",
                skipped.total(),
                skipped.non_ip,
                skipped.ipv6,
                skipped.non_tcp_udp,
                skipped.fragmented,
                skipped.third_party,
                skipped.truncated
            );
        }
        Ok(ingest.records)
    } else {
        Ok(read_records_path(input)?)
    }
}
