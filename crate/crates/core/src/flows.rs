//! Per-peer download flow ranking.
//!
//! A flow pools all download traffic from one remote address across its
//! ports and sessions; peers routinely talk from several ports, so the
//! per-address view is the one that matches "top peer" questions. Finer
//! granularity is available through session keys.

use serde::Serialize;
use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord};
use crate::session::{filter_video, SessionLabel, Thresholds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FlowSummary {
    pub remote_addr: Ipv4Addr,
    /// Download bytes from this peer (IP total lengths).
    pub bytes: u64,
    pub packets: u64,
    /// Download bytes surviving the video filter.
    pub video_bytes: u64,
    pub video_packets: u64,
}

impl FlowSummary {
    pub fn signaling_packets(&self) -> u64 {
        self.packets - self.video_packets
    }

    pub fn signaling_bytes(&self) -> u64 {
        self.bytes - self.video_bytes
    }
}

/// One summary per remote address seen in download traffic, sorted by bytes
/// descending with address-ascending tie-break.
pub fn rank_download_flows(
    records: &[PacketRecord],
    labels: &[SessionLabel],
    thresholds: &Thresholds,
) -> Result<Vec<FlowSummary>> {
    let mut flows: BTreeMap<Ipv4Addr, FlowSummary> = BTreeMap::new();
    for rec in records {
        if rec.direction != Direction::Down {
            continue;
        }
        let entry = flows.entry(rec.src_addr).or_insert(FlowSummary {
            remote_addr: rec.src_addr,
            bytes: 0,
            packets: 0,
            video_bytes: 0,
            video_packets: 0,
        });
        entry.bytes += u64::from(rec.ip_total_len);
        entry.packets += 1;
    }
    if flows.is_empty() {
        return Err(Error::EmptySeries {
            detail: "no download records to rank".into(),
        });
    }
    for rec in filter_video(records, labels, thresholds)? {
        if rec.direction != Direction::Down {
            continue;
        }
        let entry = flows.get_mut(&rec.src_addr).expect("video nests in flows");
        entry.video_bytes += u64::from(rec.ip_total_len);
        entry.video_packets += 1;
    }
    let mut ranked: Vec<FlowSummary> = flows.into_values().collect();
    ranked.sort_by(|a, b| {
        b.bytes
            .cmp(&a.bytes)
            .then_with(|| a.remote_addr.cmp(&b.remote_addr))
    });
    Ok(ranked)
}

/// All download records received from `remote_addr`, order preserved.
pub fn flow_records(records: &[PacketRecord], remote_addr: Ipv4Addr) -> Result<Vec<PacketRecord>> {
    let flow: Vec<PacketRecord> = records
        .iter()
        .filter(|r| r.direction == Direction::Down && r.src_addr == remote_addr)
        .copied()
        .collect();
    if flow.is_empty() {
        return Err(Error::NoSuchFlow { addr: remote_addr });
    }
    Ok(flow)
}
