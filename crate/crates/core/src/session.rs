//! Session grouping and video/signaling separation.
//!
//! A session is the bidirectional packet stream between two (address, port)
//! endpoints over one transport. A session counts as video when it carries at
//! least `min_large_packets` packets of at least `large_packet_bytes` IP
//! bytes; its large packets are the video traffic, and everything else
//! (small packets of video sessions, all packets of other sessions) is
//! signaling.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord, Transport};

/// Direction-agnostic session identity: endpoints are ordered as
/// (address, port) pairs so both packet directions map to the same key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SessionKey {
    pub addr_lo: Ipv4Addr,
    pub port_lo: u16,
    pub addr_hi: Ipv4Addr,
    pub port_hi: u16,
    pub transport: Transport,
}

impl SessionKey {
    pub fn of(rec: &PacketRecord) -> Self {
        Self::from_endpoints(
            rec.src_addr,
            rec.src_port,
            rec.dst_addr,
            rec.dst_port,
            rec.transport,
        )
    }

    pub fn from_endpoints(
        a_addr: Ipv4Addr,
        a_port: u16,
        b_addr: Ipv4Addr,
        b_port: u16,
        transport: Transport,
    ) -> Self {
        let a = (a_addr, a_port);
        let b = (b_addr, b_port);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        SessionKey {
            addr_lo: lo.0,
            port_lo: lo.1,
            addr_hi: hi.0,
            port_hi: hi.1,
            transport,
        }
    }
}

impl std::fmt::Display for SessionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}/{}",
            self.addr_lo, self.port_lo, self.addr_hi, self.port_hi, self.transport
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum IP total length for a packet to count as large (video payload).
    pub large_packet_bytes: u32,
    /// Minimum number of large packets for a session to count as video.
    pub min_large_packets: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            large_packet_bytes: 1000,
            min_large_packets: 10,
        }
    }
}

pub fn group_sessions(records: &[PacketRecord]) -> BTreeMap<SessionKey, Vec<PacketRecord>> {
    let mut map: BTreeMap<SessionKey, Vec<PacketRecord>> = BTreeMap::new();
    for rec in records {
        map.entry(SessionKey::of(rec)).or_default().push(*rec);
    }
    map
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SessionLabel {
    pub key: SessionKey,
    pub packets: u64,
    pub bytes: u64,
    pub large_packet_count: u64,
    pub is_video: bool,
}

/// Labels come out in session-key order, one per session.
pub fn classify_sessions(
    sessions: &BTreeMap<SessionKey, Vec<PacketRecord>>,
    thresholds: &Thresholds,
) -> Vec<SessionLabel> {
    sessions
        .iter()
        .map(|(key, packets)| {
            let large = packets
                .iter()
                .filter(|p| p.ip_total_len >= thresholds.large_packet_bytes)
                .count() as u64;
            SessionLabel {
                key: *key,
                packets: packets.len() as u64,
                bytes: packets.iter().map(|p| u64::from(p.ip_total_len)).sum(),
                large_packet_count: large,
                is_video: large >= u64::from(thresholds.min_large_packets),
            }
        })
        .collect()
}

fn video_keys(labels: &[SessionLabel]) -> BTreeMap<SessionKey, bool> {
    labels.iter().map(|l| (l.key, l.is_video)).collect()
}

/// Keeps the large packets of video sessions, preserving input order. The
/// complement of the result (relative to `records`) is the signaling traffic.
pub fn filter_video(
    records: &[PacketRecord],
    labels: &[SessionLabel],
    thresholds: &Thresholds,
) -> Result<Vec<PacketRecord>> {
    let lookup = video_keys(labels);
    let mut kept = Vec::new();
    for rec in records {
        let key = SessionKey::of(rec);
        let is_video = lookup.get(&key).ok_or_else(|| Error::UnknownSession {
            detail: key.to_string(),
        })?;
        if *is_video && rec.ip_total_len >= thresholds.large_packet_bytes {
            kept.push(*rec);
        }
    }
    Ok(kept)
}

/// Byte shares of signaling traffic, overall and per direction. A direction
/// with no bytes at all has no defined ratio (`None`), never 0/0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignalingReport {
    pub up_video_bytes: u64,
    pub up_signaling_bytes: u64,
    pub down_video_bytes: u64,
    pub down_signaling_bytes: u64,
    pub total_ratio: Option<f64>,
    pub up_ratio: Option<f64>,
    pub down_ratio: Option<f64>,
}

pub fn signaling_report(
    records: &[PacketRecord],
    labels: &[SessionLabel],
    thresholds: &Thresholds,
) -> Result<SignalingReport> {
    let lookup = video_keys(labels);
    let mut video = [0u64; 2];
    let mut signaling = [0u64; 2];
    for rec in records {
        let key = SessionKey::of(rec);
        let is_video = *lookup.get(&key).ok_or_else(|| Error::UnknownSession {
            detail: key.to_string(),
        })?;
        let d = match rec.direction {
            Direction::Up => 0,
            Direction::Down => 1,
        };
        if is_video && rec.ip_total_len >= thresholds.large_packet_bytes {
            video[d] += u64::from(rec.ip_total_len);
        } else {
            signaling[d] += u64::from(rec.ip_total_len);
        }
    }
    let ratio = |sig: u64, vid: u64| {
        let total = sig + vid;
        (total > 0).then(|| sig as f64 / total as f64)
    };
    Ok(SignalingReport {
        up_video_bytes: video[0],
        up_signaling_bytes: signaling[0],
        down_video_bytes: video[1],
        down_signaling_bytes: signaling[1],
        total_ratio: ratio(signaling[0] + signaling[1], video[0] + video[1]),
        up_ratio: ratio(signaling[0], video[0]),
        down_ratio: ratio(signaling[1], video[1]),
    })
}

/// Mean useful download rate in Kbit/s (1 Kbit = 1024 bit) implied by trace
/// totals: `total_mb` is the full two-way volume in MiB, of which
/// `download_fraction` was downloaded and, of that, `signaling_ratio` was
/// signaling rather than video. `dead_time_s` subtracts any known inactive
/// span from the duration.
pub fn video_bitrate(
    total_mb: f64,
    download_fraction: f64,
    signaling_ratio: f64,
    duration_s: f64,
    dead_time_s: f64,
) -> Result<f64> {
    for (name, frac) in [
        ("download_fraction", download_fraction),
        ("signaling_ratio", signaling_ratio),
    ] {
        if !(0.0..=1.0).contains(&frac) {
            return Err(Error::InvalidParameter {
                detail: format!("{name} must lie in [0, 1], got {frac}"),
            });
        }
    }
    if !total_mb.is_finite() || total_mb < 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("total_mb must be nonnegative, got {total_mb}"),
        });
    }
    if dead_time_s < 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("dead_time_s must be nonnegative, got {dead_time_s}"),
        });
    }
    let active = duration_s - dead_time_s;
    if active.is_nan() || active <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!(
                "active duration must be positive (duration {duration_s} s, dead time {dead_time_s} s)"
            ),
        });
    }
    let video_bits = total_mb * 1_048_576.0 * 8.0 * download_fraction * (1.0 - signaling_ratio);
    Ok(video_bits / active / 1024.0)
}
