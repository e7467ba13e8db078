use serde::Serialize;

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord, Transport};

/// Volume breakdown of a record stream. All fractions are shares of
/// `total_bytes`, so the two directions sum to 1 and, within a direction, the
/// TCP and UDP shares sum to that direction's share.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceSummary {
    pub duration_s: f64,
    pub packets: u64,
    pub total_bytes: u64,
    pub up_fraction: f64,
    pub up_tcp_fraction: f64,
    pub up_udp_fraction: f64,
    pub down_fraction: f64,
    pub down_tcp_fraction: f64,
    pub down_udp_fraction: f64,
}

impl TraceSummary {
    pub fn total_mib(&self) -> f64 {
        self.total_bytes as f64 / (1024.0 * 1024.0)
    }
}

pub fn summarize(records: &[PacketRecord]) -> Result<TraceSummary> {
    if records.is_empty() {
        return Err(Error::EmptySeries {
            detail: "no records to summarize".into(),
        });
    }
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let mut bytes = [[0u64; 2]; 2]; // [direction][transport]
    for rec in records {
        t_min = t_min.min(rec.timestamp);
        t_max = t_max.max(rec.timestamp);
        let d = match rec.direction {
            Direction::Up => 0,
            Direction::Down => 1,
        };
        let t = match rec.transport {
            Transport::Tcp => 0,
            Transport::Udp => 1,
        };
        bytes[d][t] += u64::from(rec.ip_total_len);
    }
    let total: u64 = bytes.iter().flatten().sum();
    let frac = |b: u64| b as f64 / total as f64;
    Ok(TraceSummary {
        duration_s: t_max - t_min,
        packets: records.len() as u64,
        total_bytes: total,
        up_fraction: frac(bytes[0][0] + bytes[0][1]),
        up_tcp_fraction: frac(bytes[0][0]),
        up_udp_fraction: frac(bytes[0][1]),
        down_fraction: frac(bytes[1][0] + bytes[1][1]),
        down_tcp_fraction: frac(bytes[1][0]),
        down_udp_fraction: frac(bytes[1][1]),
    })
}
