use serde::{Deserialize, Serialize};
use std::net::Ipv4Addr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    Tcp,
    Udp,
}

impl std::fmt::Display for Transport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Transport::Tcp => "tcp",
            Transport::Udp => "udp",
        })
    }
}

/// Traffic direction relative to the monitored host set: `Up` leaves a
/// monitored host, `Down` arrives at one. Every record carries exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

/// One decoded packet. `timestamp` is seconds since the first packet of the
/// trace; `ip_total_len` is the IPv4 total-length field and is the size every
/// classification and volume rule operates on; `payload_len` is the transport
/// payload size implied by the header length fields (so snap-length capture
/// truncation does not distort it).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub timestamp: f64,
    pub src_addr: Ipv4Addr,
    pub src_port: u16,
    pub dst_addr: Ipv4Addr,
    pub dst_port: u16,
    pub transport: Transport,
    pub ip_total_len: u32,
    pub payload_len: u32,
    pub direction: Direction,
}

impl PacketRecord {
    /// True for TCP segments that carry no payload (pure acknowledgments).
    /// UDP datagrams never count as empty for filtering purposes.
    pub fn is_empty_tcp(&self) -> bool {
        self.transport == Transport::Tcp && self.payload_len == 0
    }
}
