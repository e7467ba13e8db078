use std::io::Write;

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord};
use crate::real::Real;

/// Regularly spaced series of per-bin values. Binned packet counts hold
/// nonnegative integers (stored in the scalar type); synthetic generators may
/// fill it with real values.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T> {
    /// Bin width in seconds.
    pub bin_width: T,
    /// Absolute time of the left edge of bin 0, in seconds.
    pub start: T,
    pub values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn from_values(bin_width: T, values: Vec<T>) -> Self {
        TimeSeries {
            bin_width,
            start: T::zero(),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }
}

/// Which records of a trace enter the count series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinFilter {
    pub direction: Direction,
    /// Drop TCP segments without payload (pure acknowledgments carry no
    /// application data). UDP datagrams always count.
    pub payload_only: bool,
}

impl BinFilter {
    pub fn accepts(&self, rec: &PacketRecord) -> bool {
        rec.direction == self.direction && !(self.payload_only && rec.is_empty_tcp())
    }
}

/// Bins matching packet arrivals into counts. Bin 0 is anchored at the first
/// accepted packet; the series extends to the bin of the last one, with empty
/// bins in between explicit.
pub fn bin_counts<T: Real>(
    records: &[PacketRecord],
    bin_width: f64,
    filter: BinFilter,
) -> Result<TimeSeries<T>> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("bin width must be positive, got {bin_width}"),
        });
    }
    let mut start = None;
    let mut counts: Vec<u64> = Vec::new();
    for rec in records {
        if !filter.accepts(rec) {
            continue;
        }
        let t0 = *start.get_or_insert(rec.timestamp);
        debug_assert!(rec.timestamp >= t0, "records must be time sorted");
        let idx = ((rec.timestamp - t0) / bin_width).floor() as usize;
        if idx >= counts.len() {
            counts.resize(idx + 1, 0);
        }
        counts[idx] += 1;
    }
    let Some(start) = start else {
        return Err(Error::EmptySeries {
            detail: format!("no {} packets after filtering", filter.direction),
        });
    };
    Ok(TimeSeries {
        bin_width: T::from_f64_near(bin_width),
        start: T::from_f64_near(start),
        values: counts
            .into_iter()
            .map(|c| T::from_u64(c).expect("count fits"))
            .collect(),
    })
}

/// Writes `bin_index,value` rows preceded by `# key=value` comment lines
/// recording at least the bin width and any filters applied.
pub fn write_series_csv<T: Real, W: Write>(
    mut w: W,
    series: &TimeSeries<T>,
    comments: &[(&str, String)],
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "# bin_width={}", series.bin_width).map_err(io_err)?;
    for (key, value) in comments {
        writeln!(w, "# {key}={value}").map_err(io_err)?;
    }
    writeln!(w, "bin_index,count").map_err(io_err)?;
    for (i, v) in series.values.iter().enumerate() {
        writeln!(w, "{i},{v}").map_err(io_err)?;
    }
    Ok(())
}

/// Reads the format `write_series_csv` emits. Comment keys other than
/// `bin_width` are ignored; bin indices must run 0, 1, 2, ...
pub fn read_series_csv<T: Real, R: std::io::BufRead>(input: R) -> Result<TimeSeries<T>> {
    let malformed = |detail: String| Error::Malformed {
        path: "<series csv>".into(),
        detail,
    };
    let io_err = |source| Error::Io {
        path: "<series csv>".into(),
        source,
    };
    let mut bin_width: Option<T> = None;
    let mut saw_header = false;
    let mut values = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("bin_width=") {
                let parsed: f64 = v
                    .parse()
                    .map_err(|_| malformed(format!("line {}: bad bin_width {v:?}", lineno + 1)))?;
                if !parsed.is_finite() || parsed <= 0.0 {
                    return Err(malformed(format!("bin_width must be positive, got {v}")));
                }
                bin_width = Some(T::from_f64_near(parsed));
            }
            continue;
        }
        if !saw_header {
            if line != "bin_index,count" {
                return Err(malformed(format!(
                    "line {}: expected header bin_index,count, got {line:?}",
                    lineno + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let (idx, value) = line
            .split_once(',')
            .ok_or_else(|| malformed(format!("line {}: expected two fields", lineno + 1)))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| malformed(format!("line {}: bad bin index {idx:?}", lineno + 1)))?;
        if idx != values.len() {
            return Err(malformed(format!(
                "line {}: bin index {idx} out of order (expected {})",
                lineno + 1,
                values.len()
            )));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| malformed(format!("line {}: bad count {value:?}", lineno + 1)))?;
        values.push(T::from_f64_near(value));
    }
    let bin_width = bin_width.ok_or_else(|| malformed("missing # bin_width= comment".into()))?;
    if values.is_empty() {
        return Err(Error::EmptySeries {
            detail: "series file has no data rows".into(),
        });
    }
    Ok(TimeSeries {
        bin_width,
        start: T::zero(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::Transport;
    use std::net::Ipv4Addr;

    fn rec(t: f64, dir: Direction, transport: Transport, payload: u32) -> PacketRecord {
        PacketRecord {
            timestamp: t,
            src_addr: Ipv4Addr::new(1, 1, 1, 1),
            src_port: 1,
            dst_addr: Ipv4Addr::new(2, 2, 2, 2),
            dst_port: 2,
            transport,
            ip_total_len: payload + 28,
            payload_len: payload,
            direction: dir,
        }
    }

    #[test]
    fn bins_anchor_at_first_accepted_packet() {
        let records = vec![
            rec(10.0, Direction::Down, Transport::Udp, 100),
            rec(10.005, Direction::Down, Transport::Udp, 100),
            rec(10.025, Direction::Down, Transport::Udp, 100),
        ];
        let s: TimeSeries<f64> = bin_counts(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Down,
                payload_only: true,
            },
        )
        .unwrap();
        assert_eq!(s.values, vec![2.0, 1.0]);
        assert_eq!(s.start, 10.0);
        assert_eq!(s.bin_width, 0.02);
    }

    #[test]
    fn empty_tcp_segments_are_dropped_only_with_payload_filter() {
        let records = vec![
            rec(0.0, Direction::Down, Transport::Udp, 0),
            rec(0.001, Direction::Down, Transport::Tcp, 0),
            rec(0.002, Direction::Down, Transport::Tcp, 12),
        ];
        let filtered: TimeSeries<f64> = bin_counts(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Down,
                payload_only: true,
            },
        )
        .unwrap();
        assert_eq!(filtered.sum(), 2.0); // zero-payload UDP still counts
        let unfiltered: TimeSeries<f64> = bin_counts(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Down,
                payload_only: false,
            },
        )
        .unwrap();
        assert_eq!(unfiltered.sum(), 3.0);
    }

    #[test]
    fn direction_filter_selects_matching_records() {
        let records = vec![
            rec(0.0, Direction::Up, Transport::Udp, 10),
            rec(0.01, Direction::Down, Transport::Udp, 10),
        ];
        let up: TimeSeries<f64> = bin_counts(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Up,
                payload_only: false,
            },
        )
        .unwrap();
        assert_eq!(up.sum(), 1.0);
    }

    #[test]
    fn no_matching_packets_is_an_error() {
        let records = vec![rec(0.0, Direction::Up, Transport::Udp, 10)];
        let err = bin_counts::<f64>(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Down,
                payload_only: false,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::EmptySeries { .. }));
    }

    #[test]
    fn interior_gaps_become_explicit_zero_bins() {
        let records = vec![
            rec(0.0, Direction::Down, Transport::Udp, 10),
            rec(1.0, Direction::Down, Transport::Udp, 10),
        ];
        let s: TimeSeries<f64> = bin_counts(
            &records,
            0.02,
            BinFilter {
                direction: Direction::Down,
                payload_only: false,
            },
        )
        .unwrap();
        assert_eq!(s.len(), 51);
        assert_eq!(s.sum(), 2.0);
        assert!(s.values[1..50].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn csv_export_carries_metadata_comments() {
        let s = TimeSeries::<f64>::from_values(0.02, vec![3.0, 0.0, 1.0]);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s, &[("direction", "down".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# bin_width=0.02\n# direction=down\nbin_index,count\n"));
        assert!(text.ends_with("0,3\n1,0\n2,1\n"));
    }

    #[test]
    fn csv_round_trip_preserves_series() {
        let s = TimeSeries::<f64>::from_values(0.02, vec![3.0, 0.0, 1.5, 7.0]);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s, &[("seed", "11".into())]).unwrap();
        let back: TimeSeries<f64> = read_series_csv(buf.as_slice()).unwrap();
        assert_eq!(back.bin_width, s.bin_width);
        assert_eq!(back.values, s.values);
    }

    #[test]
    fn csv_reader_rejects_missing_bin_width() {
        let text = "bin_index,count\n0,1\n";
        let err = read_series_csv::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn csv_reader_rejects_wrong_header() {
        let text = "# bin_width=0.02\ntime,count\n0,1\n";
        let err = read_series_csv::<f64, _>(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bin_index,count"), "{msg}");
    }

    #[test]
    fn csv_reader_rejects_index_gap() {
        let text = "# bin_width=0.02\nbin_index,count\n0,1\n2,4\n";
        let err = read_series_csv::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("out of order"));
    }

    #[test]
    fn csv_reader_rejects_unparseable_count() {
        let text = "# bin_width=0.02\nbin_index,count\n0,abc\n";
        let err = read_series_csv::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }
}
