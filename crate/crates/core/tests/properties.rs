//! Cross-module invariants checked over randomized inputs: serialization
//! round trips, conservation laws of grouping/filtering/binning, and ordering
//! guarantees of the flow ranking.

use proptest::prelude::*;
use std::net::Ipv4Addr;
use wavetrace_core::{
    bin_counts, classify_sessions, filter_video, gen_fgn, group_sessions, rank_download_flows,
    read_records, read_series_csv, signaling_report, summarize, write_records, write_series_csv,
    BinFilter, Direction, PacketRecord, SessionKey, Thresholds, TimeSeriesF64, Transport,
};

/// Addresses come from two disjoint pools so generated sessions are
/// unidirectional and small enough pools force plenty of key collisions.
fn arb_record() -> impl Strategy<Value = PacketRecord> {
    (
        0u64..20_000_000u64,
        (0u8..3, 1u16..4),
        (0u8..3, 1u16..4),
        prop_oneof![Just(Transport::Tcp), Just(Transport::Udp)],
        28u32..1600,
        prop_oneof![Just(Direction::Up), Just(Direction::Down)],
    )
        .prop_map(|(us, (s, sp), (d, dp), transport, total, direction)| {
            let overhead = 20
                + match transport {
                    Transport::Tcp => 20,
                    Transport::Udp => 8,
                };
            let ip_total_len = total.max(overhead);
            PacketRecord {
                timestamp: us as f64 / 1e6,
                src_addr: Ipv4Addr::new(192, 0, 2, s),
                src_port: sp,
                dst_addr: Ipv4Addr::new(198, 51, 100, d),
                dst_port: dp,
                transport,
                ip_total_len,
                payload_len: ip_total_len - overhead,
                direction,
            }
        })
}

fn arb_trace(max: usize) -> impl Strategy<Value = Vec<PacketRecord>> {
    prop::collection::vec(arb_record(), 1..=max).prop_map(|mut v| {
        v.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        v
    })
}

fn down_filter(payload_only: bool) -> BinFilter {
    BinFilter {
        direction: Direction::Down,
        payload_only,
    }
}

proptest! {
    #[test]
    fn record_csv_round_trips(records in prop::collection::vec(arb_record(), 0..=120)) {
        let mut buf = Vec::new();
        write_records(&mut buf, &records).unwrap();
        let back = read_records(buf.as_slice(), std::path::Path::new("<mem>")).unwrap();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn series_csv_round_trips(
        values in prop::collection::vec(0.0f64..1e6, 0..=64),
        bin_width in 1e-3f64..10.0,
    ) {
        let series = TimeSeriesF64::from_values(bin_width, values);
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &series, &[("origin", "proptest".into())]).unwrap();
        match read_series_csv::<f64, _>(buf.as_slice()) {
            Ok(back) => {
                prop_assert_eq!(back.bin_width, series.bin_width);
                prop_assert_eq!(back.values, series.values);
            }
            // An empty series intentionally does not round trip.
            Err(_) => prop_assert!(series.values.is_empty()),
        }
    }

    #[test]
    fn summarize_ignores_record_order(
        (a, b) in arb_trace(120).prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle()))
    ) {
        let x = summarize(&a).unwrap();
        let y = summarize(&b).unwrap();
        prop_assert_eq!(x.duration_s, y.duration_s);
        prop_assert_eq!(x.packets, y.packets);
        prop_assert_eq!(x.total_bytes, y.total_bytes);
        prop_assert_eq!(x.up_fraction, y.up_fraction);
        prop_assert_eq!(x.up_tcp_fraction, y.up_tcp_fraction);
        prop_assert_eq!(x.up_udp_fraction, y.up_udp_fraction);
        prop_assert_eq!(x.down_fraction, y.down_fraction);
        prop_assert_eq!(x.down_tcp_fraction, y.down_tcp_fraction);
        prop_assert_eq!(x.down_udp_fraction, y.down_udp_fraction);
    }

    #[test]
    fn grouping_partitions_the_trace(records in arb_trace(120)) {
        let grouped = group_sessions(&records);
        let total: usize = grouped.values().map(Vec::len).sum();
        prop_assert_eq!(total, records.len());
        for (key, members) in &grouped {
            for rec in members {
                prop_assert_eq!(&SessionKey::of(rec), key);
            }
        }
    }

    #[test]
    fn stricter_thresholds_only_shrink_the_video_set(
        records in arb_trace(120),
        extra_bytes in 0u32..=400,
        extra_packets in 0u32..=10,
    ) {
        let loose = Thresholds::default();
        let strict = Thresholds {
            large_packet_bytes: loose.large_packet_bytes + extra_bytes,
            min_large_packets: loose.min_large_packets + extra_packets,
        };
        let grouped = group_sessions(&records);
        let loose_labels = classify_sessions(&grouped, &loose);
        let strict_labels = classify_sessions(&grouped, &strict);
        for (l, s) in loose_labels.iter().zip(&strict_labels) {
            prop_assert_eq!(l.key, s.key);
            prop_assert!(s.large_packet_count <= l.large_packet_count);
            if s.is_video {
                prop_assert!(l.is_video, "strict video session {} not loose video", s.key);
            }
        }
    }

    #[test]
    fn video_filter_is_idempotent(records in arb_trace(120)) {
        let thresholds = Thresholds::default();
        let labels = classify_sessions(&group_sessions(&records), &thresholds);
        let once = filter_video(&records, &labels, &thresholds).unwrap();
        for rec in &once {
            prop_assert!(rec.ip_total_len >= thresholds.large_packet_bytes);
        }
        let labels_again = classify_sessions(&group_sessions(&once), &thresholds);
        let twice = filter_video(&once, &labels_again, &thresholds).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn signaling_partition_is_exact(records in arb_trace(120)) {
        let thresholds = Thresholds::default();
        let labels = classify_sessions(&group_sessions(&records), &thresholds);
        let report = signaling_report(&records, &labels, &thresholds).unwrap();
        let side = |dir: Direction| -> u64 {
            records
                .iter()
                .filter(|r| r.direction == dir)
                .map(|r| u64::from(r.ip_total_len))
                .sum()
        };
        prop_assert_eq!(report.up_video_bytes + report.up_signaling_bytes, side(Direction::Up));
        prop_assert_eq!(
            report.down_video_bytes + report.down_signaling_bytes,
            side(Direction::Down)
        );
        for ratio in [report.total_ratio, report.up_ratio, report.down_ratio]
            .into_iter()
            .flatten()
        {
            prop_assert!((0.0..=1.0).contains(&ratio));
        }
        prop_assert_eq!(report.up_ratio.is_none(), side(Direction::Up) == 0);
        prop_assert_eq!(report.down_ratio.is_none(), side(Direction::Down) == 0);
    }

    #[test]
    fn binning_conserves_packet_counts(records in arb_trace(120)) {
        for payload_only in [false, true] {
            let filter = down_filter(payload_only);
            let accepted = records.iter().filter(|r| filter.accepts(r)).count();
            match bin_counts::<f64>(&records, 0.25, filter) {
                Ok(series) => {
                    let total: f64 = series.values.iter().sum();
                    prop_assert_eq!(total, accepted as f64);
                    prop_assert!(series.values.last().copied() != Some(0.0),
                        "series must end at the last occupied bin");
                }
                Err(_) => prop_assert_eq!(accepted, 0),
            }
        }
    }

    /// Power-of-two bin widths make the quotients exact, so halving the
    /// width and re-summing adjacent bins is an identity, not approximation.
    #[test]
    fn binning_refines_dyadically(records in arb_trace(120)) {
        let filter = down_filter(false);
        prop_assume!(records.iter().any(|r| filter.accepts(r)));
        let fine: TimeSeriesF64 = bin_counts(&records, 1.0 / 64.0, filter).unwrap();
        let coarse: TimeSeriesF64 = bin_counts(&records, 1.0 / 32.0, filter).unwrap();
        for (i, &c) in coarse.values.iter().enumerate() {
            let a = fine.values.get(2 * i).copied().unwrap_or(0.0);
            let b = fine.values.get(2 * i + 1).copied().unwrap_or(0.0);
            prop_assert_eq!(a + b, c, "coarse bin {} disagrees", i);
        }
    }

    #[test]
    fn flow_ranking_partitions_download_traffic(records in arb_trace(120)) {
        let thresholds = Thresholds::default();
        let labels = classify_sessions(&group_sessions(&records), &thresholds);
        let down: Vec<_> = records
            .iter()
            .filter(|r| r.direction == Direction::Down)
            .collect();
        match rank_download_flows(&records, &labels, &thresholds) {
            Ok(flows) => {
                let bytes: u64 = flows.iter().map(|f| f.bytes).sum();
                let packets: u64 = flows.iter().map(|f| f.packets).sum();
                prop_assert_eq!(bytes, down.iter().map(|r| u64::from(r.ip_total_len)).sum::<u64>());
                prop_assert_eq!(packets, down.len() as u64);

                let video_down: u64 = filter_video(&records, &labels, &thresholds)
                    .unwrap()
                    .iter()
                    .filter(|r| r.direction == Direction::Down)
                    .map(|r| u64::from(r.ip_total_len))
                    .sum();
                prop_assert_eq!(flows.iter().map(|f| f.video_bytes).sum::<u64>(), video_down);

                for f in &flows {
                    prop_assert!(f.video_bytes <= f.bytes);
                    prop_assert!(f.video_packets <= f.packets);
                }
                for pair in flows.windows(2) {
                    prop_assert!(
                        pair[0].bytes > pair[1].bytes
                            || (pair[0].bytes == pair[1].bytes
                                && pair[0].remote_addr < pair[1].remote_addr),
                        "ranking out of order"
                    );
                }
            }
            Err(_) => prop_assert!(down.is_empty()),
        }
    }
}

/// At H = 1/2 the exact-covariance generator degenerates to white noise;
/// neighboring samples must be uncorrelated up to sampling error.
#[test]
fn fgn_at_half_is_white() {
    for seed in [1u64, 2, 3] {
        let values: Vec<f64> = gen_fgn(1 << 16, 0.5, seed).unwrap();
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let lag1 = values
            .windows(2)
            .map(|w| (w[0] - mean) * (w[1] - mean))
            .sum::<f64>()
            / ((n - 1) as f64 * var);
        assert!(
            lag1.abs() <= 0.02,
            "seed {seed}: lag-1 autocorrelation {lag1:.4} exceeds 0.02"
        );
    }
}
