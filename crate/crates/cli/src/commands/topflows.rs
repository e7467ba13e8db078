use anyhow::Result;
use serde_json::{json, Map, Value};
use wavetrace_core::{
    classify_sessions, filter_video, group_sessions, rank_download_flows, Error, Wavelet,
};

use crate::analysis::{absent_json, analyze_quadrant, diagram_csv, present_json, QUADRANTS};
use crate::args::TopflowsArgs;
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::{round6, sig6, OutDir};

const MIB: f64 = 1024.0 * 1024.0;

pub fn run(args: TopflowsArgs, file: &FileConfig) -> Result<()> {
    let monitored = file.monitored(&args.input.monitored);
    let thresholds = file.thresholds(&args.thresholds);
    let (bin_width, moments) = file.series_params(&args.series);
    let (j1, j2) = file.fit_range(&args.fit);
    let rank = file.rank(args.rank);
    let wavelet = Wavelet::daubechies(moments)?;

    let records = load_records(&args.input.input, &monitored)?;
    let sessions = group_sessions(&records);
    let labels = classify_sessions(&sessions, &thresholds);
    let ranked = rank_download_flows(&records, &labels, &thresholds)?;

    let mut out = OutDir::create(&args.out.out)?;
    let mut flows_csv = String::from("rank,remote_addr,bytes,packets,video_bytes,video_packets\n");
    for (i, flow) in ranked.iter().enumerate() {
        flows_csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i + 1,
            flow.remote_addr,
            flow.bytes,
            flow.packets,
            flow.video_bytes,
            flow.video_packets
        ));
    }
    out.write_text("flows.csv", &flows_csv)?;

    let Some(flow) = ranked.get(rank as usize - 1) else {
        return Err(Error::InvalidParameter {
            detail: format!("rank {rank} exceeds the {} ranked flows", ranked.len()),
        }
        .into());
    };

    // The chosen flow's quadrants cover the whole conversation with that
    // peer, both directions, so the four-diagram view matches the trace-wide
    // one scoped to a single remote.
    let flow_records: Vec<_> = records
        .iter()
        .filter(|r| r.src_addr == flow.remote_addr || r.dst_addr == flow.remote_addr)
        .copied()
        .collect();
    let flow_video = filter_video(&flow_records, &labels, &thresholds)?;

    let mut quadrants = Map::new();
    for q in &QUADRANTS {
        let subset = if q.video { &flow_video } else { &flow_records };
        match analyze_quadrant(subset, q.direction, bin_width, &wavelet, j1, j2) {
            Ok(analysis) => {
                let csv_name = format!("flow_{}.csv", q.name);
                out.write_text(&csv_name, &diagram_csv(&analysis.diagram))?;
                quadrants.insert(q.name.into(), present_json(&analysis, &csv_name));
            }
            Err(reason) => {
                quadrants.insert(q.name.into(), absent_json(&reason));
            }
        }
    }

    out.write_json(
        "topflow.json",
        &json!({
            "rank": rank,
            "remote_addr": flow.remote_addr.to_string(),
            "bytes": flow.bytes,
            "mib": round6(flow.bytes as f64 / MIB),
            "packets": flow.packets,
            "video_bytes": flow.video_bytes,
            "video_packets": flow.video_packets,
            "signaling_bytes": flow.signaling_bytes(),
            "signaling_packets": flow.signaling_packets(),
            "flows_total": ranked.len(),
            "bin_width": round6(bin_width),
            "vanishing_moments": moments,
            "quadrants": Value::Object(quadrants),
        }),
    )?;

    let config = json!({
        "input": args.input.input.display().to_string(),
        "monitored": monitored,
        "rank": rank,
        "large_packet_bytes": thresholds.large_packet_bytes,
        "min_large_packets": thresholds.min_large_packets,
        "bin_width": round6(bin_width),
        "vanishing_moments": moments,
        "j1": j1,
        "j2": j2,
    });
    println!(
        "topflows: rank {rank} = {} ({} MiB of {} flows) -> {}",
        flow.remote_addr,
        sig6(flow.bytes as f64 / MIB),
        ranked.len(),
        args.out.out.display()
    );
    out.finish("topflows", &config)
}
