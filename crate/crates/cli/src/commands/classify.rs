use anyhow::Result;
use serde_json::{json, Value};
use wavetrace_core::{classify_sessions, group_sessions, signaling_report};

use crate::args::ClassifyArgs;
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::{opt_round6, OutDir};

pub fn run(args: ClassifyArgs, file: &FileConfig) -> Result<()> {
    let monitored = file.monitored(&args.input.monitored);
    let thresholds = file.thresholds(&args.thresholds);
    let records = load_records(&args.input.input, &monitored)?;
    let sessions = group_sessions(&records);
    let labels = classify_sessions(&sessions, &thresholds);
    let report = signaling_report(&records, &labels, &thresholds)?;

    let sessions_json: Vec<Value> = labels
        .iter()
        .map(|l| {
            json!({
                "key": l.key.to_string(),
                "large_packet_count": l.large_packet_count,
                "is_video": l.is_video,
                "bytes": l.bytes,
            })
        })
        .collect();
    let mut out = OutDir::create(&args.out.out)?;
    out.write_json(
        "classify.json",
        &json!({
            "total_ratio": opt_round6(report.total_ratio),
            "upload_ratio": opt_round6(report.up_ratio),
            "download_ratio": opt_round6(report.down_ratio),
            "sessions": sessions_json,
        }),
    )?;

    let config = json!({
        "input": args.input.input.display().to_string(),
        "monitored": monitored,
        "large_packet_bytes": thresholds.large_packet_bytes,
        "min_large_packets": thresholds.min_large_packets,
    });
    let video = labels.iter().filter(|l| l.is_video).count();
    println!(
        "classify: {} sessions ({} video) -> {}",
        labels.len(),
        video,
        args.out.out.display()
    );
    out.finish("classify", &config)
}
