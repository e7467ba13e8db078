use anyhow::Result;
use serde_json::json;
use wavetrace_core::video_bitrate;

use crate::args::BitrateArgs;
use crate::config::FileConfig;
use crate::output::{round6, OutDir};

pub fn run(args: BitrateArgs, _file: &FileConfig) -> Result<()> {
    let kbps = video_bitrate(
        args.total_mb,
        args.download_fraction,
        args.signaling_ratio,
        args.duration_s,
        args.dead_time_s,
    )?;
    println!("{kbps:.1} Kbps");

    let mut out = OutDir::create(&args.out.out)?;
    let config = json!({
        "total_mb": round6(args.total_mb),
        "download_fraction": round6(args.download_fraction),
        "signaling_ratio": round6(args.signaling_ratio),
        "duration_s": round6(args.duration_s),
        "dead_time_s": round6(args.dead_time_s),
    });
    out.write_json(
        "bitrate.json",
        &json!({
            "inputs": config,
            "kbps": round6(kbps),
        }),
    )?;
    out.finish("bitrate", &config)
}
