use anyhow::Result;
use serde_json::json;
use wavetrace_core::summarize;

use crate::args::SummaryArgs;
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::{round6, sig6, OutDir};

pub fn run(args: SummaryArgs, file: &FileConfig) -> Result<()> {
    let monitored = file.monitored(&args.input.monitored);
    let records = load_records(&args.input.input, &monitored)?;
    let summary = summarize(&records)?;
    let mut out = OutDir::create(&args.out.out)?;

    out.write_json(
        "summary.json",
        &json!({
            "duration_s": round6(summary.duration_s),
            "packets": summary.packets,
            "total_bytes": summary.total_bytes,
            "total_mib": round6(summary.total_mib()),
            "up_fraction": round6(summary.up_fraction),
            "up_tcp_fraction": round6(summary.up_tcp_fraction),
            "up_udp_fraction": round6(summary.up_udp_fraction),
            "down_fraction": round6(summary.down_fraction),
            "down_tcp_fraction": round6(summary.down_tcp_fraction),
            "down_udp_fraction": round6(summary.down_udp_fraction),
        }),
    )?;

    let csv = format!(
        "metric,value\n\
         duration_s,{}\n\
         packets,{}\n\
         total_bytes,{}\n\
         total_mib,{}\n\
         up_fraction,{}\n\
         up_tcp_fraction,{}\n\
         up_udp_fraction,{}\n\
         down_fraction,{}\n\
         down_tcp_fraction,{}\n\
         down_udp_fraction,{}\n",
        sig6(summary.duration_s),
        summary.packets,
        summary.total_bytes,
        sig6(summary.total_mib()),
        sig6(summary.up_fraction),
        sig6(summary.up_tcp_fraction),
        sig6(summary.up_udp_fraction),
        sig6(summary.down_fraction),
        sig6(summary.down_tcp_fraction),
        sig6(summary.down_udp_fraction),
    );
    out.write_text("summary.csv", &csv)?;

    let config = json!({
        "input": args.input.input.display().to_string(),
        "monitored": monitored,
    });
    println!(
        "summary: {} packets, {} s, {} MiB -> {}",
        summary.packets,
        sig6(summary.duration_s),
        sig6(summary.total_mib()),
        args.out.out.display()
    );
    out.finish("summary", &config)
}
