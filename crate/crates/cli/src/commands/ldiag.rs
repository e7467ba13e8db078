use anyhow::Result;
use serde_json::{json, Map, Value};
use wavetrace_core::{classify_sessions, filter_video, group_sessions, Error, Wavelet};

use crate::analysis::{absent_json, analyze_quadrant, diagram_csv, present_json, QUADRANTS};
use crate::args::LdiagArgs;
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::{round6, OutDir};

pub fn run(args: LdiagArgs, file: &FileConfig) -> Result<()> {
    let monitored = file.monitored(&args.input.monitored);
    let thresholds = file.thresholds(&args.thresholds);
    let (bin_width, moments) = file.series_params(&args.series);
    let (j1, j2) = file.fit_range(&args.fit);
    let wavelet = Wavelet::daubechies(moments)?;

    let records = load_records(&args.input.input, &monitored)?;
    let sessions = group_sessions(&records);
    let labels = classify_sessions(&sessions, &thresholds);
    let video_records = filter_video(&records, &labels, &thresholds)?;

    let mut out = OutDir::create(&args.out.out)?;
    let mut quadrants = Map::new();
    let mut present = 0usize;
    for q in &QUADRANTS {
        let subset = if q.video { &video_records } else { &records };
        match analyze_quadrant(subset, q.direction, bin_width, &wavelet, j1, j2) {
            Ok(analysis) => {
                let csv_name = format!("ldiag_{}.csv", q.name);
                out.write_text(&csv_name, &diagram_csv(&analysis.diagram))?;
                quadrants.insert(q.name.into(), present_json(&analysis, &csv_name));
                present += 1;
            }
            Err(reason) => {
                quadrants.insert(q.name.into(), absent_json(&reason));
            }
        }
    }
    if present == 0 {
        return Err(Error::EmptySeries {
            detail: "no quadrant produced a series".into(),
        }
        .into());
    }
    out.write_json(
        "ldiag.json",
        &json!({
            "bin_width": round6(bin_width),
            "vanishing_moments": moments,
            "quadrants": Value::Object(quadrants),
        }),
    )?;

    let config = json!({
        "input": args.input.input.display().to_string(),
        "monitored": monitored,
        "large_packet_bytes": thresholds.large_packet_bytes,
        "min_large_packets": thresholds.min_large_packets,
        "bin_width": round6(bin_width),
        "vanishing_moments": moments,
        "j1": j1,
        "j2": j2,
    });
    println!(
        "ldiag: {present} of 4 quadrants -> {}",
        args.out.out.display()
    );
    out.finish("ldiag", &config)
}
