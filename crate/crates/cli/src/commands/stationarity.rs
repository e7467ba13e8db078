use anyhow::{Context, Result};
use serde_json::json;
use wavetrace_core::{
    bin_counts, classify_sessions, compare_parts, filter_video, group_sessions, octave_agreement,
    read_series_csv, split_thirds, BinFilter, Direction, TimeSeriesF64,
};

use crate::analysis::{diagram_csv, overlay_csv};
use crate::args::{DirectionArg, StationarityArgs};
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::{round6, OutDir};

pub fn run(args: StationarityArgs, file: &FileConfig) -> Result<()> {
    let thresholds = file.thresholds(&args.thresholds);
    let (bin_width, moments) = file.series_params(&args.series_params);
    let widen = file.widen(args.widen);
    let direction = match args.direction {
        DirectionArg::Up => Direction::Up,
        DirectionArg::Down => Direction::Down,
    };

    let (series, source): (TimeSeriesF64, _) = if let Some(path) = &args.series {
        let reader = std::fs::File::open(path)
            .map(std::io::BufReader::new)
            .with_context(|| format!("cannot open series file {}", path.display()))?;
        let series = read_series_csv(reader)?;
        let source = json!({ "series": path.display().to_string() });
        (series, source)
    } else {
        let input = args.input.as_ref().expect("clap enforces one source");
        let monitored = file.monitored(&args.monitored);
        let records = load_records(input, &monitored)?;
        let records = if args.video {
            let sessions = group_sessions(&records);
            let labels = classify_sessions(&sessions, &thresholds);
            filter_video(&records, &labels, &thresholds)?
        } else {
            records
        };
        let series = bin_counts(
            &records,
            bin_width,
            BinFilter {
                direction,
                payload_only: true,
            },
        )?;
        let source = json!({
            "input": input.display().to_string(),
            "monitored": monitored,
            "direction": direction.to_string(),
            "video": args.video,
        });
        (series, source)
    };

    let parts = split_thirds(&series)?;
    let report = compare_parts(&parts, moments)?;
    // The report's verdicts carry widen = 1; recompute when loosened.
    let (octaves, agree) = if widen == 1.0 {
        (report.octaves.clone(), report.agree.clone())
    } else {
        octave_agreement(&report.diagrams, widen)
    };
    let stationary_up_to = octaves
        .iter()
        .zip(&agree)
        .take_while(|(_, &ok)| ok)
        .map(|(&j, _)| j)
        .last();
    let max_octave = octaves.last().copied();

    let mut out = OutDir::create(&args.out.out)?;
    out.write_text("overlay.csv", &overlay_csv(&report.diagrams, &octaves))?;
    out.write_json(
        "stationarity.json",
        &json!({
            "bin_width": round6(series.bin_width),
            "vanishing_moments": moments,
            "widen": round6(widen),
            "part_bins": parts[0].len(),
            "octaves": octaves,
            "agree": agree,
            "stationary_up_to": stationary_up_to,
            "max_octave": max_octave,
            "stationary_throughout": stationary_up_to.is_some() && stationary_up_to == max_octave,
            "parts": [
                diagram_csv(&report.diagrams[0]),
                diagram_csv(&report.diagrams[1]),
                diagram_csv(&report.diagrams[2]),
            ],
        }),
    )?;

    let config = json!({
        "source": source,
        "bin_width": round6(bin_width),
        "vanishing_moments": moments,
        "widen": round6(widen),
        "large_packet_bytes": thresholds.large_packet_bytes,
        "min_large_packets": thresholds.min_large_packets,
    });
    let verdict = match stationary_up_to {
        Some(j) if Some(j) == max_octave => format!("stationary through octave {j}"),
        Some(j) => format!("stationary up to octave {j}"),
        None => "disagrees at the first octave".into(),
    };
    println!("stationarity: {verdict} -> {}", args.out.out.display());
    out.finish("stationarity", &config)
}
