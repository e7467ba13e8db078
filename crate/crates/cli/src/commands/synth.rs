use anyhow::{Context, Result};
use serde_json::{json, Value};
use wavetrace_core::{
    gen_fgn, gen_periodic_counts, gen_poisson_counts, gen_session_mix, write_records,
    write_series_csv, SessionMixSpec, TimeSeriesF64,
};

use crate::args::{SynthArgs, SynthCommonArgs, SynthKind};
use crate::config::{FileConfig, DEFAULT_BIN_WIDTH};
use crate::output::{round6, OutDir};

pub fn run(args: SynthArgs, file: &FileConfig) -> Result<()> {
    match args.kind {
        SynthKind::Fgn(a) => {
            let seed = file.seed(a.common.seed);
            let values = gen_fgn(a.n, a.hurst, seed)?;
            let comments = vec![
                ("kind", "fgn".to_string()),
                ("n", a.n.to_string()),
                ("hurst", a.hurst.to_string()),
                ("seed", seed.to_string()),
            ];
            let config = json!({
                "kind": "fgn",
                "n": a.n,
                "hurst": round6(a.hurst),
                "seed": seed,
                "bin_width": round6(bin_width(file, &a.common)),
            });
            write_series(&a.common, file, values, &comments, &config)
        }
        SynthKind::Poisson(a) => {
            let seed = file.seed(a.common.seed);
            let values = gen_poisson_counts(a.n, a.mean, seed)?;
            let comments = vec![
                ("kind", "poisson".to_string()),
                ("n", a.n.to_string()),
                ("mean", a.mean.to_string()),
                ("seed", seed.to_string()),
            ];
            let config = json!({
                "kind": "poisson",
                "n": a.n,
                "mean": round6(a.mean),
                "seed": seed,
                "bin_width": round6(bin_width(file, &a.common)),
            });
            write_series(&a.common, file, values, &comments, &config)
        }
        SynthKind::Periodic(a) => {
            let seed = file.seed(a.common.seed);
            let values = gen_periodic_counts(a.n, a.period_bins, a.base, a.amplitude, seed)?;
            let comments = vec![
                ("kind", "periodic".to_string()),
                ("n", a.n.to_string()),
                ("period_bins", a.period_bins.to_string()),
                ("base", a.base.to_string()),
                ("amplitude", a.amplitude.to_string()),
                ("seed", seed.to_string()),
            ];
            let config = json!({
                "kind": "periodic",
                "n": a.n,
                "period_bins": a.period_bins,
                "base": round6(a.base),
                "amplitude": round6(a.amplitude),
                "seed": seed,
                "bin_width": round6(bin_width(file, &a.common)),
            });
            write_series(&a.common, file, values, &comments, &config)
        }
        SynthKind::Mix(a) => {
            let seed = file.seed(a.seed);
            let text = std::fs::read_to_string(&a.mix_spec)
                .with_context(|| format!("cannot read mix spec {}", a.mix_spec.display()))?;
            let spec: SessionMixSpec = toml::from_str(&text)
                .with_context(|| format!("bad mix spec {}", a.mix_spec.display()))?;
            let (records, truth) = gen_session_mix(&spec, seed)?;

            let mut out = OutDir::create(&a.out.out)?;
            let mut buf = Vec::new();
            write_records(&mut buf, &records)?;
            out.write_text("records.csv", std::str::from_utf8(&buf)?)?;
            out.write_json("truth.json", &serde_json::to_value(truth)?)?;
            let config = json!({
                "kind": "mix",
                "mix_spec": a.mix_spec.display().to_string(),
                "seed": seed,
                "sessions": spec.sessions.len(),
            });
            println!(
                "synth mix: {} records from {} sessions -> {}",
                records.len(),
                spec.sessions.len(),
                a.out.out.display()
            );
            out.finish("synth", &config)
        }
    }
}

fn bin_width(file: &FileConfig, common: &SynthCommonArgs) -> f64 {
    common
        .bin_width
        .or(file.bin_width)
        .unwrap_or(DEFAULT_BIN_WIDTH)
}

fn write_series(
    common: &SynthCommonArgs,
    file: &FileConfig,
    values: Vec<f64>,
    comments: &[(&str, String)],
    config: &Value,
) -> Result<()> {
    let series = TimeSeriesF64::from_values(bin_width(file, common), values);
    let mut out = OutDir::create(&common.out.out)?;
    let mut buf = Vec::new();
    write_series_csv(&mut buf, &series, comments)?;
    out.write_text("series.csv", std::str::from_utf8(&buf)?)?;
    println!(
        "synth {}: {} bins -> {}",
        comments[0].1,
        series.len(),
        common.out.out.display()
    );
    out.finish("synth", config)
}
