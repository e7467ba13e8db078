//! Shared four-quadrant diagram pipeline.
//!
//! A quadrant is one of (overall | video) x (upload | download). Each one
//! bins its records, builds the wavelet logscale diagram, fits a scaling
//! estimate, and classifies the spectrum shape. A quadrant whose series
//! cannot be built (no packets, or too few bins) is reported absent with
//! the reason; the others still come out.

use serde_json::{json, Value};
use wavetrace_core::{
    bin_counts, choose_fit_range, detect_features, dwt_details, estimate_scaling, logscale_diagram,
    BinFilter, Direction, FeatureConfig, FeatureKind, LogscaleDiagramF64, PacketRecord,
    ScalingEstimateF64, SpectrumFeatureF64, TimeSeriesF64, Wavelet,
};

use crate::output::{round6, sig6};

pub struct Quadrant {
    pub name: &'static str,
    pub video: bool,
    pub direction: Direction,
}

pub const QUADRANTS: [Quadrant; 4] = [
    Quadrant {
        name: "overall_up",
        video: false,
        direction: Direction::Up,
    },
    Quadrant {
        name: "overall_down",
        video: false,
        direction: Direction::Down,
    },
    Quadrant {
        name: "video_up",
        video: true,
        direction: Direction::Up,
    },
    Quadrant {
        name: "video_down",
        video: true,
        direction: Direction::Down,
    },
];

/// Everything derived from one quadrant's series. `estimate` and `feature`
/// keep their own failure reasons: a diagram too shallow to fit is still a
/// diagram worth writing.
#[derive(Debug)]
pub struct SeriesAnalysis {
    pub bins: usize,
    pub diagram: LogscaleDiagramF64,
    pub estimate: Result<ScalingEstimateF64, String>,
    pub feature: Result<SpectrumFeatureF64, String>,
}

/// Runs the diagram pipeline on a prepared series. Fit-range overrides
/// replace the corresponding end of the automatic choice.
pub fn analyze_series(
    series: &TimeSeriesF64,
    wavelet: &Wavelet,
    j1_override: Option<usize>,
    j2_override: Option<usize>,
) -> Result<SeriesAnalysis, String> {
    let pyramid = dwt_details(&series.values, wavelet).map_err(|e| e.to_string())?;
    let diagram = logscale_diagram(&pyramid, series.bin_width);
    let estimate = choose_fit_range(&diagram)
        .map(|(j1, j2)| (j1_override.unwrap_or(j1), j2_override.unwrap_or(j2)))
        .and_then(|(j1, j2)| estimate_scaling(&diagram, j1, j2))
        .map_err(|e| e.to_string());
    let feature = detect_features(&diagram, &FeatureConfig::default()).map_err(|e| e.to_string());
    Ok(SeriesAnalysis {
        bins: series.len(),
        diagram,
        estimate,
        feature,
    })
}

/// Bins one quadrant's records and analyzes them. Empty TCP acknowledgments
/// never count as arrivals.
pub fn analyze_quadrant(
    records: &[PacketRecord],
    direction: Direction,
    bin_width: f64,
    wavelet: &Wavelet,
    j1_override: Option<usize>,
    j2_override: Option<usize>,
) -> Result<SeriesAnalysis, String> {
    let series: TimeSeriesF64 = bin_counts(
        records,
        bin_width,
        BinFilter {
            direction,
            payload_only: true,
        },
    )
    .map_err(|e| e.to_string())?;
    analyze_series(&series, wavelet, j1_override, j2_override)
}

/// `octave,scale_seconds,y,n_coeffs,ci_half` rows; zero-energy octaves
/// print y as `-inf`.
pub fn diagram_csv(diagram: &LogscaleDiagramF64) -> String {
    let mut out = String::from("octave,scale_seconds,y,n_coeffs,ci_half\n");
    for i in 0..diagram.octave_count() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            diagram.octaves[i],
            sig6(diagram.scale_seconds(i)),
            sig6(diagram.y[i]),
            diagram.n_coeffs[i],
            sig6(diagram.ci_half[i]),
        ));
    }
    out
}

pub fn estimate_json(est: &ScalingEstimateF64) -> Value {
    json!({
        "alpha": round6(est.alpha),
        "alpha_se": round6(est.alpha_se),
        "hurst": round6(est.hurst),
        "j1": est.j1,
        "j2": est.j2,
        "fit_quality": round6(est.fit_quality),
    })
}

pub fn feature_json(feature: &SpectrumFeatureF64) -> Value {
    let mut obj = match feature.kind {
        FeatureKind::Bump { octave } => json!({ "kind": "bump", "octave": octave }),
        FeatureKind::LinearIncrease { onset } => {
            json!({ "kind": "linear_increase", "onset": onset })
        }
        FeatureKind::Flat => json!({ "kind": "flat" }),
        FeatureKind::Mixed => json!({ "kind": "mixed" }),
    };
    let map = obj.as_object_mut().expect("feature json is an object");
    map.insert(
        "discounted_spread".into(),
        round6(feature.discounted_spread),
    );
    if let Some(fit) = &feature.onset_fit {
        map.insert("onset_fit".into(), estimate_json(fit));
    }
    obj
}

/// JSON for one present quadrant, pointing at its diagram CSV artifact.
pub fn present_json(analysis: &SeriesAnalysis, csv_name: &str) -> Value {
    let field = |r: &Result<Value, String>| match r {
        Ok(v) => v.clone(),
        Err(_) => Value::Null,
    };
    let reason = |r: &Result<Value, String>| match r {
        Ok(_) => Value::Null,
        Err(e) => Value::from(e.as_str()),
    };
    let estimate = analysis
        .estimate
        .as_ref()
        .map(estimate_json)
        .map_err(Clone::clone);
    let feature = analysis
        .feature
        .as_ref()
        .map(feature_json)
        .map_err(Clone::clone);
    json!({
        "present": true,
        "csv": csv_name,
        "bins": analysis.bins,
        "octaves": analysis.diagram.octave_count(),
        "estimate": field(&estimate),
        "estimate_error": reason(&estimate),
        "feature": field(&feature),
        "feature_error": reason(&feature),
    })
}

pub fn absent_json(reason: &str) -> Value {
    json!({ "present": false, "reason": reason })
}

/// Overlay of three diagrams over their common octaves:
/// `octave,y1,y2,y3,ci1,ci2,ci3`.
pub fn overlay_csv(diagrams: &[LogscaleDiagramF64; 3], octaves: &[usize]) -> String {
    let mut out = String::from("octave,y1,y2,y3,ci1,ci2,ci3\n");
    for &j in octaves {
        let mut ys = Vec::with_capacity(3);
        let mut cis = Vec::with_capacity(3);
        for d in diagrams {
            let i = d.index_of_octave(j).expect("overlay octaves are common");
            ys.push(sig6(d.y[i]));
            cis.push(sig6(d.ci_half[i]));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            j, ys[0], ys[1], ys[2], cis[0], cis[1], cis[2]
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavetrace_core::TimeSeries;

    #[test]
    fn diagram_csv_has_header_and_rows() {
        let series = TimeSeries::from_values(0.02, vec![1.0; 4096]);
        let wavelet = Wavelet::daubechies(1).unwrap();
        let analysis = analyze_series(&series, &wavelet, None, None).unwrap();
        let csv = diagram_csv(&analysis.diagram);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "octave,scale_seconds,y,n_coeffs,ci_half"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,0.04,"), "{first}");
    }

    #[test]
    fn too_short_series_reports_reason() {
        let series = TimeSeries::from_values(0.02, vec![1.0; 8]);
        let wavelet = Wavelet::daubechies(1).unwrap();
        let err = analyze_series(&series, &wavelet, None, None).unwrap_err();
        assert!(err.contains("too short"), "{err}");
    }
}
