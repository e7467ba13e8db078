//! Three-way split stationarity check.
//!
//! A series is operationally stationary at octave j when its three equal
//! thirds produce logscale diagrams whose confidence intervals at j mutually
//! overlap: each part looks like the others and carries the same energy.

use crate::error::{Error, Result};
use crate::logscale::{logscale_diagram, LogscaleDiagram};
use crate::real::Real;
use crate::timeseries::TimeSeries;
use crate::wavelet::{dwt_details, Wavelet, MIN_SERIES_LEN};

/// Three contiguous, non-overlapping segments of equal length; a remainder
/// of up to two bins is dropped from the tail.
pub fn split_thirds<T: Real>(series: &TimeSeries<T>) -> Result<[TimeSeries<T>; 3]> {
    let part_len = series.len() / 3;
    if part_len < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: series.len(),
            required: 3 * MIN_SERIES_LEN,
        });
    }
    let part = |k: usize| TimeSeries {
        bin_width: series.bin_width,
        start: series.start + series.bin_width * T::from_usize_near(k * part_len),
        values: series.values[k * part_len..(k + 1) * part_len].to_vec(),
    };
    Ok([part(0), part(1), part(2)])
}

#[derive(Clone, Debug)]
pub struct StationarityReport<T> {
    pub diagrams: [LogscaleDiagram<T>; 3],
    /// Octaves present in all three diagrams, ascending.
    pub octaves: Vec<usize>,
    /// Per-octave mutual CI overlap among the three parts.
    pub agree: Vec<bool>,
    /// Largest octave j such that every octave up to and including j agrees;
    /// `None` when the very first comparable octave already disagrees.
    pub stationary_up_to: Option<usize>,
}

impl<T: Real> StationarityReport<T> {
    pub fn max_octave(&self) -> Option<usize> {
        self.octaves.last().copied()
    }

    pub fn is_stationary_throughout(&self) -> bool {
        self.stationary_up_to.is_some() && self.stationary_up_to == self.max_octave()
    }
}

/// Mutual overlap of the three parts' CI intervals per common octave, with
/// half-widths scaled by `widen` (1 = the plain 95% bands). Returns the
/// common octaves and the per-octave verdicts.
pub fn octave_agreement<T: Real>(
    diagrams: &[LogscaleDiagram<T>; 3],
    widen: T,
) -> (Vec<usize>, Vec<bool>) {
    let mut octaves: Vec<usize> = diagrams[0].octaves.clone();
    octaves.retain(|j| diagrams.iter().all(|d| d.octaves.contains(j)));
    let agree = octaves
        .iter()
        .map(|&j| {
            let mut lower_max = T::neg_infinity();
            let mut upper_min = T::infinity();
            for d in diagrams {
                let idx = d
                    .octaves
                    .iter()
                    .position(|&o| o == j)
                    .expect("common octave");
                let half = d.ci_half[idx] * widen;
                lower_max = lower_max.max(d.y[idx] - half);
                upper_min = upper_min.min(d.y[idx] + half);
            }
            // Three intervals on a line intersect iff they intersect pairwise
            // iff the largest lower bound is at most the smallest upper bound.
            lower_max <= upper_min
        })
        .collect();
    (octaves, agree)
}

fn up_to(octaves: &[usize], agree: &[bool]) -> Option<usize> {
    let mut last = None;
    for (&j, &ok) in octaves.iter().zip(agree) {
        if !ok {
            break;
        }
        last = Some(j);
    }
    last
}

/// Runs the identical wavelet analysis on three parts and compares their
/// diagrams octave by octave.
pub fn compare_parts<T: Real>(
    parts: &[TimeSeries<T>; 3],
    moments: usize,
) -> Result<StationarityReport<T>> {
    let wavelet = Wavelet::daubechies(moments)?;
    if parts.iter().any(|p| p.bin_width != parts[0].bin_width) {
        return Err(Error::InvalidParameter {
            detail: "parts must share one bin width".into(),
        });
    }
    let mut diagrams = Vec::with_capacity(3);
    for (i, part) in parts.iter().enumerate() {
        let pyramid = dwt_details(&part.values, &wavelet).map_err(|e| Error::InvalidParameter {
            detail: format!("part {} of 3 not analyzable: {e}", i + 1),
        })?;
        diagrams.push(logscale_diagram(&pyramid, part.bin_width));
    }
    let diagrams: [LogscaleDiagram<T>; 3] = diagrams.try_into().expect("three diagrams");
    let (octaves, agree) = octave_agreement(&diagrams, T::one());
    let stationary_up_to = up_to(&octaves, &agree);
    Ok(StationarityReport {
        diagrams,
        octaves,
        agree,
        stationary_up_to,
    })
}
