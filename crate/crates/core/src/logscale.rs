//! Octave-by-octave energy diagram and scaling estimation.
//!
//! For each octave j the diagram records `y[j] = log2(mean squared interior
//! detail coefficient) + g(n_j)`, where `g` removes the bias of the log of a
//! chi-squared mean, together with a 95% confidence half-width from the exact
//! chi-squared quantiles. A weighted least-squares line through a range of
//! octaves gives the scaling exponent `alpha` and the derived self-similarity
//! parameter `hurst = (alpha + 1) / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special;
use crate::wavelet::DetailPyramid;

#[derive(Clone, Debug)]
pub struct LogscaleDiagram<T> {
    /// Bin width of the underlying series in seconds; octave j corresponds
    /// to the physical scale `2^j * bin_width`.
    pub bin_width: T,
    /// Octave numbers, contiguous from 1.
    pub octaves: Vec<usize>,
    /// Bias-corrected log2 energies; `-inf` flags an octave whose interior
    /// coefficients were all zero.
    pub y: Vec<T>,
    /// Interior coefficients per octave (post boundary discard).
    pub n_coeffs: Vec<usize>,
    /// 95% confidence half-widths in y units.
    pub ci_half: Vec<T>,
}

impl<T: Real> LogscaleDiagram<T> {
    pub fn octave_count(&self) -> usize {
        self.octaves.len()
    }

    pub fn scale_seconds(&self, idx: usize) -> T {
        self.bin_width * T::from_usize_near(1 << self.octaves[idx])
    }

    pub fn usable(&self, idx: usize) -> bool {
        self.y[idx].is_finite()
    }

    pub fn index_of_octave(&self, j: usize) -> Option<usize> {
        self.octaves.iter().position(|&o| o == j)
    }
}

pub fn logscale_diagram<T: Real>(pyramid: &DetailPyramid<T>, bin_width: T) -> LogscaleDiagram<T> {
    let mut octaves = Vec::with_capacity(pyramid.levels.len());
    let mut y = Vec::with_capacity(pyramid.levels.len());
    let mut n_coeffs = Vec::with_capacity(pyramid.levels.len());
    let mut ci_half = Vec::with_capacity(pyramid.levels.len());
    for level in &pyramid.levels {
        let interior = level.interior_coeffs();
        let n = interior.len();
        let mean_energy =
            interior.iter().fold(T::zero(), |acc, &c| acc + c * c) / T::from_usize_near(n);
        octaves.push(level.octave);
        n_coeffs.push(n);
        if mean_energy > T::zero() {
            y.push(mean_energy.log2() + T::from_f64_near(special::log2_bias_correction(n)));
        } else {
            y.push(T::neg_infinity());
        }
        ci_half.push(T::from_f64_near(special::log2_ci_half_95(n)));
    }
    LogscaleDiagram {
        bin_width,
        octaves,
        y,
        n_coeffs,
        ci_half,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalingEstimate<T> {
    pub alpha: T,
    /// Standard error of `alpha` under the per-octave chi-squared variances.
    pub alpha_se: T,
    pub hurst: T,
    pub j1: usize,
    pub j2: usize,
    /// Goodness-of-fit probability: chance of a residual this large if the
    /// diagram really is linear over the fit range.
    pub fit_quality: T,
}

/// Weighted least-squares line through octaves `j1..=j2`, weighting each
/// octave by the inverse variance of its y estimate.
pub fn estimate_scaling<T: Real>(
    diagram: &LogscaleDiagram<T>,
    j1: usize,
    j2: usize,
) -> Result<ScalingEstimate<T>> {
    if j1 >= j2 {
        return Err(Error::OctaveRange {
            detail: format!("fit range must have j1 < j2, got {j1}..{j2}"),
        });
    }
    let (i1, i2) = match (diagram.index_of_octave(j1), diagram.index_of_octave(j2)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::OctaveRange {
                detail: format!(
                    "fit range {j1}..{j2} not contained in available octaves 1..{}",
                    diagram.octave_count()
                ),
            })
        }
    };
    let m = i2 - i1 + 1;
    if m < 3 {
        return Err(Error::OctaveRange {
            detail: format!("fit needs at least 3 octaves, got {m}"),
        });
    }
    for idx in i1..=i2 {
        if !diagram.usable(idx) {
            return Err(Error::OctaveRange {
                detail: format!(
                    "octave {} has no energy and cannot enter a fit",
                    diagram.octaves[idx]
                ),
            });
        }
    }

    // Accumulate the weighted normal equations in f64; the weights derive
    // from f64 special functions regardless of T.
    let mut sw = 0.0;
    let mut swx = 0.0;
    let mut swy = 0.0;
    for idx in i1..=i2 {
        let w = 1.0 / special::log2_energy_variance(diagram.n_coeffs[idx]);
        sw += w;
        swx += w * diagram.octaves[idx] as f64;
        swy += w * diagram.y[idx].to_f64().expect("finite");
    }
    let x_bar = swx / sw;
    let y_bar = swy / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for idx in i1..=i2 {
        let w = 1.0 / special::log2_energy_variance(diagram.n_coeffs[idx]);
        let dx = diagram.octaves[idx] as f64 - x_bar;
        let dy = diagram.y[idx].to_f64().expect("finite") - y_bar;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
    }
    let alpha = sxy / sxx;
    let intercept = y_bar - alpha * x_bar;
    let mut residual = 0.0;
    for idx in i1..=i2 {
        let w = 1.0 / special::log2_energy_variance(diagram.n_coeffs[idx]);
        let fit = intercept + alpha * diagram.octaves[idx] as f64;
        let r = diagram.y[idx].to_f64().expect("finite") - fit;
        residual += w * r * r;
    }
    let fit_quality = special::chi2_sf(residual, m - 2);
    Ok(ScalingEstimate {
        alpha: T::from_f64_near(alpha),
        alpha_se: T::from_f64_near((1.0 / sxx).sqrt()),
        hurst: T::from_f64_near((alpha + 1.0) / 2.0),
        j1,
        j2,
        fit_quality: T::from_f64_near(fit_quality),
    })
}

/// Octaves with at least this many interior coefficients anchor default fit
/// ranges and feature fits; fewer coefficients make the top octaves too noisy
/// to carry a conclusion on their own.
pub const MIN_FIT_COEFFS: usize = 8;

const FIT_QUALITY_FLOOR: f64 = 0.05;

/// Default fit range: the upper end is the deepest octave that still has
/// `MIN_FIT_COEFFS` interior coefficients; the lower end is the smallest
/// octave from which the remaining diagram looks linear (first fit whose
/// goodness-of-fit clears the floor, falling back to the best-quality onset).
pub fn choose_fit_range<T: Real>(diagram: &LogscaleDiagram<T>) -> Result<(usize, usize)> {
    let j2 = diagram
        .octaves
        .iter()
        .zip(&diagram.n_coeffs)
        .zip(&diagram.y)
        .filter(|((_, &n), y)| n >= MIN_FIT_COEFFS && y.is_finite())
        .map(|((&j, _), _)| j)
        .max()
        .ok_or_else(|| Error::OctaveRange {
            detail: format!("no octave reaches {MIN_FIT_COEFFS} interior coefficients"),
        })?;
    let first = diagram.octaves[0];
    if j2 < first + 2 {
        return Err(Error::OctaveRange {
            detail: format!("only octaves {first}..{j2} available; need 3 for a fit"),
        });
    }
    let mut best: Option<(usize, f64)> = None;
    for j1 in first..=j2 - 2 {
        let Ok(est) = estimate_scaling(diagram, j1, j2) else {
            continue;
        };
        let q = est.fit_quality.to_f64().expect("finite");
        if q >= FIT_QUALITY_FLOOR {
            return Ok((j1, j2));
        }
        if best.is_none_or(|(_, bq)| q > bq) {
            best = Some((j1, q));
        }
    }
    let (j1, _) = best.ok_or_else(|| Error::OctaveRange {
        detail: "no fittable onset octave".into(),
    })?;
    Ok((j1, j2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    /// One octave's energy stands above both neighbors' confidence bands:
    /// a characteristic time scale (for example a periodic component).
    Bump {
        octave: usize,
    },
    /// Energies rise linearly from `onset` to the deepest octave: scaling
    /// behavior with long-range dependence.
    LinearIncrease {
        onset: usize,
    },
    /// No octave leaves the common confidence band: scale-free noise.
    Flat,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeatureConfig {
    /// Minimum height, in y units, by which a bump must clear both
    /// neighbors' upper confidence bounds.
    pub bump_threshold: f64,
    /// Maximum confidence-discounted spread of y for a flat verdict.
    pub flat_threshold: f64,
    /// Minimum slope for a linear-increase verdict.
    pub lrd_alpha_min: f64,
    /// Minimum goodness-of-fit for a linear-increase fit to count.
    pub lrd_min_quality: f64,
    /// Significance multiple: the fitted slope must exceed `lrd_sigma`
    /// standard errors to rule out a noise slope from the sparse octaves.
    pub lrd_sigma: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            bump_threshold: 0.5,
            flat_threshold: 1.0,
            lrd_alpha_min: 0.2,
            lrd_min_quality: 0.05,
            lrd_sigma: 3.0,
        }
    }
}

/// Per-octave diagnostics backing a feature verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OctaveEvidence<T> {
    pub octave: usize,
    pub y: T,
    pub ci_half: T,
    /// Height above the taller neighbor's upper confidence bound; positive
    /// values mark bump candidates.
    pub bump_margin: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumFeature<T> {
    pub kind: FeatureKind,
    /// Spread of y once each octave is discounted by its confidence
    /// half-width; at or below the flat threshold the diagram carries no
    /// evidence of structure.
    pub discounted_spread: T,
    pub onset_fit: Option<ScalingEstimate<T>>,
    pub evidence: Vec<OctaveEvidence<T>>,
}

/// Classifies the shape of a logscale diagram. Precedence: a bump outranks a
/// linear increase, which outranks flatness; anything else is mixed.
pub fn detect_features<T: Real>(
    diagram: &LogscaleDiagram<T>,
    config: &FeatureConfig,
) -> Result<SpectrumFeature<T>> {
    let usable = (0..diagram.octave_count())
        .filter(|&i| diagram.usable(i))
        .count();
    if usable < 5 {
        return Err(Error::OctaveRange {
            detail: format!("feature detection needs 5 usable octaves, got {usable}"),
        });
    }

    let mut evidence = Vec::with_capacity(diagram.octave_count());
    let mut bump: Option<(usize, T)> = None;
    for i in 0..diagram.octave_count() {
        let mut margin = T::neg_infinity();
        if i > 0 && i + 1 < diagram.octave_count() {
            let flanks = [i - 1, i + 1];
            if diagram.usable(i) && flanks.iter().all(|&f| diagram.usable(f)) {
                let tallest = flanks
                    .iter()
                    .map(|&f| diagram.y[f] + diagram.ci_half[f])
                    .fold(T::neg_infinity(), T::max);
                margin = diagram.y[i] - tallest;
                if margin >= T::from_f64_near(config.bump_threshold) {
                    let better = bump.is_none_or(|(b, _)| diagram.y[i] > diagram.y[b]);
                    if better {
                        bump = Some((i, margin));
                    }
                }
            }
        }
        evidence.push(OctaveEvidence {
            octave: diagram.octaves[i],
            y: diagram.y[i],
            ci_half: diagram.ci_half[i],
            bump_margin: margin,
        });
    }

    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..diagram.octave_count() {
        if diagram.usable(i) {
            lo = lo.min(diagram.y[i] + diagram.ci_half[i]);
            hi = hi.max(diagram.y[i] - diagram.ci_half[i]);
        }
    }
    let discounted_spread = (hi - lo).max(T::zero());

    if let Some((i, _)) = bump {
        return Ok(SpectrumFeature {
            kind: FeatureKind::Bump {
                octave: diagram.octaves[i],
            },
            discounted_spread,
            onset_fit: None,
            evidence,
        });
    }

    // Onset fits end at the deepest well-populated octave; the sparse top
    // octaves have y deviations of a full unit or more and would let one
    // high outlier tilt every late-onset fit into a fake increase.
    let j_top = (0..diagram.octave_count())
        .rev()
        .find(|&i| diagram.usable(i) && diagram.n_coeffs[i] >= MIN_FIT_COEFFS)
        .map(|i| diagram.octaves[i]);
    let first = diagram.octaves[0];
    for onset in first..=j_top.unwrap_or(first).saturating_sub(2) {
        let j_top = j_top.expect("loop runs only when present");
        let Ok(est) = estimate_scaling(diagram, onset, j_top) else {
            continue;
        };
        let alpha = est.alpha.to_f64().expect("finite");
        let se = est.alpha_se.to_f64().expect("finite");
        let quality = est.fit_quality.to_f64().expect("finite");
        if alpha > config.lrd_alpha_min
            && alpha > config.lrd_sigma * se
            && quality >= config.lrd_min_quality
        {
            return Ok(SpectrumFeature {
                kind: FeatureKind::LinearIncrease { onset },
                discounted_spread,
                onset_fit: Some(est),
                evidence,
            });
        }
    }

    if discounted_spread <= T::from_f64_near(config.flat_threshold) {
        return Ok(SpectrumFeature {
            kind: FeatureKind::Flat,
            discounted_spread,
            onset_fit: None,
            evidence,
        });
    }

    Ok(SpectrumFeature {
        kind: FeatureKind::Mixed,
        discounted_spread,
        onset_fit: None,
        evidence,
    })
}
