//! Decimated Daubechies wavelet decomposition.
//!
//! The pyramid convolves periodically at each level, which keeps the
//! transform orthonormal on power-of-two lengths (energy is conserved
//! exactly). Coefficients whose support, unrolled to the original series,
//! crosses the series edge are tracked per level and excluded from all
//! statistics; odd-length levels are truncated by one sample rather than
//! padded. Decomposition stops at the deepest octave that still has at least
//! `MIN_OCTAVE_COEFFS` interior coefficients.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::real::Real;

/// Fewest interior coefficients an octave may contribute.
pub const MIN_OCTAVE_COEFFS: usize = 4;

/// Shortest decomposable series: guarantees room for the minimum useful
/// number of octaves (3) with the coefficient floor above.
pub const MIN_SERIES_LEN: usize = 32;

pub const MAX_MOMENTS: usize = 10;

/// Orthonormal Daubechies analysis filters; `moments` vanishing moments give
/// a filter of length `2 * moments`.
#[derive(Clone, Debug)]
pub struct Wavelet {
    pub moments: usize,
    dec_lo: Vec<f64>,
    dec_hi: Vec<f64>,
}

impl Wavelet {
    pub fn daubechies(moments: usize) -> Result<Self> {
        if !(1..=MAX_MOMENTS).contains(&moments) {
            return Err(Error::InvalidParameter {
                detail: format!("vanishing moments must lie in 1..={MAX_MOMENTS}, got {moments}"),
            });
        }
        let dec_lo = DAUBECHIES_LOWPASS[moments - 1].to_vec();
        let len = dec_lo.len();
        // Quadrature mirror: dec_hi[i] = (-1)^(i+1) * dec_lo[len-1-i].
        let dec_hi = (0..len)
            .map(|i| {
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                sign * dec_lo[len - 1 - i]
            })
            .collect();
        Ok(Wavelet {
            moments,
            dec_lo,
            dec_hi,
        })
    }

    pub fn filter_len(&self) -> usize {
        self.dec_lo.len()
    }

    pub fn dec_lo(&self) -> &[f64] {
        &self.dec_lo
    }

    pub fn dec_hi(&self) -> &[f64] {
        &self.dec_hi
    }
}

/// Detail coefficients of one octave. `coeffs` holds the full periodized
/// level; `interior` indexes the prefix whose support stayed inside the data.
#[derive(Clone, Debug)]
pub struct DetailLevel<T> {
    pub octave: usize,
    pub coeffs: Vec<T>,
    pub interior: Range<usize>,
}

impl<T: Real> DetailLevel<T> {
    pub fn interior_coeffs(&self) -> &[T] {
        &self.coeffs[self.interior.clone()]
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }
}

#[derive(Clone, Debug)]
pub struct DetailPyramid<T> {
    pub levels: Vec<DetailLevel<T>>,
    /// Approximation left after the last retained octave.
    pub final_approx: Vec<T>,
    pub input_len: usize,
    pub moments: usize,
}

impl<T: Real> DetailPyramid<T> {
    pub fn deepest_octave(&self) -> usize {
        self.levels.len()
    }

    /// Sum of squares over every coefficient of the transform, details plus
    /// final approximation. Equals the input energy on power-of-two lengths.
    pub fn transform_energy(&self) -> T {
        let detail: T = self
            .levels
            .iter()
            .flat_map(|l| l.coeffs.iter())
            .fold(T::zero(), |acc, &c| acc + c * c);
        self.final_approx.iter().fold(detail, |acc, &c| acc + c * c)
    }
}

pub fn dwt_details<T: Real>(values: &[T], wavelet: &Wavelet) -> Result<DetailPyramid<T>> {
    if values.len() < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            required: MIN_SERIES_LEN,
        });
    }
    let filter_len = wavelet.filter_len();
    let lo: Vec<T> = wavelet
        .dec_lo
        .iter()
        .map(|&c| T::from_f64_near(c))
        .collect();
    let hi: Vec<T> = wavelet
        .dec_hi
        .iter()
        .map(|&c| T::from_f64_near(c))
        .collect();

    let mut approx = values.to_vec();
    // Count of leading approximation samples never touched by a wrapped
    // window; shrinks level by level exactly like the interior ranges.
    let mut pure = approx.len();
    let mut levels = Vec::new();
    loop {
        let truncated = approx.len() & !1;
        if truncated < filter_len.max(2) {
            break;
        }
        let pure_in = pure.min(truncated);
        let next_interior = interior_after_step(pure_in, filter_len);
        if next_interior < MIN_OCTAVE_COEFFS {
            break;
        }
        approx.truncate(truncated);
        let half = truncated / 2;
        let mut next_approx = Vec::with_capacity(half);
        let mut detail = Vec::with_capacity(half);
        for k in 0..half {
            let mut a = T::zero();
            let mut d = T::zero();
            for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
                let idx = (2 * k + i) % truncated;
                let x = approx[idx];
                a = a + l * x;
                d = d + h * x;
            }
            next_approx.push(a);
            detail.push(d);
        }
        levels.push(DetailLevel {
            octave: levels.len() + 1,
            coeffs: detail,
            interior: 0..next_interior,
        });
        approx = next_approx;
        pure = next_interior;
    }
    Ok(DetailPyramid {
        levels,
        final_approx: approx,
        input_len: values.len(),
        moments: wavelet.moments,
    })
}

/// Interior coefficients after one analysis step over `pure_in` clean input
/// samples: output k uses inputs 2k .. 2k + filter_len - 1.
fn interior_after_step(pure_in: usize, filter_len: usize) -> usize {
    if pure_in < filter_len {
        0
    } else {
        (pure_in - filter_len) / 2 + 1
    }
}

/// Orthonormal Daubechies scaling (low-pass) coefficients for 1..=10
/// vanishing moments; each row sums to sqrt(2) with unit energy.
#[allow(clippy::approx_constant)] // regenerated table; the first row is 1/sqrt(2)
const DAUBECHIES_LOWPASS: [&[f64]; 10] = [
    &[0.7071067811865476, 0.7071067811865476],
    &[
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ],
    &[
        0.33267055295008263,
        0.8068915093110925,
        0.45987750211849154,
        -0.13501102001025458,
        -0.08544127388202666,
        0.03522629188570953,
    ],
    &[
        0.2303778133088965,
        0.7148465705529157,
        0.6308807679298589,
        -0.027983769416859854,
        -0.18703481171909309,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ],
    &[
        0.16010239797419293,
        0.6038292697971896,
        0.7243085284377729,
        0.13842814590132074,
        -0.24229488706638203,
        -0.032244869584638375,
        0.07757149384004572,
        -0.006241490212798274,
        -0.012580751999081999,
        0.0033357252854737712,
    ],
    &[
        0.11154074335010947,
        0.49462389039845306,
        0.7511339080210954,
        0.31525035170919763,
        -0.22626469396543983,
        -0.12976686756726194,
        0.09750160558732304,
        0.027522865530305727,
        -0.03158203931748603,
        0.0005538422011614961,
        0.004777257510945511,
        -0.0010773010853084796,
    ],
    &[
        0.07785205408500918,
        0.3965393194819173,
        0.7291320908462351,
        0.4697822874051931,
        -0.14390600392856498,
        -0.22403618499387498,
        0.07130921926683026,
        0.08061260915108308,
        -0.03802993693501441,
        -0.01657454163066688,
        0.01255099855609984,
        0.0004295779729213665,
        -0.0018016407040474908,
        0.00035371379997452024,
    ],
    &[
        0.05441584224310401,
        0.31287159091429995,
        0.6756307362972898,
        0.5853546836542067,
        -0.015829105256349306,
        -0.2840155429615469,
        0.0004724845739132828,
        0.12874742662047847,
        -0.017369301001807547,
        -0.044088253930794755,
        0.013981027917398282,
        0.008746094047405777,
        -0.004870352993451574,
        -0.00039174037337694705,
        0.0006754494064505693,
        -0.00011747678412476953,
    ],
    &[
        0.038077947363878345,
        0.24383467461259034,
        0.6048231236901112,
        0.6572880780513005,
        0.13319738582500756,
        -0.2932737832791749,
        -0.09684078322297646,
        0.14854074933810638,
        0.03072568147933338,
        -0.06763282906132997,
        0.00025094711483145197,
        0.022361662123679096,
        -0.004723204757751397,
        -0.00428150368246343,
        0.0018476468830562265,
        0.00023038576352319597,
        -0.0002519631889427101,
        3.93473203162716e-05,
    ],
    &[
        0.026670057900555554,
        0.1881768000776915,
        0.5272011889317256,
        0.6884590394536035,
        0.2811723436605775,
        -0.24984642432731538,
        -0.19594627437737705,
        0.12736934033579325,
        0.09305736460357235,
        -0.07139414716639708,
        -0.029457536821875813,
        0.033212674059341,
        0.0036065535669561697,
        -0.010733175483330575,
        0.001395351747052901,
        0.001992405295185056,
        -0.0006858566949597116,
        -0.00011646685512928545,
        9.358867032006959e-05,
        -1.3264202894521244e-05,
    ],
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn filters_are_orthonormal_quadrature_pairs() {
        for moments in 1..=MAX_MOMENTS {
            let w = Wavelet::daubechies(moments).unwrap();
            let sum: f64 = w.dec_lo().iter().sum();
            let energy: f64 = w.dec_lo().iter().map(|c| c * c).sum();
            let hi_sum: f64 = w.dec_hi().iter().sum();
            let cross: f64 = w.dec_lo().iter().zip(w.dec_hi()).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(sum, std::f64::consts::SQRT_2, epsilon = 1e-12);
            assert_abs_diff_eq!(energy, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(hi_sum, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cross, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn high_pass_annihilates_polynomials_up_to_moments() {
        for moments in 1..=MAX_MOMENTS {
            let w = Wavelet::daubechies(moments).unwrap();
            for power in 0..moments {
                let terms: Vec<f64> = w
                    .dec_hi()
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| c * (i as f64).powi(power as i32))
                    .collect();
                let moment: f64 = terms.iter().sum();
                // The cancellation is exact in reals; in f64 the residual
                // scales with the magnitude of the canceling terms.
                let scale: f64 = terms.iter().map(|t| t.abs()).sum();
                assert!(
                    moment.abs() <= 1e-13 * scale.max(1.0),
                    "moments={moments} power={power}: residual {moment:e} vs scale {scale:e}"
                );
            }
        }
    }

    #[test]
    fn moments_outside_supported_range_are_rejected() {
        assert!(Wavelet::daubechies(0).is_err());
        assert!(Wavelet::daubechies(11).is_err());
    }

    #[test]
    fn constant_series_has_zero_details_everywhere() {
        let w = Wavelet::daubechies(3).unwrap();
        let values = vec![4.2f64; 1024];
        let pyr = dwt_details(&values, &w).unwrap();
        assert!(!pyr.levels.is_empty());
        for level in &pyr.levels {
            for &c in &level.coeffs {
                assert_abs_diff_eq!(c, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn linear_ramp_has_zero_interior_details_with_two_moments() {
        let w = Wavelet::daubechies(2).unwrap();
        let values: Vec<f64> = (0..1024).map(|i| 3.0 * i as f64 - 17.0).collect();
        let pyr = dwt_details(&values, &w).unwrap();
        for level in &pyr.levels {
            for &c in level.interior_coeffs() {
                assert_abs_diff_eq!(c, 0.0, epsilon = 1e-7);
            }
            // Boundary coefficients wrap the jump from the end of the ramp
            // back to its start and are legitimately nonzero.
            assert!(level.coeffs[level.interior.end..]
                .iter()
                .any(|&c| c.abs() > 1.0));
        }
    }

    #[test]
    fn energy_is_conserved_on_power_of_two_lengths() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..4096).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let input_energy: f64 = values.iter().map(|v| v * v).sum();
        for moments in [1, 3, 10] {
            let w = Wavelet::daubechies(moments).unwrap();
            let pyr = dwt_details(&values, &w).unwrap();
            let rel = (pyr.transform_energy() - input_energy).abs() / input_energy;
            assert!(rel < 1e-9, "moments={moments} rel={rel:e}");
        }
    }

    #[test]
    fn impulse_energy_splits_between_details_and_approximation() {
        let w = Wavelet::daubechies(3).unwrap();
        let mut values = vec![0.0f64; 1024];
        values[512] = 1.0;
        let pyr = dwt_details(&values, &w).unwrap();
        let detail_energy: f64 = pyr
            .levels
            .iter()
            .flat_map(|l| l.coeffs.iter())
            .map(|c| c * c)
            .sum();
        let approx_energy: f64 = pyr.final_approx.iter().map(|c| c * c).sum();
        assert_abs_diff_eq!(detail_energy + approx_energy, 1.0, epsilon = 1e-12);
        assert!(detail_energy > 0.9); // far from the coarse approximation scale
    }

    #[test]
    fn impulse_details_stay_inside_the_cone_of_support() {
        let w = Wavelet::daubechies(3).unwrap();
        let n = 1024;
        let p = 512usize;
        let mut values = vec![0.0f64; n];
        values[p] = 1.0;
        let pyr = dwt_details(&values, &w).unwrap();
        let filter_len = w.filter_len();
        for level in &pyr.levels {
            let j = level.octave;
            let span = (filter_len - 1) * (1 << j) - filter_len + 2;
            for (k, &c) in level.coeffs.iter().enumerate() {
                if c.abs() > 1e-12 {
                    let start = k << j;
                    // Support is start .. start + span (mod n); the impulse
                    // must fall inside it.
                    let offset = (p + n - start) % n;
                    assert!(offset < span, "octave {j} coeff {k} outside cone");
                }
            }
        }
    }

    #[test]
    fn octave_counts_track_halving_within_boundary_loss() {
        let w = Wavelet::daubechies(3).unwrap();
        let n = 16384;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let pyr = dwt_details(&values, &w).unwrap();
        for level in &pyr.levels {
            let ideal = n >> level.octave;
            let loss = ideal - level.n_interior();
            assert!(
                loss <= w.filter_len(),
                "octave {} lost {} coefficients",
                level.octave,
                loss
            );
        }
        assert!(pyr.levels.last().unwrap().n_interior() >= MIN_OCTAVE_COEFFS);
    }

    #[test]
    fn short_series_is_rejected_with_required_length() {
        let w = Wavelet::daubechies(3).unwrap();
        let values = vec![1.0f64; MIN_SERIES_LEN - 1];
        match dwt_details(&values, &w) {
            Err(Error::SeriesTooShort { len, required }) => {
                assert_eq!(len, MIN_SERIES_LEN - 1);
                assert_eq!(required, MIN_SERIES_LEN);
            }
            other => panic!("expected SeriesTooShort, got {other:?}"),
        }
    }

    #[test]
    fn non_power_of_two_lengths_truncate_instead_of_pad() {
        let w = Wavelet::daubechies(2).unwrap();
        // A ramp on 1000 samples: any padding would break the vanishing-moment
        // annihilation near the (virtual) pad boundary inside interior ranges.
        let values: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let pyr = dwt_details(&values, &w).unwrap();
        assert!(pyr.deepest_octave() >= 5);
        for level in &pyr.levels {
            for &c in level.interior_coeffs() {
                assert_abs_diff_eq!(c, 0.0, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn works_in_f32_too() {
        let w = Wavelet::daubechies(3).unwrap();
        let values: Vec<f32> = (0..512).map(|i| (i as f32 * 0.37).cos()).collect();
        let pyr = dwt_details(&values, &w).unwrap();
        assert!(pyr.deepest_octave() >= 4);
    }
}
