//! Special-function helpers for the chi-squared statistics of octave energies.
//!
//! An octave's mean squared coefficient over n terms behaves like
//! `sigma^2 * X / n` with `X ~ chi-squared(n)`, so the log2 energy estimate
//! needs a digamma bias term, a trigamma variance, and chi-squared quantiles
//! for its confidence band. All of this depends only on the integer n, so it
//! is evaluated in f64 and converted by callers.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::digamma;
use std::f64::consts::LN_2;

/// Trigamma psi'(x) for x > 0. Recurrence pushes the argument to 10 or
/// above, where the Bernoulli asymptotic series through B_12 leaves a
/// truncation error near 1e-15.
pub fn trigamma(x: f64) -> f64 {
    assert!(x > 0.0, "trigamma domain");
    let mut acc = 0.0;
    let mut x = x;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = 1.0 / 6.0
        + inv2
            * (-1.0 / 30.0
                + inv2
                    * (1.0 / 42.0
                        + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0 - inv2 * 691.0 / 2730.0))));
    acc + inv * (1.0 + 0.5 * inv + inv2 * series)
}

/// Additive correction, in log2 units, that makes `log2(mean of n squared
/// coefficients)` unbiased for the log2 of the underlying variance:
/// `(ln(n/2) - psi(n/2)) / ln 2`.
pub fn log2_bias_correction(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    (h.ln() - digamma(h)) / LN_2
}

/// Variance of the bias-corrected log2 energy estimate: `psi'(n/2) / ln(2)^2`.
pub fn log2_energy_variance(n: usize) -> f64 {
    trigamma(n as f64 / 2.0) / (LN_2 * LN_2)
}

/// Half-width, in log2 units, of the central 95% confidence interval for the
/// log2 variance estimated from n squared Gaussian coefficients.
pub fn log2_ci_half_95(n: usize) -> f64 {
    let chi = ChiSquared::new(n as f64).expect("n >= 1");
    0.5 * (chi.inverse_cdf(0.975) / chi.inverse_cdf(0.025)).log2()
}

/// Upper tail probability P(X > x) for X ~ chi-squared(k).
pub fn chi2_sf(x: f64, k: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let chi = ChiSquared::new(k as f64).expect("k >= 1");
    1.0 - chi.cdf(x)
}
