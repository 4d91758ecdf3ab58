//! Exact likelihood for small models by enumerating hidden patterns.
//!
//! For a fixed `h` the visible factor of `exp(-E(v, h))` is an isotropic
//! Gaussian in `v` with mean `μ_h = b + σ² s Wᵀh`, so
//!
//! ```text
//! ∫ exp(-E(v, h)) dv = 2πσ² · exp(c·h + Σ_j (μ_hj² - b_j²) / (2σ²))
//! ```
//!
//! and `log Z` is a log-sum-exp over the `2^m` patterns.

use super::{EncoderScaling, HiddenPattern, RbmParams, VisiblePoint, VISIBLE};
use crate::error::{Error, Result};

/// Largest hidden layer the enumerating oracles accept.
pub const MAX_EXACT_HIDDEN: usize = 12;

/// `log Z`, the log normalizer of `exp(-E(v, h))` over `v ∈ ℝ²` and all `h`.
pub fn log_partition(params: &RbmParams, scaling: EncoderScaling) -> Result<f64> {
    let m = params.m();
    if m > MAX_EXACT_HIDDEN {
        return Err(Error::TooManyHidden {
            what: "exact log-likelihood",
            m,
            limit: MAX_EXACT_HIDDEN,
        });
    }
    let var = params.sigma * params.sigma;
    let s = scaling.coupling(params.sigma);
    let log_gauss = (2.0 * std::f64::consts::PI * var).ln();
    let terms: Vec<f64> = HiddenPattern::all(m)
        .map(|h| {
            let mut shift = [0.0; VISIBLE];
            let mut bias = 0.0;
            for ((w, c), &on) in params.weights.iter().zip(&params.hid_bias).zip(h.bits()) {
                if on {
                    shift[0] += w[0];
                    shift[1] += w[1];
                    bias += c;
                }
            }
            let quad: f64 = (0..VISIBLE)
                .map(|j| {
                    let b = params.vis_bias[j];
                    let mu = b + var * s * shift[j];
                    (mu * mu - b * b) / (2.0 * var)
                })
                .sum();
            log_gauss + bias + quad
        })
        .collect();
    Ok(log_sum_exp(&terms))
}

/// `log p(v) = -F(v) - log Z`.
pub fn exact_log_likelihood(
    params: &RbmParams,
    v: &VisiblePoint,
    scaling: EncoderScaling,
) -> Result<f64> {
    Ok(-params.free_energy(v, scaling) - log_partition(params, scaling)?)
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let mx = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !mx.is_finite() {
        return mx;
    }
    mx + xs.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}
