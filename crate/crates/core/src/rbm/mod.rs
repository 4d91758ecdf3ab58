//! Gaussian-Bernoulli restricted Boltzmann machine over two visible coordinates.
//!
//! The model couples a two-dimensional real visible vector `v = [x, y]` with
//! `m` binary hidden units through the energy
//!
//! ```text
//! E(v, h) = Σ_j (v_j - b_j)² / (2σ²) - Σ_i c_i h_i - s · Σ_ij h_i W_ij v_j
//! ```
//!
//! where `s = 1/σ²` under [`EncoderScaling::VarianceScaled`] (the default) and
//! `s = 1` under [`EncoderScaling::Unscaled`]. The encoder is
//! `p(h_i = 1 | v) = φ(c_i + s · W_i v)` and the decoder mean is `b + Wᵀh`.
//! Only the variance-scaled coupling makes that decoder the exact conditional
//! of the energy; the unscaled variant keeps the encoder without the `1/σ²`
//! factor and is provided for comparison.

mod cd;
mod exact;

pub use cd::{cd_loss_and_grad, cd_step, reconstruct, CdOptions, Reconstruction};
pub use exact::{exact_log_likelihood, log_partition, MAX_EXACT_HIDDEN};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of visible coordinates. The model is bivariate by construction.
pub const VISIBLE: usize = 2;

/// How the visible input is scaled before it enters the hidden units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderScaling {
    /// `φ(c_i + W_i v / σ²)`, the conditional of the Gaussian-Bernoulli energy.
    #[default]
    VarianceScaled,
    /// `φ(c_i + W_i v)`, ignoring the decoder variance.
    Unscaled,
}

impl EncoderScaling {
    /// Multiplier applied to `W v` for a decoder width `sigma`.
    #[inline]
    pub fn coupling(self, sigma: f64) -> f64 {
        match self {
            EncoderScaling::VarianceScaled => 1.0 / (sigma * sigma),
            EncoderScaling::Unscaled => 1.0,
        }
    }
}

impl std::str::FromStr for EncoderScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "variance_scaled" | "energy_consistent" => Ok(EncoderScaling::VarianceScaled),
            "unscaled" | "literal" => Ok(EncoderScaling::Unscaled),
            other => Err(Error::InvalidConfig(format!(
                "unknown encoder scaling `{other}` (expected variance_scaled or unscaled)"
            ))),
        }
    }
}

/// A point in visible space, in z-score units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisiblePoint(pub [f64; VISIBLE]);

impl VisiblePoint {
    pub fn new(x: f64, y: f64) -> Self {
        VisiblePoint([x, y])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn swapped(&self) -> Self {
        VisiblePoint([self.0[1], self.0[0]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<[f64; VISIBLE]> for VisiblePoint {
    fn from(v: [f64; VISIBLE]) -> Self {
        VisiblePoint(v)
    }
}

/// A binary hidden activation pattern `h ∈ {0,1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HiddenPattern(Vec<bool>);

impl HiddenPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        HiddenPattern(bits)
    }

    pub fn zeros(m: usize) -> Self {
        HiddenPattern(vec![false; m])
    }

    pub fn ones(m: usize) -> Self {
        HiddenPattern(vec![true; m])
    }

    /// Pattern whose bit `i` is bit `i` of `index`.
    pub fn from_index(index: usize, m: usize) -> Self {
        HiddenPattern((0..m).map(|i| (index >> i) & 1 == 1).collect())
    }

    /// Inverse of [`HiddenPattern::from_index`].
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Iterates over all `2^m` patterns in ascending binary order.
    pub fn all(m: usize) -> impl Iterator<Item = HiddenPattern> {
        (0..1usize << m).map(move |idx| HiddenPattern::from_index(idx, m))
    }
}

/// Full parameter vector of the model.
///
/// `weights[i]` is row `W_i`, the coupling of hidden unit `i` to both visible
/// coordinates. `sigma` is fixed during training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbmParams {
    pub weights: Vec<[f64; VISIBLE]>,
    pub vis_bias: [f64; VISIBLE],
    pub hid_bias: Vec<f64>,
    pub sigma: f64,
}

impl RbmParams {
    pub fn new(
        weights: Vec<[f64; VISIBLE]>,
        vis_bias: [f64; VISIBLE],
        hid_bias: Vec<f64>,
        sigma: f64,
    ) -> Result<Self> {
        let params = RbmParams {
            weights,
            vis_bias,
            hid_bias,
            sigma,
        };
        params.validate()?;
        Ok(params)
    }

    /// All-zero couplings and biases.
    pub fn zeros(m: usize, sigma: f64) -> Result<Self> {
        Self::new(vec![[0.0; VISIBLE]; m], [0.0; VISIBLE], vec![0.0; m], sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.weights.is_empty() {
            return Err(Error::InvalidParams("need at least one hidden unit".into()));
        }
        if self.weights.len() != self.hid_bias.len() {
            return Err(Error::InvalidParams(format!(
                "{} weight rows but {} hidden biases",
                self.weights.len(),
                self.hid_bias.len()
            )));
        }
        let finite = self.weights.iter().flatten().all(|w| w.is_finite())
            && self.vis_bias.iter().all(|b| b.is_finite())
            && self.hid_bias.iter().all(|c| c.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite entry".into()));
        }
        Ok(())
    }

    /// Number of hidden units.
    #[inline]
    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// Hidden pre-activations `c_i + s · W_i v`.
    pub fn hidden_input(&self, v: &VisiblePoint, scaling: EncoderScaling) -> Vec<f64> {
        let s = scaling.coupling(self.sigma);
        self.weights
            .iter()
            .zip(&self.hid_bias)
            .map(|(w, c)| c + s * (w[0] * v.0[0] + w[1] * v.0[1]))
            .collect()
    }

    /// Bernoulli means `p(h_i = 1 | v)`.
    pub fn encode_prob(&self, v: &VisiblePoint, scaling: EncoderScaling) -> Vec<f64> {
        let mut a = self.hidden_input(v, scaling);
        a.iter_mut().for_each(|x| *x = sigmoid(*x));
        a
    }

    /// Draws `h ~ p(h | v)`, one uniform per hidden unit in index order.
    pub fn sample_hidden<R: Rng + ?Sized>(
        &self,
        v: &VisiblePoint,
        scaling: EncoderScaling,
        rng: &mut R,
    ) -> HiddenPattern {
        let probs = self.encode_prob(v, scaling);
        HiddenPattern(
            probs
                .into_iter()
                .map(|p| rng.random::<f64>() < p)
                .collect(),
        )
    }

    /// Decoder mean `b + Wᵀh`.
    pub fn decode_mean(&self, h: &HiddenPattern) -> [f64; VISIBLE] {
        debug_assert_eq!(h.len(), self.m());
        let mut mean = self.vis_bias;
        for (w, &on) in self.weights.iter().zip(h.bits()) {
            if on {
                mean[0] += w[0];
                mean[1] += w[1];
            }
        }
        mean
    }

    /// Draws `v ~ N(b + Wᵀh, σ² I)`.
    pub fn sample_visible<R: Rng + ?Sized>(&self, h: &HiddenPattern, rng: &mut R) -> VisiblePoint {
        let mean = self.decode_mean(h);
        let mut v = [0.0; VISIBLE];
        for (out, mu) in v.iter_mut().zip(mean) {
            let z: f64 = StandardNormal.sample(rng);
            *out = mu + self.sigma * z;
        }
        VisiblePoint(v)
    }

    /// Joint energy `E(v, h)`.
    pub fn energy(&self, v: &VisiblePoint, h: &HiddenPattern, scaling: EncoderScaling) -> f64 {
        let s = scaling.coupling(self.sigma);
        let var = self.sigma * self.sigma;
        let quad: f64 = (0..VISIBLE)
            .map(|j| (v.0[j] - self.vis_bias[j]).powi(2) / (2.0 * var))
            .sum();
        let hidden: f64 = self
            .weights
            .iter()
            .zip(&self.hid_bias)
            .zip(h.bits())
            .filter(|(_, &on)| on)
            .map(|((w, c), _)| c + s * (w[0] * v.0[0] + w[1] * v.0[1]))
            .sum();
        quad - hidden
    }

    /// Free energy `F(v) = -log Σ_h exp(-E(v, h))`, with the hidden sum done in closed form.
    pub fn free_energy(&self, v: &VisiblePoint, scaling: EncoderScaling) -> f64 {
        let var = self.sigma * self.sigma;
        let quad: f64 = (0..VISIBLE)
            .map(|j| (v.0[j] - self.vis_bias[j]).powi(2) / (2.0 * var))
            .sum();
        let soft: f64 = self
            .hidden_input(v, scaling)
            .into_iter()
            .map(softplus)
            .sum();
        quad - soft
    }

    /// Mirror image of the model with the two visible coordinates exchanged.
    pub fn swap_coordinates(&self) -> Self {
        RbmParams {
            weights: self.weights.iter().map(|w| [w[1], w[0]]).collect(),
            vis_bias: [self.vis_bias[1], self.vis_bias[0]],
            hid_bias: self.hid_bias.clone(),
            sigma: self.sigma,
        }
    }

    /// Copy with every entry rounded to `digits` significant digits.
    pub fn truncated(&self, digits: u32) -> Self {
        let r = |x: f64| round_significant(x, digits);
        RbmParams {
            weights: self.weights.iter().map(|w| [r(w[0]), r(w[1])]).collect(),
            vis_bias: [r(self.vis_bias[0]), r(self.vis_bias[1])],
            hid_bias: self.hid_bias.iter().copied().map(r).collect(),
            sigma: self.sigma,
        }
    }

    /// Applies `self += scale * grad` over the trainable entries.
    pub fn add_scaled(&mut self, grad: &Gradient, scale: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            w[0] += scale * g[0];
            w[1] += scale * g[1];
        }
        for (b, g) in self.vis_bias.iter_mut().zip(grad.vis_bias) {
            *b += scale * g;
        }
        for (c, g) in self.hid_bias.iter_mut().zip(&grad.hid_bias) {
            *c += scale * g;
        }
    }
}

/// A parameter-shaped vector: derivative with respect to `W`, `b`, and `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub weights: Vec<[f64; VISIBLE]>,
    pub vis_bias: [f64; VISIBLE],
    pub hid_bias: Vec<f64>,
}

impl Gradient {
    pub fn zeros(m: usize) -> Self {
        Gradient {
            weights: vec![[0.0; VISIBLE]; m],
            vis_bias: [0.0; VISIBLE],
            hid_bias: vec![0.0; m],
        }
    }

    /// Flattened view in the order `W` (row-major), `b`, `c`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.weights
            .iter()
            .flatten()
            .chain(self.vis_bias.iter())
            .chain(self.hid_bias.iter())
            .copied()
            .collect()
    }

    pub fn add_scaled(&mut self, other: &Gradient, scale: f64) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a[0] += scale * b[0];
            a[1] += scale * b[1];
        }
        for (a, b) in self.vis_bias.iter_mut().zip(other.vis_bias) {
            *a += scale * b;
        }
        for (a, b) in self.hid_bias.iter_mut().zip(&other.hid_bias) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.weights.iter_mut().flatten().for_each(|x| *x *= factor);
        self.vis_bias.iter_mut().for_each(|x| *x *= factor);
        self.hid_bias.iter_mut().for_each(|x| *x *= factor);
    }

    pub fn dot(&self, other: &Gradient) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().into_iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Logistic sigmoid, evaluated without overflow for large `|x|`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)`, evaluated without overflow for large `|x|`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // Going through the decimal formatter avoids the double rounding of
    // scaling by powers of ten.
    format!("{:.*e}", digits.saturating_sub(1) as usize, x)
        .parse()
        .unwrap_or(x)
}
