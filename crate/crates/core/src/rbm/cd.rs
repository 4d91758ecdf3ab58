//! One-step contrastive divergence on the free energy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sigmoid, EncoderScaling, Gradient, RbmParams, VisiblePoint, VISIBLE};
use crate::error::{Error, Result};

/// How the reconstruction `v¹` is formed from the sampled hidden pattern.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconstruction {
    /// `v¹ = b + Wᵀh`.
    #[default]
    MeanField,
    /// `v¹ ~ N(b + Wᵀh, σ² I)`.
    Sampled,
}

impl std::str::FromStr for Reconstruction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "mean_field" | "mean" => Ok(Reconstruction::MeanField),
            "sampled" => Ok(Reconstruction::Sampled),
            other => Err(Error::InvalidConfig(format!(
                "unknown reconstruction `{other}` (expected mean_field or sampled)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdOptions {
    pub scaling: EncoderScaling,
    pub reconstruction: Reconstruction,
}

/// One Gibbs half-cycle per point: `h ~ p(h | v⁰)`, then `v¹` from `h`.
pub fn reconstruct<R: Rng + ?Sized>(
    params: &RbmParams,
    batch: &[VisiblePoint],
    opts: CdOptions,
    rng: &mut R,
) -> Vec<VisiblePoint> {
    batch
        .iter()
        .map(|v| {
            let h = params.sample_hidden(v, opts.scaling, rng);
            match opts.reconstruction {
                Reconstruction::MeanField => VisiblePoint(params.decode_mean(&h)),
                Reconstruction::Sampled => params.sample_visible(&h, rng),
            }
        })
        .collect()
}

/// CD-1 loss `mean[F(v⁰) - F(v¹)]` and its gradient.
///
/// The reconstructions are drawn from `rng` and then held constant, so no
/// gradient flows through `v¹`.
pub fn cd_step<R: Rng + ?Sized>(
    params: &RbmParams,
    batch: &[VisiblePoint],
    opts: CdOptions,
    rng: &mut R,
) -> Result<(f64, Gradient)> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let recon = reconstruct(params, batch, opts, rng);
    cd_loss_and_grad(params, batch, &recon, opts.scaling)
}

/// Loss and gradient of `mean[F(data_n) - F(recon_n)]` for fixed reconstructions.
pub fn cd_loss_and_grad(
    params: &RbmParams,
    data: &[VisiblePoint],
    recon: &[VisiblePoint],
    scaling: EncoderScaling,
) -> Result<(f64, Gradient)> {
    if data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if data.len() != recon.len() {
        return Err(Error::InvalidParams(format!(
            "{} data points but {} reconstructions",
            data.len(),
            recon.len()
        )));
    }
    let mut grad = Gradient::zeros(params.m());
    let mut loss = 0.0;
    for (v0, v1) in data.iter().zip(recon) {
        loss += params.free_energy(v0, scaling) - params.free_energy(v1, scaling);
        accumulate_free_energy_grad(params, v0, scaling, 1.0, &mut grad);
        accumulate_free_energy_grad(params, v1, scaling, -1.0, &mut grad);
    }
    let n = data.len() as f64;
    grad.scale(1.0 / n);
    Ok((loss / n, grad))
}

/// Adds `sign · ∂F(v)/∂θ` into `grad`.
fn accumulate_free_energy_grad(
    params: &RbmParams,
    v: &VisiblePoint,
    scaling: EncoderScaling,
    sign: f64,
    grad: &mut Gradient,
) {
    let s = scaling.coupling(params.sigma);
    let var = params.sigma * params.sigma;
    for j in 0..VISIBLE {
        grad.vis_bias[j] -= sign * (v.0[j] - params.vis_bias[j]) / var;
    }
    for (i, (w, c)) in params.weights.iter().zip(&params.hid_bias).enumerate() {
        let p = sigmoid(c + s * (w[0] * v.0[0] + w[1] * v.0[1]));
        grad.hid_bias[i] -= sign * p;
        grad.weights[i][0] -= sign * p * s * v.0[0];
        grad.weights[i][1] -= sign * p * s * v.0[1];
    }
}
