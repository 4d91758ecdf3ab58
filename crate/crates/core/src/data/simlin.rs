//! Linear structural causal model `X := N₁`, `Y := b·X + c·N₂` with
//! randomly shaped noise distributions and `c` chosen so `var(Y) = var(X)`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{zscore, CauseEffectPair, DatasetTag};
use crate::seed;
use crate::Direction;

/// A finite Gaussian mixture used to draw noise of varied shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl GaussianMixture {
    /// `K ~ U{1..5}` components with means in `[-2, 2]`, standard deviations
    /// in `[0.2, 1]`, and flat-Dirichlet weights.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let k = rng.random_range(1..=5usize);
        let means = (0..k).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let sds = (0..k).map(|_| rng.random_range(0.2..=1.0)).collect();
        let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.into_iter().map(|w| w / total).collect();
        GaussianMixture { weights, means, sds }
    }

    /// Draws `n` raw (unstandardized) values.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut comp = self.weights.len() - 1;
                for (i, w) in self.weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        comp = i;
                        break;
                    }
                }
                let z: f64 = StandardNormal.sample(rng);
                self.means[comp] + self.sds[comp] * z
            })
            .collect()
    }
}

/// `n` draws from a fresh random mixture, standardized to mean 0, variance 1.
pub fn sample_random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mixture = GaussianMixture::random(rng);
    let raw = mixture.sample(rng, n);
    // A single draw, or an all-equal sample, has no spread to standardize.
    zscore(&raw).unwrap_or_else(|_| vec![0.0; n])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimLinSpec {
    pub n_pairs: usize,
    pub n_obs: usize,
    pub seed: u64,
}

impl Default for SimLinSpec {
    fn default() -> Self {
        SimLinSpec {
            n_pairs: 100,
            n_obs: 1000,
            seed: 0,
        }
    }
}

/// One generated pair plus the mechanism that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SimLinDraw {
    pub pair: CauseEffectPair,
    pub slope: f64,
    pub noise_scale: f64,
}

fn population_var(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Draws one pair; `slope` overrides the uniform draw of `b` when given.
pub fn simlin_pair<R: Rng + ?Sized>(
    rng: &mut R,
    id: &str,
    n_obs: usize,
    slope: Option<f64>,
) -> SimLinDraw {
    let x = sample_random_distribution(rng, n_obs);
    let noise = sample_random_distribution(rng, n_obs);
    let drawn: f64 = rng.random_range(-1.0..=1.0);
    let slope = slope.unwrap_or(drawn);
    let (vx, vn) = (population_var(&x), population_var(&noise));
    let noise_scale = if vn > 0.0 {
        ((1.0 - slope * slope).max(0.0) * vx / vn).sqrt()
    } else {
        0.0
    };
    let y: Vec<f64> = x
        .iter()
        .zip(&noise)
        .map(|(&xi, &ni)| slope * xi + noise_scale * ni)
        .collect();
    let pair = CauseEffectPair {
        id: id.to_string(),
        x,
        y,
        truth: Direction::XtoY,
        weight: 1.0,
        source: DatasetTag::SimLin,
    };
    SimLinDraw {
        pair,
        slope,
        noise_scale,
    }
}

/// Pair ids used by generated datasets.
pub(crate) fn pair_id(index: usize) -> String {
    format!("pair{index:04}")
}

/// Generates the SIM-LIN dataset; pair `i` uses its own stream from `(seed, i)`.
pub fn gen_simlin(spec: &SimLinSpec) -> Vec<CauseEffectPair> {
    (1..=spec.n_pairs)
        .map(|i| {
            let mut rng = seed::rng(seed::derive(spec.seed, &[i as u64]));
            simlin_pair(&mut rng, &pair_id(i), spec.n_obs, None).pair
        })
        .collect()
}
