//! Minimizes `CD(θ) + λ R(θ)` by gradient descent with an exponentially
//! decaying step size and early stopping on a smoothed loss.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::criterion::{gamma, Decision};
use crate::data::{zscore, DatasetTag};
use crate::error::{Error, Result};
use crate::rbm::{cd_step, CdOptions, EncoderScaling, Gradient, RbmParams, Reconstruction, VisiblePoint};
use crate::regularizer::{reg_value_and_grad, RangeBox};
use crate::seed;

/// Standard deviation of the initial weights.
pub const INIT_WEIGHT_STD: f64 = 0.01;

/// Hidden samples averaged per point in [`reconstruction_error`].
pub const RECON_SAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Hidden units.
    pub m: usize,
    /// Decoder standard deviation.
    pub sigma: f64,
    /// Weight of the mode-placement regularizer.
    pub lambda: f64,
    /// Initial step size.
    pub eta: f64,
    /// Step-size multiplier applied every `decay_every` epochs.
    pub decay_q: f64,
    pub decay_every: usize,
    pub max_epochs: usize,
    /// Epochs without improvement of the smoothed loss before stopping.
    pub patience: usize,
    pub min_delta: f64,
    /// Smoothing factor of the loss moving average.
    pub ema_factor: f64,
    /// Points per gradient step; `None` is one full-batch step per epoch.
    pub batch_size: Option<usize>,
    /// Share of the sample held out for the reconstruction error.
    pub holdout_fraction: f64,
    pub seed: u64,
    pub encoder_scaling: EncoderScaling,
    pub reconstruction: Reconstruction,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            m: 5,
            sigma: 0.5,
            lambda: 1.0,
            eta: 0.001,
            decay_q: 0.9,
            decay_every: 100,
            max_epochs: 5000,
            patience: 50,
            min_delta: 1e-5,
            ema_factor: 0.9,
            batch_size: Some(1),
            holdout_fraction: 0.2,
            seed: 0,
            encoder_scaling: EncoderScaling::default(),
            reconstruction: Reconstruction::default(),
        }
    }
}

impl TrainConfig {
    /// Defaults for a dataset: `λ = 3` on SIM, `λ = 1` elsewhere.
    pub fn for_dataset(tag: DatasetTag) -> Self {
        let lambda = if tag == DatasetTag::Sim { 3.0 } else { 1.0 };
        TrainConfig {
            lambda,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 {
            return fail("m must be at least 1".into());
        }
        if !(self.sigma > 0.0) {
            return fail(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.eta > 0.0) {
            return fail(format!("eta must be positive, got {}", self.eta));
        }
        if !(self.decay_q > 0.0 && self.decay_q <= 1.0) {
            return fail(format!("decay q must lie in (0, 1], got {}", self.decay_q));
        }
        if !(self.lambda >= 0.0) {
            return fail(format!("lambda must be nonnegative, got {}", self.lambda));
        }
        if self.decay_every == 0 {
            return fail("decay interval must be at least 1 epoch".into());
        }
        if self.patience == 0 || self.max_epochs == 0 {
            return fail("patience and max_epochs must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.ema_factor) {
            return fail(format!("ema factor must lie in [0, 1), got {}", self.ema_factor));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return fail(format!(
                "holdout fraction must lie in [0, 1), got {}",
                self.holdout_fraction
            ));
        }
        if self.batch_size == Some(0) {
            return fail("batch size must be at least 1".into());
        }
        Ok(())
    }

    /// Step size of epoch `t` (zero-based).
    pub fn step_size(&self, epoch: usize) -> f64 {
        self.eta * self.decay_q.powi((epoch / self.decay_every) as i32)
    }

    fn cd_options(&self) -> CdOptions {
        CdOptions {
            scaling: self.encoder_scaling,
            reconstruction: self.reconstruction,
        }
    }
}

/// Losses recorded for one epoch, averaged over its gradient steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub cd: f64,
    /// Weighted regularizer `λ R`.
    pub reg: f64,
    pub total: f64,
    /// Step size applied during the epoch.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub params: RbmParams,
    pub loss_trace: Vec<EpochLoss>,
    pub epochs_run: usize,
    /// Mean squared reconstruction error on the held-out points.
    pub recon_error: f64,
    pub ranges: RangeBox,
}

/// Small Gaussian weights, zero biases.
pub fn init_params<R: Rng + ?Sized>(config: &TrainConfig, rng: &mut R) -> Result<RbmParams> {
    config.validate()?;
    let normal = Normal::new(0.0, INIT_WEIGHT_STD).expect("valid std");
    let weights = (0..config.m)
        .map(|_| [normal.sample(rng), normal.sample(rng)])
        .collect();
    RbmParams::new(weights, [0.0, 0.0], vec![0.0; config.m], config.sigma)
}

/// Mean squared distance between each point and the decoder mean of a
/// sampled hidden pattern, averaged over [`RECON_SAMPLES`] draws per point.
pub fn reconstruction_error<R: Rng + ?Sized>(
    params: &RbmParams,
    data: &[VisiblePoint],
    scaling: EncoderScaling,
    rng: &mut R,
) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for v in data {
        for _ in 0..RECON_SAMPLES {
            let h = params.sample_hidden(v, scaling, rng);
            let mean = params.decode_mean(&h);
            total += (v.x() - mean[0]).powi(2) + (v.y() - mean[1]).powi(2);
        }
    }
    total / (data.len() * RECON_SAMPLES) as f64
}

/// Trains on a normalized sample, drawing the initial parameters from `rng`.
pub fn train<R: Rng + ?Sized>(
    data: &[VisiblePoint],
    config: &TrainConfig,
    rng: &mut R,
) -> Result<TrainResult> {
    let init = init_params(config, rng)?;
    train_from(data, init, config, rng)
}

/// Like [`train`] but starting from the given parameters.
pub fn train_from<R: Rng + ?Sized>(
    data: &[VisiblePoint],
    init: RbmParams,
    config: &TrainConfig,
    rng: &mut R,
) -> Result<TrainResult> {
    config.validate()?;
    init.validate()?;
    if data.len() < 2 {
        return Err(Error::Degenerate(format!("need at least 2 points, got {}", data.len())));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite observation".into()));
    }
    for j in 0..2 {
        let first = data[0].0[j];
        if data.iter().all(|v| v.0[j] == first) {
            return Err(Error::Degenerate(format!("coordinate {j} has zero variance")));
        }
    }

    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(rng);
    let mut n_hold = (data.len() as f64 * config.holdout_fraction).floor() as usize;
    n_hold = n_hold.min(data.len().saturating_sub(2));
    let holdout: Vec<VisiblePoint> = order[..n_hold].iter().map(|&i| data[i]).collect();
    let fit: Vec<VisiblePoint> = order[n_hold..].iter().map(|&i| data[i]).collect();
    let ranges = RangeBox::from_points(&fit)?;

    let mut trainer = Trainer::new(init, fit, ranges, config.clone())?;
    trainer.run(rng)?;
    let Trainer {
        params, trace, fit, ..
    } = trainer;
    let eval = if holdout.is_empty() { &fit } else { &holdout };
    let recon_error = reconstruction_error(&params, eval, config.encoder_scaling, rng);
    Ok(TrainResult {
        params,
        epochs_run: trace.len(),
        loss_trace: trace,
        recon_error,
        ranges,
    })
}

/// Optimizer state for one training run.
///
/// [`train`] builds one of these after splitting and validating the data; it
/// is public so the loop can be driven on hand-built inputs.
#[derive(Clone, Debug)]
pub struct Trainer {
    pub params: RbmParams,
    pub fit: Vec<VisiblePoint>,
    pub ranges: RangeBox,
    pub config: TrainConfig,
    pub trace: Vec<EpochLoss>,
    smoothed: Option<f64>,
    best: f64,
    stale: usize,
}

impl Trainer {
    pub fn new(
        params: RbmParams,
        fit: Vec<VisiblePoint>,
        ranges: RangeBox,
        config: TrainConfig,
    ) -> Result<Self> {
        config.validate()?;
        if fit.is_empty() {
            return Err(Error::EmptyBatch);
        }
        Ok(Trainer {
            params,
            fit,
            ranges,
            config,
            trace: Vec::new(),
            smoothed: None,
            best: f64::INFINITY,
            stale: 0,
        })
    }

    /// Runs epochs until the budget is spent or the loss stops improving.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        while self.trace.len() < self.config.max_epochs {
            self.epoch(rng)?;
            if self.should_stop() {
                break;
            }
        }
        Ok(())
    }

    pub fn should_stop(&self) -> bool {
        self.stale >= self.config.patience
    }

    /// One pass over the fitting data.
    pub fn epoch<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<EpochLoss> {
        let t = self.trace.len();
        let step = self.config.step_size(t);
        let opts = self.config.cd_options();
        let lambda = self.config.lambda;

        let batch_size = self.config.batch_size.unwrap_or(self.fit.len()).min(self.fit.len());
        if batch_size < self.fit.len() {
            self.fit.shuffle(rng);
        }
        let (mut cd_sum, mut reg_sum, mut steps) = (0.0, 0.0, 0usize);
        for start in (0..self.fit.len()).step_by(batch_size) {
            let batch = &self.fit[start..(start + batch_size).min(self.fit.len())];
            let (cd, mut grad) = cd_step(&self.params, batch, opts, rng)?;
            let reg = if lambda > 0.0 {
                let (r, rg) = reg_value_and_grad(&self.params, &self.ranges)?;
                grad.add_scaled(&rg, lambda);
                lambda * r
            } else {
                0.0
            };
            self.apply(&grad, step)?;
            cd_sum += cd;
            reg_sum += reg;
            steps += 1;
        }
        let cd = cd_sum / steps as f64;
        let reg = reg_sum / steps as f64;
        let loss = EpochLoss {
            cd,
            reg,
            total: cd + reg,
            step,
        };
        self.trace.push(loss);
        self.track(loss.total);
        Ok(loss)
    }

    fn apply(&mut self, grad: &Gradient, step: f64) -> Result<()> {
        self.params.add_scaled(grad, -step);
        if self.params.validate().is_err() {
            return Err(Error::Degenerate(format!(
                "parameters diverged at epoch {}",
                self.trace.len()
            )));
        }
        Ok(())
    }

    fn track(&mut self, total: f64) {
        let ema = match self.smoothed {
            None => total,
            Some(prev) => self.config.ema_factor * prev + (1.0 - self.config.ema_factor) * total,
        };
        self.smoothed = Some(ema);
        if ema < self.best - self.config.min_delta {
            self.best = ema;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
    }
}

/// A trained model together with its decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairFit {
    pub result: TrainResult,
    pub decision: Decision,
}

/// Z-scores both series, trains with `config.seed`, and evaluates `γ`.
pub fn train_pair(x: &[f64], y: &[f64], config: &TrainConfig) -> Result<PairFit> {
    train_pair_oriented(x, y, config, false)
}

/// [`train_pair`], optionally on the mirrored problem.
///
/// With `swap` set, the columns are exchanged and the initial weights drawn
/// from the seed have their columns exchanged too, so the run is the exact
/// mirror image of the unswapped run and its `γ` has the opposite sign.
pub fn train_pair_oriented(x: &[f64], y: &[f64], config: &TrainConfig, swap: bool) -> Result<PairFit> {
    if x.len() != y.len() {
        return Err(Error::Degenerate(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (zx, zy) = (zscore(x)?, zscore(y)?);
    let (a, b) = if swap { (&zy, &zx) } else { (&zx, &zy) };
    let data: Vec<VisiblePoint> = a.iter().zip(b).map(|(&u, &v)| VisiblePoint::new(u, v)).collect();
    let mut rng = seed::rng(config.seed);
    let mut init = init_params(config, &mut rng)?;
    if swap {
        init = init.swap_coordinates();
    }
    let result = train_from(&data, init, config, &mut rng)?;
    let decision = gamma(&result.params, &result.ranges)?;
    Ok(PairFit { result, decision })
}
