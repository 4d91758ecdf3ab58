//! Settings from flags, an optional `key = value` file, and built-in defaults.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use crbm::data::DatasetTag;
use crbm::rbm::{EncoderScaling, Reconstruction};
use crbm::trainer::TrainConfig;

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "m",
    "sigma",
    "lambda",
    "eta",
    "q",
    "decay_every",
    "epochs",
    "patience",
    "min_delta",
    "batch_size",
    "encoder_scaling",
    "reconstruction",
    "seed",
    "rounds",
    "base_seed",
    "method",
    "dataset",
];

/// Batch size as given by the user: a count or `full`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchSize(pub Option<usize>);

impl FromStr for BatchSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(BatchSize(None));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive count or `full`, got `{s}`")),
            Ok(n) => Ok(BatchSize(Some(n))),
        }
    }
}

/// Every setting that may come from a flag or a config file.
#[derive(Args, Clone, Debug, Default, PartialEq)]
pub struct Settings {
    /// Read settings from a `key = value` file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    /// Hidden units.
    #[arg(long)]
    pub m: Option<usize>,
    /// Decoder standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Regularizer weight (defaults to 3 on SIM, 1 elsewhere).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Initial step size.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Step-size decay factor.
    #[arg(long)]
    pub q: Option<f64>,
    /// Epochs between two decay steps.
    #[arg(long)]
    pub decay_every: Option<usize>,
    /// Maximum number of epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub min_delta: Option<f64>,
    /// Points per gradient step, or `full`.
    #[arg(long)]
    pub batch_size: Option<BatchSize>,
    /// `variance_scaled` or `unscaled`.
    #[arg(long)]
    pub encoder_scaling: Option<String>,
    /// `mean_field` or `sampled`.
    #[arg(long)]
    pub reconstruction: Option<String>,
    /// Training seed for a single run.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Seed from which every (pair, round) stream is derived.
    #[arg(long)]
    pub base_seed: Option<u64>,
    /// `crbm`, `igci1` or `igci2`.
    #[arg(long)]
    pub method: Option<String>,
    /// `CEP`, `SIM`, `SIM-C` or `SIM-LIN`.
    #[arg(long)]
    pub dataset: Option<String>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

impl Settings {
    /// Parses a config file. Blank lines and lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got `{line}`", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}", lineno + 1);
            match key {
                "m" => s.m = Some(parse(key, value).with_context(ctx)?),
                "sigma" => s.sigma = Some(parse(key, value).with_context(ctx)?),
                "lambda" => s.lambda = Some(parse(key, value).with_context(ctx)?),
                "eta" => s.eta = Some(parse(key, value).with_context(ctx)?),
                "q" => s.q = Some(parse(key, value).with_context(ctx)?),
                "decay_every" => s.decay_every = Some(parse(key, value).with_context(ctx)?),
                "epochs" => s.epochs = Some(parse(key, value).with_context(ctx)?),
                "patience" => s.patience = Some(parse(key, value).with_context(ctx)?),
                "min_delta" => s.min_delta = Some(parse(key, value).with_context(ctx)?),
                "batch_size" => s.batch_size = Some(parse(key, value).with_context(ctx)?),
                "encoder_scaling" => s.encoder_scaling = Some(value.to_string()),
                "reconstruction" => s.reconstruction = Some(value.to_string()),
                "seed" => s.seed = Some(parse(key, value).with_context(ctx)?),
                "rounds" => s.rounds = Some(parse(key, value).with_context(ctx)?),
                "base_seed" => s.base_seed = Some(parse(key, value).with_context(ctx)?),
                "method" => s.method = Some(value.to_string()),
                "dataset" => s.dataset = Some(value.to_string()),
                other => bail!(
                    "line {}: unknown key `{other}` (known keys: {})",
                    lineno + 1,
                    KEYS.join(", ")
                ),
            }
        }
        Ok(s)
    }

    /// Flags, then the config file named by `--config`, then nothing.
    pub fn resolve(&self) -> Result<Settings> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let file = load(path)?;
        Ok(self.or(&file))
    }

    /// Field-wise `self` if set, otherwise `fallback`.
    pub fn or(&self, fallback: &Settings) -> Settings {
        Settings {
            config: self.config.clone(),
            m: self.m.or(fallback.m),
            sigma: self.sigma.or(fallback.sigma),
            lambda: self.lambda.or(fallback.lambda),
            eta: self.eta.or(fallback.eta),
            q: self.q.or(fallback.q),
            decay_every: self.decay_every.or(fallback.decay_every),
            epochs: self.epochs.or(fallback.epochs),
            patience: self.patience.or(fallback.patience),
            min_delta: self.min_delta.or(fallback.min_delta),
            batch_size: self.batch_size.or(fallback.batch_size),
            encoder_scaling: self.encoder_scaling.clone().or_else(|| fallback.encoder_scaling.clone()),
            reconstruction: self.reconstruction.clone().or_else(|| fallback.reconstruction.clone()),
            seed: self.seed.or(fallback.seed),
            rounds: self.rounds.or(fallback.rounds),
            base_seed: self.base_seed.or(fallback.base_seed),
            method: self.method.clone().or_else(|| fallback.method.clone()),
            dataset: self.dataset.clone().or_else(|| fallback.dataset.clone()),
        }
    }

    pub fn dataset_tag(&self, default: DatasetTag) -> Result<DatasetTag> {
        match &self.dataset {
            Some(name) => Ok(name.parse()?),
            None => Ok(default),
        }
    }

    /// Training configuration on top of the defaults for `tag`.
    pub fn train_config(&self, tag: DatasetTag) -> Result<TrainConfig> {
        let mut c = TrainConfig::for_dataset(tag);
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.sigma {
            c.sigma = v;
        }
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.eta {
            c.eta = v;
        }
        if let Some(v) = self.q {
            c.decay_q = v;
        }
        if let Some(v) = self.decay_every {
            c.decay_every = v;
        }
        if let Some(v) = self.epochs {
            c.max_epochs = v;
        }
        if let Some(v) = self.patience {
            c.patience = v;
        }
        if let Some(v) = self.min_delta {
            c.min_delta = v;
        }
        if let Some(BatchSize(v)) = self.batch_size {
            c.batch_size = v;
        }
        if let Some(v) = &self.encoder_scaling {
            c.encoder_scaling = v.parse::<EncoderScaling>()?;
        }
        if let Some(v) = &self.reconstruction {
            c.reconstruction = v.parse::<Reconstruction>()?;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn load(path: &Path) -> Result<Settings> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Settings::from_text(&text).with_context(|| format!("in {}", path.display()))
}
