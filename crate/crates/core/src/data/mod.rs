//! Cause-effect pairs: synthetic generation, file loading, and preprocessing.

mod loader;
mod preprocess;
mod simlin;

pub use loader::{
    load_pairs, load_simulated, load_tuebingen, parse_meta, read_pair_file, write_pairs, Loaded,
    MetaRow, META_FILE,
};
pub use preprocess::{first_pc, zscore};
pub use simlin::{
    gen_simlin, sample_random_distribution, simlin_pair, GaussianMixture, SimLinDraw, SimLinSpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Direction;

/// Which benchmark collection a pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DatasetTag {
    #[serde(rename = "CEP")]
    Cep,
    #[serde(rename = "SIM")]
    Sim,
    #[serde(rename = "SIM-C")]
    SimC,
    #[serde(rename = "SIM-LIN")]
    SimLin,
}

impl DatasetTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetTag::Cep => "CEP",
            DatasetTag::Sim => "SIM",
            DatasetTag::SimC => "SIM-C",
            DatasetTag::SimLin => "SIM-LIN",
        }
    }
}

impl std::fmt::Display for DatasetTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DatasetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "CEP" | "TUEBINGEN" => Ok(DatasetTag::Cep),
            "SIM" => Ok(DatasetTag::Sim),
            "SIM-C" => Ok(DatasetTag::SimC),
            "SIM-LIN" => Ok(DatasetTag::SimLin),
            other => Err(Error::InvalidConfig(format!("unknown dataset `{other}`"))),
        }
    }
}

/// One bivariate sample with its annotated direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauseEffectPair {
    pub id: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `XtoY` or `YtoX`; never `Undecided`.
    pub truth: Direction,
    /// Benchmark weight; pairs from one experiment share a unit of weight.
    pub weight: f64,
    pub source: DatasetTag,
}

impl CauseEffectPair {
    pub fn new(
        id: impl Into<String>,
        x: Vec<f64>,
        y: Vec<f64>,
        truth: Direction,
        weight: f64,
        source: DatasetTag,
    ) -> Result<Self> {
        let id = id.into();
        if x.len() != y.len() {
            return Err(Error::pair(&id, format!("x has {} values, y has {}", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::pair(&id, "need at least 2 observations"));
        }
        if truth == Direction::Undecided {
            return Err(Error::pair(&id, "ground truth must be a direction"));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::pair(&id, format!("weight must be positive, got {weight}")));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::pair(&id, "non-finite observation"));
        }
        Ok(CauseEffectPair {
            id,
            x,
            y,
            truth,
            weight,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same pair with `x` and `y` exchanged and the truth reversed.
    pub fn swapped(&self) -> Self {
        CauseEffectPair {
            id: self.id.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            truth: self.truth.reversed(),
            weight: self.weight,
            source: self.source,
        }
    }
}
