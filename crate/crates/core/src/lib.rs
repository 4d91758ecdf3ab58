//! Causal direction discovery for two scalar variables with a mode-regularized
//! Gaussian-Bernoulli restricted Boltzmann machine.
//!
//! A small RBM is fit to the joint sample of `(x, y)`. Its decoder places one
//! Gaussian per hidden pattern, and a regularizer pushes those modes towards an
//! evenly spaced grid along *both* coordinates. A mechanism `X → Y` constrains
//! where the modes can sit along `Y`, so after training the modes are spread
//! more evenly along the cause. The sign of `γ = d(X*) - d(Y*)` reads the
//! direction off the trained model.
//!
//! ```
//! use crbm::data::{gen_simlin, SimLinSpec};
//! use crbm::trainer::{train_pair, TrainConfig};
//!
//! let pairs = gen_simlin(&SimLinSpec { n_pairs: 1, n_obs: 200, seed: 3 });
//! let config = TrainConfig { max_epochs: 50, ..TrainConfig::default() };
//! let fit = train_pair(&pairs[0].x, &pairs[0].y, &config).unwrap();
//! println!("gamma = {}", fit.decision.gamma);
//! ```
//!
//! The modules follow the pipeline: [`rbm`] holds the model and contrastive
//! divergence, [`regularizer`] the mode geometry, [`trainer`] the optimizer,
//! [`criterion`] the decision rule, [`igci`] the baselines, [`data`] dataset
//! generation and loading, and [`bench`] the evaluation harness.

pub mod bench;
pub mod criterion;
pub mod data;
mod error;
pub mod igci;
pub mod rbm;
pub mod regularizer;
pub mod seed;
pub mod trainer;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Inferred or true causal direction between the two coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    XtoY,
    YtoX,
    Undecided,
}

impl Direction {
    /// Sign convention shared by every scorer: negative means `X → Y`.
    pub fn from_score(score: f64) -> Direction {
        if score < 0.0 {
            Direction::XtoY
        } else if score > 0.0 {
            Direction::YtoX
        } else {
            Direction::Undecided
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::XtoY => Direction::YtoX,
            Direction::YtoX => Direction::XtoY,
            Direction::Undecided => Direction::Undecided,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::XtoY => "X->Y",
            Direction::YtoX => "Y->X",
            Direction::Undecided => "undecided",
        })
    }
}

// The guide's code listings are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/criterion.md")]
    mod criterion {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
}
