//! Multi-round evaluation over a dataset: weighted accuracy, ROC/AUC, and
//! result files.

mod metrics;
mod persist;

pub use metrics::{roc_auc, roc_from_scores, weighted_accuracy};
pub use persist::{load_results, persist_results, ResultsFile, RESULTS_FILE, ROC_FILE};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{CauseEffectPair, DatasetTag};
use crate::error::{Error, Result};
use crate::igci::{igci_entropy, igci_slope};
use crate::seed;
use crate::trainer::{train_pair, TrainConfig};
use crate::Direction;

/// Rounds used for the stochastic method unless told otherwise.
pub const DEFAULT_CRBM_ROUNDS: usize = 10;

/// Output of a scorer on one pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scored {
    /// Criterion value; negative favors `X → Y`.
    pub score: f64,
    pub epochs: Option<usize>,
}

/// Anything that turns a pair into a signed direction score.
pub trait Scorer: Sync {
    fn name(&self) -> String;

    /// Deterministic scorers are evaluated in a single round.
    fn deterministic(&self) -> bool;

    fn score(&self, pair: &CauseEffectPair, seed: u64) -> Result<Scored>;
}

/// The built-in methods.
#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Crbm(TrainConfig),
    Igci1,
    Igci2,
}

impl Method {
    /// Parses `crbm`, `igci1`, or `igci2`; `config` is used for `crbm`.
    pub fn parse(name: &str, config: TrainConfig) -> Result<Method> {
        match name.to_ascii_lowercase().replace('-', "").as_str() {
            "crbm" => Ok(Method::Crbm(config)),
            "igci1" | "igcislope" => Ok(Method::Igci1),
            "igci2" | "igcientropy" => Ok(Method::Igci2),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

impl Scorer for Method {
    fn name(&self) -> String {
        match self {
            Method::Crbm(_) => "crbm",
            Method::Igci1 => "igci1",
            Method::Igci2 => "igci2",
        }
        .to_string()
    }

    fn deterministic(&self) -> bool {
        !matches!(self, Method::Crbm(_))
    }

    fn score(&self, pair: &CauseEffectPair, seed: u64) -> Result<Scored> {
        match self {
            Method::Crbm(config) => {
                let config = TrainConfig {
                    seed,
                    ..config.clone()
                };
                let fit = train_pair(&pair.x, &pair.y, &config)?;
                Ok(Scored {
                    score: fit.decision.gamma,
                    epochs: Some(fit.result.epochs_run),
                })
            }
            Method::Igci1 => Ok(Scored {
                score: igci_slope(&pair.x, &pair.y)?.score,
                epochs: None,
            }),
            Method::Igci2 => Ok(Scored {
                score: igci_entropy(&pair.x, &pair.y)?.score,
                epochs: None,
            }),
        }
    }
}

/// Outcome for one pair in one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub pair_id: String,
    pub round: usize,
    pub method: String,
    /// Criterion value (`γ` for the RBM, `c_xy - c_yx` for the baselines).
    pub gamma: f64,
    pub decision: Direction,
    pub truth: Direction,
    pub weight: f64,
    /// 1 if right, 0.5 if undecided, 0 if wrong.
    pub correct: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl PairResult {
    pub fn new(
        pair_id: impl Into<String>,
        round: usize,
        method: impl Into<String>,
        gamma: f64,
        decision: Direction,
        truth: Direction,
        weight: f64,
    ) -> Self {
        PairResult {
            pair_id: pair_id.into(),
            round,
            method: method.into(),
            gamma,
            decision,
            truth,
            weight,
            correct: score_decision(decision, truth),
            epochs: None,
            diagnostic: None,
        }
    }

    /// The record for the mirrored pair: truth and decision flip, `γ` negates.
    pub fn mirrored(&self) -> Self {
        PairResult {
            gamma: -self.gamma,
            decision: self.decision.reversed(),
            truth: self.truth.reversed(),
            ..self.clone()
        }
    }
}

/// 1 for a match, 0.5 for an abstention, 0 otherwise.
pub fn score_decision(decision: Direction, truth: Direction) -> f64 {
    if decision == Direction::Undecided {
        0.5
    } else if decision == truth {
        1.0
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub method: String,
    pub dataset: String,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub n_rounds: usize,
    pub n_pairs: usize,
    pub round_accuracy: Vec<f64>,
    pub round_auc: Vec<f64>,
    /// Pairs whose scorer failed and were counted as undecided.
    pub failures: usize,
    /// True when the ROC used mirrored copies because the data has one truth class.
    pub roc_mirrored: bool,
}

impl BenchSummary {
    /// `<dataset> <method> acc=<mean>±<std> auc=<mean>`
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} acc={:.3}±{:.3} auc={:.3}",
            self.dataset, self.method, self.accuracy_mean, self.accuracy_std, self.auc_mean
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub summary: BenchSummary,
    /// Sorted by pair id, then round.
    pub records: Vec<PairResult>,
    /// ROC over all rounds pooled.
    pub roc: Vec<(f64, f64)>,
}

/// Stream seed for one (pair, round) task.
pub fn task_seed(base_seed: u64, pair_id: &str, round: usize) -> u64 {
    seed::derive(base_seed, &[seed::hash_str(pair_id), round as u64])
}

/// Records usable for ROC analysis.
///
/// When every pair has the same truth the ROC is undefined, so each record is
/// joined by its mirror image (the same pair with columns swapped, which an
/// antisymmetric criterion scores as `-γ`).
fn roc_records(records: &[PairResult]) -> (Vec<PairResult>, bool) {
    let has = |d: Direction| records.iter().any(|r| r.truth == d);
    if has(Direction::XtoY) && has(Direction::YtoX) {
        (records.to_vec(), false)
    } else {
        let mut all = records.to_vec();
        all.extend(records.iter().map(PairResult::mirrored));
        (all, true)
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Scores every pair in every round and aggregates per round.
///
/// Deterministic scorers always run a single round. Scorer failures are
/// recorded as undecided with a diagnostic and do not stop the run.
pub fn run_benchmark<S: Scorer + ?Sized>(
    pairs: &[CauseEffectPair],
    scorer: &S,
    dataset: DatasetTag,
    n_rounds: usize,
    base_seed: u64,
) -> Result<BenchReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyResults);
    }
    if n_rounds == 0 {
        return Err(Error::InvalidConfig("need at least one round".into()));
    }
    let n_rounds = if scorer.deterministic() { 1 } else { n_rounds };
    let method = scorer.name();

    let tasks: Vec<(usize, usize)> = (0..n_rounds)
        .flat_map(|r| (0..pairs.len()).map(move |p| (p, r)))
        .collect();
    let mut records: Vec<PairResult> = tasks
        .into_par_iter()
        .map(|(p, round)| {
            let pair = &pairs[p];
            let seed = task_seed(base_seed, &pair.id, round);
            match scorer.score(pair, seed) {
                Ok(s) if s.score.is_finite() => {
                    let mut rec = PairResult::new(
                        &pair.id,
                        round,
                        &method,
                        s.score,
                        Direction::from_score(s.score),
                        pair.truth,
                        pair.weight,
                    );
                    rec.epochs = s.epochs;
                    rec
                }
                outcome => {
                    let why = match outcome {
                        Err(e) => e.to_string(),
                        Ok(s) => format!("non-finite score {}", s.score),
                    };
                    log::warn!("{} round {round}: {why}", pair.id);
                    let mut rec = PairResult::new(
                        &pair.id,
                        round,
                        &method,
                        0.0,
                        Direction::Undecided,
                        pair.truth,
                        pair.weight,
                    );
                    rec.diagnostic = Some(why);
                    rec
                }
            }
        })
        .collect();
    records.sort_by(|a, b| a.pair_id.cmp(&b.pair_id).then(a.round.cmp(&b.round)));

    let mut round_accuracy = Vec::with_capacity(n_rounds);
    let mut round_auc = Vec::with_capacity(n_rounds);
    let mut mirrored = false;
    for round in 0..n_rounds {
        let this: Vec<PairResult> = records.iter().filter(|r| r.round == round).cloned().collect();
        round_accuracy.push(weighted_accuracy(&this)?);
        let (roc_set, m) = roc_records(&this);
        mirrored |= m;
        round_auc.push(roc_auc(&roc_set)?.1);
    }
    let (roc_set, _) = roc_records(&records);
    let roc = roc_auc(&roc_set)?.0;

    let (accuracy_mean, accuracy_std) = mean_std(&round_accuracy);
    let (auc_mean, auc_std) = mean_std(&round_auc);
    let summary = BenchSummary {
        method,
        dataset: dataset.to_string(),
        accuracy_mean,
        accuracy_std,
        auc_mean,
        auc_std,
        n_rounds,
        n_pairs: pairs.len(),
        round_accuracy,
        round_auc,
        failures: records.iter().filter(|r| r.diagnostic.is_some()).count(),
        roc_mirrored: mirrored,
    };
    Ok(BenchReport {
        summary,
        records,
        roc,
    })
}
