use super::PairResult;
use crate::error::{Error, Result};
use crate::Direction;

/// `Σ weight · correct / Σ weight`.
pub fn weighted_accuracy(results: &[PairResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    if let Some(bad) = results.iter().find(|r| !(r.weight > 0.0)) {
        return Err(Error::pair(&bad.pair_id, format!("weight must be positive, got {}", bad.weight)));
    }
    let total: f64 = results.iter().map(|r| r.weight).sum();
    let hit: f64 = results.iter().map(|r| r.weight * r.correct).sum();
    Ok(hit / total)
}

/// Weighted ROC curve and its area for the task "truth is `X → Y`".
///
/// The score of a record is `-γ`, so more negative `γ` is stronger evidence
/// for `X → Y`. Thresholds sweep the distinct scores from high to low with
/// ties moving together. The curve starts at `(0, 0)` for the threshold
/// `+∞`, has one point per distinct score, and ends with the `-∞` endpoint
/// `(1, 1)`.
pub fn roc_auc(results: &[PairResult]) -> Result<(Vec<(f64, f64)>, f64)> {
    let scored: Vec<(f64, bool, f64)> = results
        .iter()
        .map(|r| (-r.gamma, r.truth == Direction::XtoY, r.weight))
        .collect();
    roc_from_scores(&scored)
}

/// ROC over `(score, is_positive, weight)` triples.
pub fn roc_from_scores(scored: &[(f64, bool, f64)]) -> Result<(Vec<(f64, f64)>, f64)> {
    if scored.iter().any(|s| !s.0.is_finite()) {
        return Err(Error::Degenerate("non-finite score".into()));
    }
    let pos: f64 = scored.iter().filter(|s| s.1).map(|s| s.2).sum();
    let neg: f64 = scored.iter().filter(|s| !s.1).map(|s| s.2).sum();
    if !(pos > 0.0 && neg > 0.0) {
        return Err(Error::SingleClass);
    }
    let mut sorted = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += sorted[i].2;
            } else {
                fp += sorted[i].2;
            }
            i += 1;
        }
        points.push((fp / neg, tp / pos));
    }
    points.push((1.0, 1.0));

    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok((points, auc))
}
