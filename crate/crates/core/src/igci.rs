//! Information-geometric baselines with a uniform reference measure.
//!
//! Both series are first mapped affinely onto `[0, 1]`. The slope estimator
//! averages `log |Δy / Δx|` along the sample sorted by `x` (and vice versa);
//! the entropy estimator compares m-spacing entropy estimates of the two
//! marginals. In both cases the score is `c_xy - c_yx` and a negative score
//! favors `X → Y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IgciScore {
    pub c_xy: f64,
    pub c_yx: f64,
    pub score: f64,
    pub direction: Direction,
    /// Set when too few usable segments remained to estimate a slope.
    pub degenerate: bool,
}

impl IgciScore {
    fn new(c_xy: f64, c_yx: f64) -> Self {
        let score = c_xy - c_yx;
        IgciScore {
            c_xy,
            c_yx,
            score,
            direction: Direction::from_score(score),
            degenerate: false,
        }
    }

    fn undecided() -> Self {
        IgciScore {
            c_xy: 0.0,
            c_yx: 0.0,
            score: 0.0,
            direction: Direction::Undecided,
            degenerate: true,
        }
    }
}

/// Affine map onto `[0, 1]`.
pub fn unit_rescale(series: &[f64]) -> Result<Vec<f64>> {
    let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Degenerate("series is constant or non-finite".into()));
    }
    Ok(series.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

fn check_lengths(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Degenerate(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::Degenerate(format!("need at least {min} points, got {}", x.len())));
    }
    Ok(())
}

/// Mean of `log|Δb| - log|Δa|` over consecutive points sorted by `a`.
///
/// Segments with a zero difference in either series are skipped. Returns the
/// mean and the number of segments used.
fn mean_log_slope(a: &[f64], b: &[f64]) -> (f64, usize) {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])));
    let mut sum = 0.0;
    let mut used = 0usize;
    for w in idx.windows(2) {
        let da = (a[w[1]] - a[w[0]]).abs();
        let db = (b[w[1]] - b[w[0]]).abs();
        if da > 0.0 && db > 0.0 {
            sum += db.ln() - da.ln();
            used += 1;
        }
    }
    if used == 0 {
        (0.0, 0)
    } else {
        (sum / used as f64, used)
    }
}

/// Slope-based estimator.
///
/// Constant input or fewer than two usable segments yields an undecided
/// score with [`IgciScore::degenerate`] set.
pub fn igci_slope(x: &[f64], y: &[f64]) -> Result<IgciScore> {
    check_lengths(x, y, 3)?;
    let (Ok(x), Ok(y)) = (unit_rescale(x), unit_rescale(y)) else {
        return Ok(IgciScore::undecided());
    };
    let (c_xy, n_xy) = mean_log_slope(&x, &y);
    let (c_yx, n_yx) = mean_log_slope(&y, &x);
    if n_xy < 2 || n_yx < 2 {
        return Ok(IgciScore::undecided());
    }
    Ok(IgciScore::new(c_xy, c_yx))
}

/// Spacing parameter `round(√T)`.
pub fn default_spacing(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(1)
}

/// m-spacing (Vasicek) differential entropy estimate
/// `(1/T) Σ_i log(T / (2m) · (s_(i+m) - s_(i-m)))` with order statistics
/// clamped at the sample ends. Zero spacings are skipped.
pub fn vasicek_entropy(sample: &[f64], m: usize) -> Result<f64> {
    let n = sample.len();
    if n < 2 || m == 0 || m >= n {
        return Err(Error::Degenerate(format!("spacing {m} invalid for {n} points")));
    }
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let scale = n as f64 / (2.0 * m as f64);
    let mut sum = 0.0;
    let mut used = 0usize;
    for i in 0..n {
        let hi = s[(i + m).min(n - 1)];
        let lo = s[i.saturating_sub(m)];
        let gap = hi - lo;
        if gap > 0.0 {
            sum += (scale * gap).ln();
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("all spacings are zero".into()));
    }
    Ok(sum / used as f64)
}

/// Entropy-based estimator: `c_xy = Ĥ(Y) - Ĥ(X)`, `c_yx = -c_xy`.
pub fn igci_entropy(x: &[f64], y: &[f64]) -> Result<IgciScore> {
    check_lengths(x, y, 8)?;
    let x = unit_rescale(x)?;
    let y = unit_rescale(y)?;
    let m = default_spacing(x.len());
    let hx = vasicek_entropy(&x, m)?;
    let hy = vasicek_entropy(&y, m)?;
    Ok(IgciScore::new(hy - hx, hx - hy))
}
