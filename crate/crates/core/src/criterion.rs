//! The mode-placement criterion and the estimation-capacity diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rbm::RbmParams;
use crate::regularizer::{center_set, non_uniformity, Coord, RangeBox};
use crate::Direction;

/// Outcome of comparing the mode geometry along `X` and `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub direction: Direction,
    /// `d_x - d_y`; negative favors `X → Y`.
    pub gamma: f64,
    pub d_x: f64,
    pub d_y: f64,
}

/// Computes `γ = d(X*) - d(Y*)` and the implied direction.
///
/// Boundary hinges are not part of `γ`.
pub fn gamma(params: &RbmParams, ranges: &RangeBox) -> Result<Decision> {
    let d = |coord: Coord| -> Result<f64> {
        let (lo, hi) = ranges.interval(coord);
        Ok(non_uniformity(&center_set(params, coord)?, lo, hi))
    };
    let (d_x, d_y) = (d(Coord::X)?, d(Coord::Y)?);
    let gamma = d_x - d_y;
    Ok(Decision {
        direction: Direction::from_score(gamma),
        gamma,
        d_x,
        d_y,
    })
}

/// Quadrature grid for [`estimation_capacity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of trapezoid nodes.
    pub nodes: usize,
    /// Padding beyond the range and the outermost centers, in units of σ.
    pub pad_sigmas: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nodes: 4001,
            pad_sigmas: 6.0,
        }
    }
}

/// Area under the ridgeline `max_h N(u | u*(h), σ²)` along one coordinate.
///
/// The grid spans `[min(k, u_min) - pad·σ, max(l, u_max) + pad·σ]`.
pub fn estimation_capacity(
    params: &RbmParams,
    coord: Coord,
    ranges: &RangeBox,
    grid: GridSpec,
) -> Result<f64> {
    let cs = center_set(params, coord)?;
    let (lo, hi) = ranges.interval(coord);
    capacity_of_centers(cs.centers(), params.sigma, lo, hi, grid)
}

/// Ridgeline area for explicit center locations of common width `sigma`.
pub fn capacity_of_centers(centers: &[f64], sigma: f64, lo: f64, hi: f64, grid: GridSpec) -> Result<f64> {
    if grid.nodes < 1000 {
        return Err(Error::InvalidConfig(format!(
            "capacity grid needs at least 1000 nodes, got {}",
            grid.nodes
        )));
    }
    if centers.is_empty() || !(sigma > 0.0) {
        return Err(Error::InvalidParams("capacity needs centers and sigma > 0".into()));
    }
    let cmin = centers.iter().copied().fold(f64::INFINITY, f64::min);
    let cmax = centers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let start = lo.min(cmin) - grid.pad_sigmas * sigma;
    let end = hi.max(cmax) + grid.pad_sigmas * sigma;
    let step = (end - start) / (grid.nodes - 1) as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());

    let mut sorted = centers.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite centers"));
    let ridge = |u: f64| {
        // Nearest center gives the largest density.
        let pos = sorted.partition_point(|&c| c < u);
        let mut best = f64::INFINITY;
        if pos < sorted.len() {
            best = best.min((sorted[pos] - u).abs());
        }
        if pos > 0 {
            best = best.min((u - sorted[pos - 1]).abs());
        }
        norm * (-0.5 * (best / sigma).powi(2)).exp()
    };
    let mut area = 0.0;
    for n in 0..grid.nodes {
        let w = if n == 0 || n == grid.nodes - 1 { 0.5 } else { 1.0 };
        area += w * ridge(start + n as f64 * step);
    }
    Ok(area * step)
}

/// True iff the first model's capacity along `coord` is at least the second's.
pub fn capacity_monotonicity_check(
    params_uniform: &RbmParams,
    params_clustered: &RbmParams,
    coord: Coord,
    ranges: &RangeBox,
    grid: GridSpec,
) -> Result<bool> {
    if params_uniform.m() != params_clustered.m() || params_uniform.sigma != params_clustered.sigma {
        return Err(Error::InvalidParams(
            "capacity comparison needs equal m and sigma".into(),
        ));
    }
    let a = estimation_capacity(params_uniform, coord, ranges, grid)?;
    let b = estimation_capacity(params_clustered, coord, ranges, grid)?;
    Ok(a >= b)
}
