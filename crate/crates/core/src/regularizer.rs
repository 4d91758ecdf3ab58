//! Geometry of the decoder modes along each visible coordinate.
//!
//! Every hidden pattern `h` places a Gaussian at `b + Wᵀh`. Projecting those
//! `2^m` modes onto one coordinate gives a [`CenterSet`]. The non-uniformity
//! `d` measures how far the sorted centers are from an evenly spaced grid with
//! step `δ = (l - k) / 2^m` over the data range `[k, l]`:
//!
//! ```text
//! d = Σ_{τ=2}^{2^m} (u(τ) - u(τ-1) - δ)²
//! ```
//!
//! The regularizer sums `d` over both coordinates plus hinge penalties that
//! keep the outermost centers inside the range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rbm::{Gradient, RbmParams, VisiblePoint, VISIBLE};

/// Largest hidden layer for which center sets are enumerated.
pub const MAX_CENTER_HIDDEN: usize = 20;

/// A visible coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coord {
    X,
    Y,
}

impl Coord {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Coord::X => 0,
            Coord::Y => 1,
        }
    }

    pub fn other(self) -> Coord {
        match self {
            Coord::X => Coord::Y,
            Coord::Y => Coord::X,
        }
    }
}

/// Mode locations along one coordinate, one per hidden pattern.
///
/// `centers[idx]` belongs to the pattern whose binary value is `idx`.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterSet {
    centers: Vec<f64>,
    order: Vec<usize>,
}

impl CenterSet {
    /// Builds a center set from raw locations; ties sort by position.
    pub fn from_centers(centers: Vec<f64>) -> Result<Self> {
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("non-finite center".into()));
        }
        let mut order: Vec<usize> = (0..centers.len()).collect();
        order.sort_by(|&a, &b| {
            centers[a]
                .partial_cmp(&centers[b])
                .expect("finite centers")
                .then(a.cmp(&b))
        });
        Ok(CenterSet { centers, order })
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Permutation that sorts the centers in ascending order.
    pub fn sort_index(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted(&self) -> impl Iterator<Item = f64> + '_ {
        self.order.iter().map(|&i| self.centers[i])
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.centers[self.order[0]]
    }

    pub fn max(&self) -> f64 {
        self.centers[*self.order.last().expect("non-empty center set")]
    }
}

/// Per-coordinate data range `[k_j, l_j]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeBox {
    pub lower: [f64; VISIBLE],
    pub upper: [f64; VISIBLE],
}

impl RangeBox {
    pub fn new(lower: [f64; VISIBLE], upper: [f64; VISIBLE]) -> Result<Self> {
        for j in 0..VISIBLE {
            if !(upper[j] > lower[j]) || !lower[j].is_finite() || !upper[j].is_finite() {
                return Err(Error::Degenerate(format!(
                    "empty range [{}, {}] in coordinate {j}",
                    lower[j], upper[j]
                )));
            }
        }
        Ok(RangeBox { lower, upper })
    }

    /// Min and max of the sample along each coordinate.
    pub fn from_points(points: &[VisiblePoint]) -> Result<Self> {
        let mut lower = [f64::INFINITY; VISIBLE];
        let mut upper = [f64::NEG_INFINITY; VISIBLE];
        for v in points {
            for j in 0..VISIBLE {
                lower[j] = lower[j].min(v.0[j]);
                upper[j] = upper[j].max(v.0[j]);
            }
        }
        Self::new(lower, upper)
    }

    pub fn interval(&self, coord: Coord) -> (f64, f64) {
        let j = coord.index();
        (self.lower[j], self.upper[j])
    }

    pub fn swapped(&self) -> Self {
        RangeBox {
            lower: [self.lower[1], self.lower[0]],
            upper: [self.upper[1], self.upper[0]],
        }
    }
}

/// Enumerates `{b_j + (Wᵀh)_j : h ∈ {0,1}^m}`.
pub fn center_set(params: &RbmParams, coord: Coord) -> Result<CenterSet> {
    let m = params.m();
    if m > MAX_CENTER_HIDDEN {
        return Err(Error::TooManyHidden {
            what: "center set",
            m,
            limit: MAX_CENTER_HIDDEN,
        });
    }
    let j = coord.index();
    // Gray-code style doubling: centers for the first i units, then add unit i.
    let mut centers = Vec::with_capacity(1 << m);
    centers.push(params.vis_bias[j]);
    for w in &params.weights {
        let len = centers.len();
        for idx in 0..len {
            let c = centers[idx] + w[j];
            centers.push(c);
        }
    }
    CenterSet::from_centers(centers)
}

/// Uniform spacing `δ = (l - k) / n` for `n` centers.
#[inline]
pub fn uniform_spacing(n: usize, lo: f64, hi: f64) -> f64 {
    (hi - lo) / n as f64
}

/// Non-uniformity `d` of a center set relative to `[lo, hi]`.
pub fn non_uniformity(cs: &CenterSet, lo: f64, hi: f64) -> f64 {
    let delta = uniform_spacing(cs.len(), lo, hi);
    let sorted: Vec<f64> = cs.sorted().collect();
    sorted
        .windows(2)
        .map(|w| (w[1] - w[0] - delta).powi(2))
        .sum()
}

/// Squared hinge on the outermost centers leaving `[lo, hi]`.
pub fn boundary_penalty(cs: &CenterSet, lo: f64, hi: f64) -> f64 {
    (lo - cs.min()).max(0.0).powi(2) + (cs.max() - hi).max(0.0).powi(2)
}

/// `R = d(X*) + d(Y*)` plus boundary hinges on both coordinates.
pub fn reg_term(params: &RbmParams, ranges: &RangeBox) -> Result<f64> {
    let part = |coord: Coord| -> Result<f64> {
        let cs = center_set(params, coord)?;
        let (lo, hi) = ranges.interval(coord);
        Ok(non_uniformity(&cs, lo, hi) + boundary_penalty(&cs, lo, hi))
    };
    Ok(part(Coord::X)? + part(Coord::Y)?)
}

/// Gradient of [`reg_term`] with respect to `W` and `b`, sort order frozen.
pub fn reg_grad(params: &RbmParams, ranges: &RangeBox) -> Result<Gradient> {
    reg_value_and_grad(params, ranges).map(|(_, g)| g)
}

/// [`reg_term`] and [`reg_grad`] in one pass over the centers.
pub fn reg_value_and_grad(params: &RbmParams, ranges: &RangeBox) -> Result<(f64, Gradient)> {
    let m = params.m();
    let mut grad = Gradient::zeros(m);
    let mut per_coord = [0.0; VISIBLE];
    for coord in [Coord::X, Coord::Y] {
        let j = coord.index();
        let value = &mut per_coord[j];
        let cs = center_set(params, coord)?;
        let (lo, hi) = ranges.interval(coord);
        let delta = uniform_spacing(cs.len(), lo, hi);
        let order = cs.sort_index();
        let centers = cs.centers();

        // dR/du for every center.
        let mut du = vec![0.0; centers.len()];
        for pair in order.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            let gap = centers[next] - centers[prev] - delta;
            *value += gap * gap;
            du[next] += 2.0 * gap;
            du[prev] -= 2.0 * gap;
        }
        let (first, last) = (order[0], order[order.len() - 1]);
        let below = (lo - centers[first]).max(0.0);
        let above = (centers[last] - hi).max(0.0);
        *value += below * below + above * above;
        du[first] -= 2.0 * below;
        du[last] += 2.0 * above;

        // Each center is b_j + Σ_i h_i W_ij.
        grad.vis_bias[j] = du.iter().sum();
        for (idx, &g) in du.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            for (i, row) in grad.weights.iter_mut().enumerate() {
                if (idx >> i) & 1 == 1 {
                    row[j] += g;
                }
            }
        }
    }
    // Summing the two coordinates last keeps the value exactly symmetric
    // under a coordinate swap.
    Ok((per_coord[0] + per_coord[1], grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_params(delta: [f64; 2], offset: [f64; 2]) -> RbmParams {
        // Unit i shifts by 2^i δ, so the 2^m centers form the grid offset + kδ.
        let m = 3;
        RbmParams::new(
            (0..m)
                .map(|i| [delta[0] * (1 << i) as f64, delta[1] * (1 << i) as f64])
                .collect(),
            offset,
            vec![0.0; m],
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn single_unit_centers() {
        let p = RbmParams::new(vec![[0.7, 0.0]], [0.0, 0.0], vec![0.0], 1.0).unwrap();
        let cs = center_set(&p, Coord::X).unwrap();
        assert_eq!(cs.centers(), &[0.0, 0.7]);
    }

    #[test]
    fn two_unit_centers_sorted() {
        let p = RbmParams::new(vec![[1.0, 0.0], [2.0, 0.0]], [0.0, 0.0], vec![0.0; 2], 1.0).unwrap();
        let cs = center_set(&p, Coord::X).unwrap();
        assert_eq!(cs.sorted().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn cardinality_is_two_to_the_m() {
        let p = RbmParams::zeros(5, 0.5).unwrap();
        let cs = center_set(&p, Coord::Y).unwrap();
        assert_eq!(cs.len(), 32);
        let mut seen = cs.sort_index().to_vec();
        seen.sort_unstable();
        assert_eq!(seen, (0..32).collect::<Vec<_>>());
    }

    #[test]
    fn ties_break_by_pattern_value() {
        let p = RbmParams::zeros(3, 0.5).unwrap();
        let cs = center_set(&p, Coord::X).unwrap();
        assert_eq!(cs.sort_index(), &[0, 1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn refuses_huge_hidden_layers() {
        let p = RbmParams::zeros(21, 0.5).unwrap();
        assert!(center_set(&p, Coord::X).is_err());
    }

    #[test]
    fn uniform_grid_has_zero_non_uniformity() {
        let cs = CenterSet::from_centers(vec![0.0, 0.25, 0.5, 0.75]).unwrap();
        assert_eq!(non_uniformity(&cs, 0.0, 1.0), 0.0);
    }

    #[test]
    fn hand_evaluated_non_uniformity() {
        let cs = CenterSet::from_centers(vec![0.0, 1.0]).unwrap();
        assert!((non_uniformity(&cs, 0.0, 1.0) - 0.25).abs() < 1e-15);

        let cs = CenterSet::from_centers(vec![0.3; 4]).unwrap();
        let delta: f64 = 2.0 / 4.0;
        assert!((non_uniformity(&cs, -1.0, 1.0) - 3.0 * delta * delta).abs() < 1e-15);
    }

    #[test]
    fn boundary_penalty_cases() {
        let inside = CenterSet::from_centers(vec![0.1, 0.5, 0.9]).unwrap();
        assert_eq!(boundary_penalty(&inside, 0.0, 1.0), 0.0);
        let low = CenterSet::from_centers(vec![-0.3, 0.5, 0.9]).unwrap();
        assert!((boundary_penalty(&low, 0.0, 1.0) - 0.09).abs() < 1e-15);
        let both = CenterSet::from_centers(vec![-0.1, 0.5, 1.1]).unwrap();
        assert!((boundary_penalty(&both, 0.0, 1.0) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn grid_configuration_is_a_minimum() {
        let ranges = RangeBox::new([-1.0, -2.0], [1.0, 2.0]).unwrap();
        let p = grid_params([2.0 / 8.0, 4.0 / 8.0], [-1.0, -2.0]);
        let (value, grad) = reg_value_and_grad(&p, &ranges).unwrap();
        assert!(value.abs() < 1e-24);
        assert!(grad.max_abs() < 1e-12);
        assert_eq!(reg_term(&p, &ranges).unwrap(), value);
    }

    #[test]
    fn reg_term_is_sum_of_d_inside_range() {
        let ranges = RangeBox::new([-3.0, -3.0], [3.0, 3.0]).unwrap();
        let p = RbmParams::new(
            vec![[0.5, -0.2], [0.1, 0.9], [-0.7, 0.3]],
            [0.2, -0.1],
            vec![0.0; 3],
            0.5,
        )
        .unwrap();
        let dx = non_uniformity(&center_set(&p, Coord::X).unwrap(), -3.0, 3.0);
        let dy = non_uniformity(&center_set(&p, Coord::Y).unwrap(), -3.0, 3.0);
        assert!((reg_term(&p, &ranges).unwrap() - dx - dy).abs() < 1e-14);
    }

    #[test]
    fn coordinate_swap_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let p = RbmParams::new(
                (0..4).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect(),
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                vec![0.0; 4],
                0.5,
            )
            .unwrap();
            let ranges = RangeBox::new([-1.5, -0.7], [1.1, 2.3]).unwrap();
            let q = p.swap_coordinates();
            let r = ranges.swapped();
            let d = |p: &RbmParams, r: &RangeBox, c: Coord| {
                let (lo, hi) = r.interval(c);
                non_uniformity(&center_set(p, c).unwrap(), lo, hi)
            };
            assert_eq!(d(&p, &ranges, Coord::X), d(&q, &r, Coord::Y));
            assert_eq!(d(&p, &ranges, Coord::Y), d(&q, &r, Coord::X));
            assert_eq!(reg_term(&p, &ranges).unwrap(), reg_term(&q, &r).unwrap());
        }
    }

    #[test]
    fn bias_shift_leaves_spacing_gradient_zero() {
        let ranges = RangeBox::new([-5.0, -5.0], [5.0, 5.0]).unwrap();
        let p = RbmParams::new(vec![[0.5, -0.2], [0.1, 0.9]], [0.2, -0.1], vec![0.0; 2], 0.5).unwrap();
        let g = reg_grad(&p, &ranges).unwrap();
        assert!(g.vis_bias[0].abs() < 1e-12 && g.vis_bias[1].abs() < 1e-12);
    }
}
