mod common;

use common::{perturbed, rel_err};
use proptest::prelude::*;

use crbm::bench::{roc_from_scores, weighted_accuracy, PairResult};
use crbm::criterion::{capacity_monotonicity_check, gamma, GridSpec};
use crbm::rbm::{cd_loss_and_grad, exact_log_likelihood, reconstruct, CdOptions, EncoderScaling, HiddenPattern, RbmParams, VisiblePoint};
use crbm::regularizer::{center_set, non_uniformity, reg_grad, reg_term, uniform_spacing, CenterSet, Coord, RangeBox};
use crbm::seed;
use crbm::Direction;

fn params_strategy(max_m: usize, scale: f64) -> impl Strategy<Value = RbmParams> {
    (1..=max_m).prop_flat_map(move |m| {
        (
            prop::collection::vec((-scale..scale, -scale..scale), m),
            (-1.0..1.0f64, -1.0..1.0f64),
            prop::collection::vec(-1.0..1.0f64, m),
            0.3..1.5f64,
        )
            .prop_map(|(w, b, c, sigma)| {
                RbmParams::new(w.into_iter().map(|(a, b)| [a, b]).collect(), [b.0, b.1], c, sigma).unwrap()
            })
    })
}

fn ranges_strategy() -> impl Strategy<Value = RangeBox> {
    (-3.0..0.0f64, 0.5..4.0f64, -3.0..0.0f64, 0.5..4.0f64)
        .prop_map(|(k1, w1, k2, w2)| RangeBox::new([k1, k2], [k1 + w1, k2 + w2]).unwrap())
}

fn scaling_strategy() -> impl Strategy<Value = EncoderScaling> {
    prop_oneof![Just(EncoderScaling::VarianceScaled), Just(EncoderScaling::Unscaled)]
}

/// Smallest gap between sorted centers, over both coordinates.
fn min_gap(params: &RbmParams) -> f64 {
    [Coord::X, Coord::Y]
        .iter()
        .map(|&c| {
            let s: Vec<f64> = center_set(params, c).unwrap().sorted().collect();
            s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn free_energy_matches_enumeration(p in params_strategy(5, 1.5), x in -3.0..3.0f64, y in -3.0..3.0f64, s in scaling_strategy()) {
        let v = VisiblePoint::new(x, y);
        let brute = -HiddenPattern::all(p.m()).map(|h| (-p.energy(&v, &h, s)).exp()).sum::<f64>().ln();
        let f = p.free_energy(&v, s);
        prop_assert!((f - brute).abs() <= 1e-9 * brute.abs().max(1.0), "{f} vs {brute}");
    }

    #[test]
    fn reg_grad_matches_finite_differences(p in params_strategy(5, 1.0), r in ranges_strategy()) {
        // Centers closer than a few steps could swap order under the probe.
        prop_assume!(min_gap(&p) > 1e-3);
        let g = reg_grad(&p, &r).unwrap().to_vec();
        let h = 1e-6;
        for (k, &gk) in g.iter().enumerate() {
            let fd = (reg_term(&perturbed(&p, k, h), &r).unwrap() - reg_term(&perturbed(&p, k, -h), &r).unwrap()) / (2.0 * h);
            prop_assert!(rel_err(gk, fd) < 1e-5, "param {k}: {gk} vs {fd}");
        }
    }

    #[test]
    fn cd_grad_matches_finite_differences(p in params_strategy(4, 1.0), s in scaling_strategy(), seed_v in any::<u64>()) {
        let mut rng = seed::rng(seed_v);
        let data: Vec<VisiblePoint> = (0..6)
            .map(|i| VisiblePoint::new((i as f64 * 0.7).sin() * 1.5, (i as f64 * 1.3).cos()))
            .collect();
        let recon = reconstruct(&p, &data, CdOptions { scaling: s, ..Default::default() }, &mut rng);
        let (_, g) = cd_loss_and_grad(&p, &data, &recon, s).unwrap();
        let h = 1e-5;
        for (k, gk) in g.to_vec().into_iter().enumerate() {
            let up = cd_loss_and_grad(&perturbed(&p, k, h), &data, &recon, s).unwrap().0;
            let dn = cd_loss_and_grad(&perturbed(&p, k, -h), &data, &recon, s).unwrap().0;
            let fd = (up - dn) / (2.0 * h);
            prop_assert!(rel_err(gk, fd) < 1e-5, "param {k}: {gk} vs {fd}");
        }
    }

    #[test]
    fn gamma_negates_under_swap(p in params_strategy(6, 2.0), r in ranges_strategy()) {
        let a = gamma(&p, &r).unwrap();
        let b = gamma(&p.swap_coordinates(), &r.swapped()).unwrap();
        prop_assert_eq!(a.gamma, -b.gamma);
        prop_assert_eq!(a.d_x, b.d_y);
        prop_assert_eq!(a.direction, b.direction.reversed());
    }

    #[test]
    fn reg_term_symmetric_under_swap(p in params_strategy(6, 2.0), r in ranges_strategy()) {
        prop_assert_eq!(reg_term(&p, &r).unwrap(), reg_term(&p.swap_coordinates(), &r.swapped()).unwrap());
    }

    #[test]
    fn non_uniformity_translation_invariant(c in prop::collection::vec(-2.0..2.0f64, 8), t in -5.0..5.0f64, lo in -3.0..0.0f64, w in 0.5..5.0f64) {
        let a = non_uniformity(&CenterSet::from_centers(c.clone()).unwrap(), lo, lo + w);
        let shifted: Vec<f64> = c.iter().map(|x| x + t).collect();
        let b = non_uniformity(&CenterSet::from_centers(shifted).unwrap(), lo, lo + w);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn non_uniformity_zero_exactly_on_grid(m in 1usize..7, lo in -4.0..0.0f64, w in 0.25..6.0f64, jitter in 1e-6..0.1f64, which in any::<prop::sample::Index>()) {
        let n = 1usize << m;
        // Dyadic ranges keep the grid exact in floating point.
        let w = (w * 64.0).round() / 64.0;
        let lo = (lo * 64.0).round() / 64.0;
        let delta = uniform_spacing(n, lo, lo + w);
        let grid: Vec<f64> = (0..n).map(|i| lo + i as f64 * delta).collect();
        prop_assert_eq!(non_uniformity(&CenterSet::from_centers(grid.clone()).unwrap(), lo, lo + w), 0.0);
        let mut bent = grid;
        bent[which.index(n)] += jitter * delta;
        prop_assert!(non_uniformity(&CenterSet::from_centers(bent).unwrap(), lo, lo + w) > 0.0);
    }

    #[test]
    fn accuracy_invariant_to_weight_scale_and_flip(
        rows in prop::collection::vec((-2.0..2.0f64, any::<bool>(), 0.1..3.0f64), 1..30),
        factor in 0.01..100.0f64,
    ) {
        let recs: Vec<PairResult> = rows
            .iter()
            .map(|&(g, t, w)| {
                let truth = if t { Direction::XtoY } else { Direction::YtoX };
                PairResult::new("p", 0, "m", g, Direction::from_score(g), truth, w)
            })
            .collect();
        let base = weighted_accuracy(&recs).unwrap();
        let scaled: Vec<PairResult> = recs.iter().map(|r| PairResult { weight: r.weight * factor, ..r.clone() }).collect();
        let flipped: Vec<PairResult> = recs.iter().map(PairResult::mirrored).collect();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!((weighted_accuracy(&scaled).unwrap() - base).abs() < 1e-12);
        prop_assert!((weighted_accuracy(&flipped).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn auc_invariant_under_monotone_transform_and_flip(
        rows in prop::collection::vec((-3.0..3.0f64, any::<bool>(), 0.1..2.0f64), 2..40),
    ) {
        prop_assume!(rows.iter().any(|r| r.1) && rows.iter().any(|r| !r.1));
        let (_, auc) = roc_from_scores(&rows).unwrap();
        let warped: Vec<_> = rows.iter().map(|&(s, t, w)| ((2.0 * s).exp() + s, t, w)).collect();
        let flipped: Vec<_> = rows.iter().map(|&(s, t, w)| (-s, !t, w)).collect();
        prop_assert!((roc_from_scores(&warped).unwrap().1 - auc).abs() < 1e-12);
        prop_assert!((roc_from_scores(&flipped).unwrap().1 - auc).abs() < 1e-12);
    }
}

/// Weights `δ·2^i` put the `2^m` centers on the evenly spaced grid.
fn uniform_params(m: usize, sigma: f64, lo: f64, delta: f64) -> RbmParams {
    let weights = (0..m).map(|i| [delta * (1u64 << i) as f64, 0.0]).collect();
    RbmParams::new(weights, [lo, 0.0], vec![0.0; m], sigma).unwrap()
}

#[test]
fn uniform_placement_maximizes_capacity() {
    let (m, sigma, lo, hi) = (4usize, 0.5, -2.0, 2.0);
    let ranges = RangeBox::new([lo, lo], [hi, hi]).unwrap();
    let delta = (hi - lo) / (1u64 << m) as f64;
    let uniform = uniform_params(m, sigma, lo + delta / 2.0, delta);
    let span = delta * ((1u64 << m) - 1) as f64;
    let mut rng = seed::rng(17);
    let mut checked = 0;
    while checked < 60 {
        use rand::Rng;
        // Clustered: random weights whose centers stay within the uniform span.
        let w: Vec<[f64; 2]> = (0..m).map(|_| [rng.random_range(0.0..span / m as f64), 0.0]).collect();
        let clustered = RbmParams::new(w, [lo + delta / 2.0, 0.0], vec![0.0; m], sigma).unwrap();
        let cs = center_set(&clustered, Coord::X).unwrap();
        assert!(cs.max() <= lo + delta / 2.0 + span + 1e-12);
        assert!(capacity_monotonicity_check(&uniform, &clustered, Coord::X, &ranges, GridSpec::default()).unwrap());
        checked += 1;
    }
}

#[test]
fn cd_gradient_points_uphill_in_likelihood() {
    use rand::Rng;
    let mut rng = seed::rng(23);
    let mut agree = 0;
    let draws = 100;
    for _ in 0..draws {
        let m = rng.random_range(1..=3);
        let sigma = rng.random_range(0.5..1.5);
        let w = (0..m).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let c = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = RbmParams::new(w, [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)], c, sigma).unwrap();
        let data: Vec<VisiblePoint> = (0..5)
            .map(|_| VisiblePoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let scaling = EncoderScaling::VarianceScaled;

        // Average CD gradient over many reconstructions.
        let mut cd = crbm::rbm::Gradient::zeros(m);
        let reps = 200;
        for _ in 0..reps {
            let recon = reconstruct(&p, &data, CdOptions::default(), &mut rng);
            cd.add_scaled(&cd_loss_and_grad(&p, &data, &recon, scaling).unwrap().1, 1.0 / reps as f64);
        }

        // Gradient of the mean exact negative log-likelihood by central differences.
        let nll = |q: &RbmParams| -> f64 {
            -data.iter().map(|v| exact_log_likelihood(q, v, scaling).unwrap()).sum::<f64>() / data.len() as f64
        };
        let h = 1e-5;
        let exact: Vec<f64> = (0..cd.to_vec().len())
            .map(|k| (nll(&perturbed(&p, k, h)) - nll(&perturbed(&p, k, -h))) / (2.0 * h))
            .collect();
        let dot: f64 = cd.to_vec().iter().zip(&exact).map(|(a, b)| a * b).sum();
        if dot > 0.0 {
            agree += 1;
        }
    }
    assert!(agree >= 90, "CD agreed with the exact gradient on {agree}/{draws} draws");
}
