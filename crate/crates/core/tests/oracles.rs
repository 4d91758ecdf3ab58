mod common;

use std::collections::BTreeSet;
use std::fs;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use common::{jacobi_eigen, random_params, rank_statistic};
use crbm::bench::roc_from_scores;
use crbm::criterion::{capacity_of_centers, GridSpec};
use crbm::data::{first_pc, gen_simlin, load_pairs, write_pairs, zscore, DatasetTag, SimLinSpec};
use crbm::igci::{igci_entropy, igci_slope, vasicek_entropy};
use crbm::rbm::{exact_log_likelihood, EncoderScaling, VisiblePoint};
use crbm::seed;
use crbm::Direction;

#[test]
fn written_pairs_reload_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = gen_simlin(&SimLinSpec { n_pairs: 4, n_obs: 120, seed: 17 });
    write_pairs(dir.path(), &pairs).unwrap();
    let loaded = load_pairs(dir.path(), DatasetTag::SimLin).unwrap();
    assert!(loaded.skipped.is_empty());
    assert_eq!(loaded.pairs.len(), pairs.len());
    for (a, b) in pairs.iter().zip(&loaded.pairs) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.truth, b.truth);
        for (u, v) in a.x.iter().chain(&a.y).zip(b.x.iter().chain(&b.y)) {
            assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
        }
    }
}

/// Rows `T × 3` with a dominant direction plus a fourth, unrelated column.
fn correlated_rows(n: usize, seed_v: u64) -> Vec<Vec<f64>> {
    let mut rng = seed::rng(seed_v);
    let unit = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let t: f64 = unit.sample(&mut rng);
            let e: Vec<f64> = (0..4).map(|_| unit.sample(&mut rng)).collect();
            vec![2.0 * t + 0.3 * e[0] + 1.0, -t + 0.5 * e[1], 0.5 * t + 0.2 * e[2] - 3.0, e[3]]
        })
        .collect()
}

fn covariance(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let (n, d) = (rows.len(), rows[0].len());
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let cov = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| rows.iter().map(|r| (r[a] - means[a]) * (r[b] - means[b])).sum::<f64>() / (n - 1) as f64)
                .collect()
        })
        .collect();
    (means, cov)
}

#[test]
fn first_pc_matches_jacobi_projection() {
    let rows: Vec<Vec<f64>> = correlated_rows(300, 5).into_iter().map(|r| r[..3].to_vec()).collect();
    let (means, cov) = covariance(&rows);
    let (vals, vecs) = jacobi_eigen(&cov);
    let lead = (0..3).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let mut axis: Vec<f64> = (0..3).map(|i| vecs[i][lead]).collect();
    let pivot = axis.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
    if pivot < 0.0 {
        axis.iter_mut().for_each(|a| *a = -*a);
    }

    let pc = first_pc(&rows).unwrap();
    for (r, p) in rows.iter().zip(&pc) {
        let expect: f64 = (0..3).map(|j| (r[j] - means[j]) * axis[j]).sum();
        assert!((p - expect).abs() < 1e-8, "{p} vs {expect}");
    }
    let var = pc.iter().map(|p| p * p).sum::<f64>() / (pc.len() - 1) as f64;
    assert!((var - vals[lead]).abs() < 1e-8 * vals[lead]);
}

#[test]
fn multi_column_cause_loads_as_first_component() {
    let dir = tempfile::tempdir().unwrap();
    let rows = correlated_rows(200, 8);
    let body: String = rows
        .iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect();
    fs::write(dir.path().join("pair0001.txt"), body).unwrap();
    fs::write(dir.path().join("pairmeta.txt"), "0001 1 3 4 4 0.5\n").unwrap();

    let loaded = load_pairs(dir.path(), DatasetTag::Cep).unwrap();
    let pair = &loaded.pairs[0];
    assert_eq!(pair.truth, Direction::XtoY);
    assert_eq!(pair.weight, 0.5);
    let block: Vec<Vec<f64>> = rows.iter().map(|r| r[..3].to_vec()).collect();
    let pc = first_pc(&block).unwrap();
    for (a, b) in pair.x.iter().zip(&pc) {
        assert!((a - b).abs() < 1e-9);
    }
    for (a, r) in pair.y.iter().zip(&rows) {
        assert_eq!(*a, r[3]);
    }
}

#[test]
fn zscore_moments() {
    let z = zscore(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    // Population sd of 1..4 is sqrt(1.25).
    let s = 1.25f64.sqrt();
    for (a, b) in z.iter().zip([-1.5 / s, -0.5 / s, 0.5 / s, 1.5 / s]) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(zscore(&[2.0, 2.0, 2.0]).is_err());
}

#[test]
fn auc_equals_rank_statistic_on_random_sets() {
    let mut rng = seed::rng(21);
    for trial in 0..200 {
        let n = rng.random_range(2..60);
        let mut scored: Vec<(f64, bool, f64)> = (0..n)
            .map(|_| {
                // Coarse scores make ties common.
                let s = (rng.random_range(-3.0..3.0f64) * 4.0).round() / 4.0;
                (s, rng.random_bool(0.5), rng.random_range(0.1..2.0))
            })
            .collect();
        scored[0].1 = true;
        scored[1].1 = false;
        let (roc, auc) = roc_from_scores(&scored).unwrap();
        let oracle = rank_statistic(&scored);
        assert!((auc - oracle).abs() < 1e-9, "trial {trial}: {auc} vs {oracle}");
        let distinct: BTreeSet<u64> = scored.iter().map(|s| (s.0 + 0.0).to_bits()).collect();
        assert_eq!(roc.len(), distinct.len() + 2);
    }
}

#[test]
fn auc_is_one_when_separable_and_half_when_random() {
    let separable: Vec<_> = (0..20).map(|i| (i as f64, i >= 10, 1.0 + i as f64 * 0.1)).collect();
    assert_eq!(roc_from_scores(&separable).unwrap().1, 1.0);

    let mut rng = seed::rng(2);
    let random: Vec<_> = (0..4000).map(|_| (rng.random::<f64>(), rng.random_bool(0.5), 1.0)).collect();
    let auc = roc_from_scores(&random).unwrap().1;
    assert!((auc - 0.5).abs() < 0.05, "{auc}");
}

#[test]
fn igci_slope_antisymmetric_on_monotone_data() {
    let mut rng = seed::rng(4);
    let mut x: Vec<f64> = (0..300).map(|_| rng.random_range(-2.0..2.0)).collect();
    x.dedup();
    let y: Vec<f64> = x.iter().map(|v| v.powi(3) + v).collect();
    let s = igci_slope(&x, &y).unwrap();
    assert!((s.c_xy + s.c_yx).abs() < 1e-12, "{} {}", s.c_xy, s.c_yx);
    assert_eq!(s.direction, Direction::from_score(s.score));
}

#[test]
fn igci_entropy_undecided_on_permuted_copy() {
    let mut rng = seed::rng(6);
    let x: Vec<f64> = (0..500).map(|_| rng.random::<f64>().powi(2)).collect();
    let mut y = x.clone();
    y.shuffle(&mut rng);
    let s = igci_entropy(&x, &y).unwrap();
    assert_eq!(s.score, 0.0);
    assert_eq!(s.direction, Direction::Undecided);
}

#[test]
fn vasicek_matches_closed_form_entropies() {
    let mut rng = seed::rng(12);
    let n = 20_000;
    let m = (n as f64).sqrt() as usize;
    let uniform: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    assert!(vasicek_entropy(&uniform, m).unwrap().abs() < 0.03);
    let normal = Normal::new(0.0, 2.0).unwrap();
    let g: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let h = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 4.0).ln();
    assert!((vasicek_entropy(&g, m).unwrap() - h).abs() < 0.03);
}

#[test]
fn exact_density_integrates_to_one() {
    let mut rng = seed::rng(30);
    for scaling in [EncoderScaling::VarianceScaled, EncoderScaling::Unscaled] {
        let p = random_params(&mut rng, 3, 1.0);
        // Every mode lies within |b| + Σ|w| of the origin.
        let reach = 1.0 + 3.0 + 8.0 * p.sigma;
        let nodes = 401;
        let step = 2.0 * reach / (nodes - 1) as f64;
        let mut total = 0.0;
        for i in 0..nodes {
            for j in 0..nodes {
                let v = VisiblePoint::new(-reach + i as f64 * step, -reach + j as f64 * step);
                total += exact_log_likelihood(&p, &v, scaling).unwrap().exp();
            }
        }
        total *= step * step;
        assert!((total - 1.0).abs() < 1e-6, "{scaling:?}: {total}");
    }
}

#[test]
fn capacity_counts_separated_modes() {
    let grid = GridSpec::default();
    let one = capacity_of_centers(&[0.0], 0.5, -1.0, 1.0, grid).unwrap();
    assert!((one - 1.0).abs() < 1e-6, "{one}");
    let three = capacity_of_centers(&[-20.0, 0.0, 20.0], 0.5, -20.0, 20.0, grid).unwrap();
    assert!((three - 3.0).abs() < 1e-6, "{three}");
    // Coincident centers add nothing.
    let stacked = capacity_of_centers(&[0.3, 0.3, 0.3], 0.5, -1.0, 1.0, grid).unwrap();
    assert!((stacked - 1.0).abs() < 1e-6, "{stacked}");
}
