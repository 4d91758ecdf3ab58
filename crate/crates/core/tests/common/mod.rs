#![allow(dead_code)]

use rand::Rng;

use crbm::rbm::RbmParams;

/// `params` with scalar parameter `k` moved by `h`, in the order `W`, `b`, `c`.
pub fn perturbed(params: &RbmParams, k: usize, h: f64) -> RbmParams {
    let mut p = params.clone();
    let m = p.m();
    if k < 2 * m {
        p.weights[k / 2][k % 2] += h;
    } else if k < 2 * m + 2 {
        p.vis_bias[k - 2 * m] += h;
    } else {
        p.hid_bias[k - 2 * m - 2] += h;
    }
    p
}

/// Relative error with a floor on the denominator for near-zero entries.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

pub fn random_params<R: Rng + ?Sized>(rng: &mut R, m: usize, scale: f64) -> RbmParams {
    let weights = (0..m)
        .map(|_| [rng.random_range(-scale..scale), rng.random_range(-scale..scale)])
        .collect();
    let vis_bias = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    let hid_bias = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    RbmParams::new(weights, vis_bias, hid_bias, rng.random_range(0.3..1.5)).unwrap()
}

/// Weighted probability that a positive outranks a negative, ties counting half.
pub fn rank_statistic(scored: &[(f64, bool, f64)]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &(sp, _, wp) in scored.iter().filter(|s| s.1) {
        for &(sn, _, wn) in scored.iter().filter(|s| !s.1) {
            let w = wp * wn;
            den += w;
            if sp > sn {
                num += w;
            } else if sp == sn {
                num += 0.5 * w;
            }
        }
    }
    num / den
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

/// Two-sided 97.5% Student t quantile for 19 degrees of freedom.
pub const T975_DF19: f64 = 2.093;

/// Sample mean and the half-width of its 95% interval for 20 values.
pub fn mean_ci95_n20(values: &[f64]) -> (f64, f64) {
    assert_eq!(values.len(), 20);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, T975_DF19 * (var / n).sqrt())
}
