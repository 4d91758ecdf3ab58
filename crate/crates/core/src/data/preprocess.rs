use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Standardizes a series to mean 0 and variance 1 (divisor `T`).
pub fn zscore(series: &[f64]) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::Degenerate("empty series".into()));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    let sd = var.sqrt();
    Ok(series.iter().map(|v| (v - mean) / sd).collect())
}

/// Projection of the centered rows onto the leading principal axis.
///
/// `rows` is `T × D`. The axis is oriented so that its largest-magnitude
/// loading is positive. With `D = 1` this is the centered column.
pub fn first_pc(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let t = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(Error::Degenerate("matrix has no columns".into()));
    }
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Degenerate("ragged matrix".into()));
    }
    if t <= d {
        return Err(Error::Degenerate(format!("need more rows than columns, got {t}×{d}")));
    }
    let x = DMatrix::from_fn(t, d, |i, j| rows[i][j]);
    let means = x.row_mean();
    let centered = DMatrix::from_fn(t, d, |i, j| x[(i, j)] - means[j]);
    if d == 1 {
        if centered.iter().all(|&v| v == 0.0) {
            return Err(Error::Degenerate("matrix has rank 0".into()));
        }
        return Ok(centered.column(0).iter().copied().collect());
    }
    let cov = centered.transpose() * &centered / (t - 1) as f64;
    let eig = SymmetricEigen::new(cov);
    let (lead, &top) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("d >= 1");
    if !(top > 0.0) {
        return Err(Error::Degenerate("matrix has rank 0".into()));
    }
    let mut axis = eig.eigenvectors.column(lead).into_owned();
    let pivot = axis
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("d >= 1");
    if pivot < 0.0 {
        axis = -axis;
    }
    Ok((centered * axis).iter().copied().collect())
}
