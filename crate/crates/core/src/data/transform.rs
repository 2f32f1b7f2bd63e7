use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative floor on covariance eigenvalues before whitening:
/// `RIDGE · trace / d`.
pub const RIDGE: f64 = 1e-8;

/// Chronological split: the first `⌊fraction · N⌋` rows train.
pub fn make_split<T: Clone>(rows: &[T], train_fraction: f64) -> Result<(Vec<T>, Vec<T>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Data(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    let cut = (train_fraction * rows.len() as f64).floor() as usize;
    if cut == 0 || cut == rows.len() {
        return Err(Error::Data(format!(
            "split of {} rows at fraction {train_fraction} leaves an empty side",
            rows.len()
        )));
    }
    Ok((rows[..cut].to_vec(), rows[cut..].to_vec()))
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= rows.len() as f64);
    mean
}

fn check_rows(rows: &[Vec<f64>], min: usize) -> Result<usize> {
    if rows.len() < min {
        return Err(Error::Degenerate(format!("need at least {min} rows, got {}", rows.len())));
    }
    let d = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { context: "data row", expected: d, actual: r.len() });
    }
    Ok(d)
}

/// Sample covariance (denominator `n − 1`).
pub fn covariance(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = check_rows(rows, 2)?;
    let mean = column_means(rows);
    let mut cov = DMatrix::zeros(d, d);
    for r in rows {
        for i in 0..d {
            let a = r[i] - mean[i];
            for j in i..d {
                cov[(i, j)] += a * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (rows.len() - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// Per-column affine standardisation fitted on training rows, using the
/// population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let d = check_rows(rows, 2)?;
        let mean = column_means(rows);
        let mut std = vec![0.0; d];
        for r in rows {
            for j in 0..d {
                std[j] += (r[j] - mean[j]).powi(2);
            }
        }
        for (j, s) in std.iter_mut().enumerate() {
            *s = (*s / rows.len() as f64).sqrt();
            if !(*s > 0.0) {
                return Err(Error::Degenerate(format!("column {j} has zero variance")));
            }
        }
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter().zip(self.mean.iter().zip(&self.std)).map(|(v, (m, s))| (v - m) / s).collect()
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

/// ZCA whitening `x ↦ (x − mean) R` with `R = E Λ^{-1/2} Eᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteningTransform {
    pub mean: Vec<f64>,
    pub r: DMatrix<f64>,
    pub r_inv: DMatrix<f64>,
}

impl WhiteningTransform {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let cov = covariance(rows)?;
        let d = cov.nrows();
        // Eigenvalues are floored at the ridge rather than shifted by it, so a
        // well-conditioned covariance is whitened exactly.
        let ridge = RIDGE * cov.trace() / d as f64;
        if !(ridge > 0.0 && ridge.is_finite()) {
            return Err(Error::Degenerate(format!(
                "covariance not positive definite (trace {})",
                cov.trace()
            )));
        }
        let mut eig = SymmetricEigen::new(cov);
        eig.eigenvalues.apply(|v| *v = v.max(ridge));
        let e = &eig.eigenvectors;
        let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
        let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let r = e * inv_sqrt * e.transpose();
        let r_inv = e * sqrt * e.transpose();
        // Symmetrise away rounding so R is exactly symmetric.
        let r = (&r + r.transpose()) * 0.5;
        let r_inv = (&r_inv + r_inv.transpose()) * 0.5;
        Ok(WhiteningTransform { mean: column_means(rows), r, r_inv })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `R` as nested rows.
    pub fn r_rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.r)
    }

    pub fn r_inv_rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.r_inv)
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|j| (0..d).map(|i| (row[i] - self.mean[i]) * self.r[(i, j)]).sum()).collect()
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// Fits ZCA whitening on `train` and returns the whitened rows with the
/// transform.
pub fn zca_whiten(train: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, WhiteningTransform)> {
    let t = WhiteningTransform::fit(train)?;
    Ok((t.apply_all(train), t))
}

/// Maps coefficients learned on whitened inputs to coefficients on centred
/// inputs: `c = R μ` (row-vector form `μ R`, R being symmetric), so that
/// `μᵀ x_w = cᵀ (x − mean)`.
pub fn project_back(mu: &[f64], transform: &WhiteningTransform) -> Result<Vec<f64>> {
    let d = transform.dim();
    if mu.len() != d {
        return Err(Error::DimensionMismatch { context: "coefficients", expected: d, actual: mu.len() });
    }
    Ok((0..d).map(|i| (0..d).map(|j| transform.r[(i, j)] * mu[j]).sum()).collect())
}
