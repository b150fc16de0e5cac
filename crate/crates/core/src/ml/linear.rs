//! Least-squares linear regression solved through the normal equations.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::MlError;

/// Ridge used when the caller gives none and the plain system is singular.
pub const FALLBACK_RIDGE: f64 = 1e-8;

/// Feature weights followed by the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHypothesis {
    pub weights: Vec<f64>,
}

impl LinearHypothesis {
    pub fn new(weights: Vec<f64>) -> Self {
        LinearHypothesis { weights }
    }

    pub fn features(&self) -> usize {
        self.weights.len().saturating_sub(1)
    }

    pub fn intercept(&self) -> f64 {
        self.weights.last().copied().unwrap_or(0.0)
    }
}

pub fn predict(h: &LinearHypothesis, x: &[f64]) -> Result<f64, MlError> {
    if h.weights.is_empty() || x.len() != h.features() {
        return Err(MlError::DimensionMismatch { expected: h.features(), found: x.len() });
    }
    Ok(x.iter().zip(&h.weights).map(|(a, b)| a * b).sum::<f64>() + h.intercept())
}

/// Sum of squared residuals.
pub fn loss(d: &Dataset, h: &LinearHypothesis) -> Result<f64, MlError> {
    d.iter().try_fold(0.0, |acc, (x, y)| {
        let e = predict(h, x)? - y;
        Ok(acc + e * e)
    })
}

/// Gradient of `loss + ridge·‖w‖²` with respect to every weight.
pub fn gradient(d: &Dataset, h: &LinearHypothesis, ridge: f64) -> Result<Vec<f64>, MlError> {
    let mut g: Vec<f64> = h.weights.iter().map(|w| 2.0 * ridge * w).collect();
    for (x, y) in d.iter() {
        let e = predict(h, x)? - y;
        for (gi, xi) in g.iter_mut().zip(x.iter().chain(core::iter::once(&1.0))) {
            *gi += 2.0 * e * xi;
        }
    }
    Ok(g)
}

/// Minimizes `Σ (predict(w, xᵢ) − yᵢ)² + ridge·‖w‖²` over the
/// intercept-augmented design matrix.
#[allow(clippy::needless_range_loop)]
pub fn fit_linear(d: &Dataset, ridge: f64) -> Result<LinearHypothesis, MlError> {
    if d.is_empty() {
        return Err(MlError::EmptyDataset);
    }
    if ridge.is_nan() || ridge < 0.0 {
        return Err(MlError::NegativeRidge);
    }
    let k = d.features() + 1;
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for (x, y) in d.iter() {
        let row = |i: usize| if i < k - 1 { x[i] } else { 1.0 };
        for i in 0..k {
            b[i] += row(i) * y;
            for j in i..k {
                a[i][j] += row(i) * row(j);
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            a[i][j] = a[j][i];
        }
        a[i][i] += ridge;
    }
    solve_dense(a, b).map(LinearHypothesis::new).ok_or(MlError::Singular)
}

/// Fits with no regularization, falling back to [`FALLBACK_RIDGE`] when the
/// normal system is singular.
pub fn fit_linear_default(d: &Dataset) -> Result<LinearHypothesis, MlError> {
    match fit_linear(d, 0.0) {
        Err(MlError::Singular) => fit_linear(d, FALLBACK_RIDGE),
        other => other,
    }
}

/// Gaussian elimination with partial pivoting. `None` if a pivot vanishes
/// relative to the matrix scale.
#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let tol = scale * 1e-12;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= tol {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn line_through_two_points() {
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![2.0, 4.0]).unwrap();
        let h = fit_linear(&d, 0.0).unwrap();
        assert!(close(&h.weights, &[2.0, 0.0], 1e-9), "{h:?}");
    }

    #[test]
    fn constant_target_is_intercept_only() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0], vec![2.0]], vec![5.0; 3]).unwrap();
        let h = fit_linear(&d, 0.0).unwrap();
        assert!(close(&h.weights, &[0.0, 5.0], 1e-9), "{h:?}");
    }

    #[test]
    fn empty_dataset_errors() {
        assert_eq!(fit_linear(&Dataset::empty(2), 0.0), Err(MlError::EmptyDataset));
    }

    #[test]
    fn singular_needs_ridge() {
        // duplicated column
        let d = Dataset::new(vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(fit_linear(&d, 0.0), Err(MlError::Singular));
        let h = fit_linear_default(&d).unwrap();
        assert!((predict(&h, &[2.0, 2.0]).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn predict_and_loss() {
        let h = LinearHypothesis::new(vec![2.0, 1.0]);
        assert_eq!(predict(&h, &[3.0]).unwrap(), 7.0);
        assert_eq!(predict(&LinearHypothesis::new(vec![0.0, 0.0, 4.5]), &[9.0, -3.0]).unwrap(), 4.5);
        assert!(predict(&h, &[1.0, 2.0]).is_err());
        let d = Dataset::new(vec![vec![3.0]], vec![4.0]).unwrap();
        assert_eq!(loss(&d, &h).unwrap(), 9.0);
        let perfect = Dataset::new(vec![vec![3.0]], vec![7.0]).unwrap();
        assert_eq!(loss(&perfect, &h).unwrap(), 0.0);
    }
}
