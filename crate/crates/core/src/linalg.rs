//! Pivoted Cholesky factorization for positive semidefinite covariance
//! matrices.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

/// Relative pivot threshold below which the factorization stops.
pub const DEFAULT_PIVOT_TOLERANCE: f64 = 1e-12;

/// `Sigma ~= L L^T` with `L` of shape `N x rank`.
#[derive(Debug, Clone)]
pub struct LowRankFactor {
    factor: Array2<f64>,
}

impl LowRankFactor {
    pub fn factor(&self) -> &Array2<f64> {
        &self.factor
    }

    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    /// `L z` for a standard normal vector `z` of length `rank`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.rank());
        self.factor.dot(&Array1::from(z.to_vec())).to_vec()
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        self.factor.dot(&self.factor.t())
    }
}

/// Diagonal-pivoted Cholesky factorization, truncated once the largest
/// remaining pivot falls to `rel_tol` times the largest diagonal entry.
///
/// Fails when the matrix is not symmetric or has a clearly negative
/// remaining pivot.
pub fn pivoted_cholesky(sigma: &Array2<f64>, rel_tol: f64) -> Result<LowRankFactor> {
    let n = sigma.nrows();
    if sigma.ncols() != n {
        return Err(Error::invalid("covariance matrix must be square"));
    }
    if let Some(v) = sigma.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("covariance entry {v}")));
    }
    let scale = sigma.diag().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if (sigma[[i, j]] - sigma[[j, i]]).abs() > 1e-10 * scale.max(1e-300) {
                return Err(Error::invalid(format!("covariance not symmetric at ({i}, {j})")));
            }
        }
    }
    let threshold = rel_tol * scale;
    let mut diag: Vec<f64> = sigma.diag().to_vec();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut used = vec![false; n];
    loop {
        let pick = (0..n)
            .filter(|&i| !used[i])
            .max_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let Some(j) = pick else { break };
        if diag[j] <= threshold || scale == 0.0 {
            break;
        }
        used[j] = true;
        let pivot = diag[j].sqrt();
        let mut col = vec![0.0; n];
        col[j] = pivot;
        for i in (0..n).filter(|&i| !used[i]) {
            let dot: f64 = cols.iter().map(|c| c[i] * c[j]).sum();
            col[i] = (sigma[[i, j]] - dot) / pivot;
            diag[i] -= col[i] * col[i];
        }
        cols.push(col);
    }
    if let Some(i) = (0..n).find(|&i| !used[i] && diag[i] < -1e-8 * scale.max(1.0)) {
        return Err(Error::NotPositiveSemidefinite {
            index: i,
            pivot: diag[i],
        });
    }
    let mut factor = Array2::zeros((n, cols.len()));
    for (k, col) in cols.iter().enumerate() {
        factor.column_mut(k).assign(&Array1::from(col.clone()));
    }
    Ok(LowRankFactor { factor })
}

/// `||Sigma - L L^T||_F / ||Sigma||_F` (0 for the zero matrix).
pub fn relative_residual(sigma: &Array2<f64>, f: &LowRankFactor) -> f64 {
    let diff = sigma - &f.reconstruct();
    let norm = |m: &Array2<f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let base = norm(sigma);
    if base == 0.0 {
        norm(&diff)
    } else {
        norm(&diff) / base
    }
}

/// Sample covariance of the rows of `x` (observations in rows).
pub fn sample_covariance(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let mean = x.mean_axis(Axis(0)).expect("non-empty sample");
    let centred = x - &mean;
    centred.t().dot(&centred) / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn full_rank_reconstructs() {
        let s = array![[4.0, 2.0, 0.6], [2.0, 2.0, 0.5], [0.6, 0.5, 1.0]];
        let f = pivoted_cholesky(&s, DEFAULT_PIVOT_TOLERANCE).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(relative_residual(&s, &f) < 1e-14);
    }

    #[test]
    fn rank_one_truncates() {
        let v = array![1.0, -2.0, 0.5];
        let s = Array2::from_shape_fn((3, 3), |(i, j)| v[i] * v[j]);
        let f = pivoted_cholesky(&s, DEFAULT_PIVOT_TOLERANCE).unwrap();
        assert_eq!(f.rank(), 1);
        assert!(relative_residual(&s, &f) < 1e-14);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let f = pivoted_cholesky(&Array2::zeros((4, 4)), DEFAULT_PIVOT_TOLERANCE).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.apply(&[]), vec![0.0; 4]);
    }

    #[test]
    fn indefinite_rejected() {
        let s = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(
            pivoted_cholesky(&s, DEFAULT_PIVOT_TOLERANCE),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let asym = array![[1.0, 0.5], [0.0, 1.0]];
        assert!(pivoted_cholesky(&asym, DEFAULT_PIVOT_TOLERANCE).is_err());
    }
}
