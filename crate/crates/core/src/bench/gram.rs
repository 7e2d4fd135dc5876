use nalgebra::DMatrix;

use crate::kernels::{kernel_exact, KernelKind};
use crate::{Error, FeatureMapper, Result};

/// Exact kernel matrix of `rows`.
pub fn gram_exact(k: &KernelKind, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "Gram matrix needs at least 2 rows, got {m}"
        )));
    }
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = kernel_exact(k, &rows[i], &rows[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `F Fᵀ` for a feature matrix given row by row.
pub fn gram_from_features(features: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = features.len();
    if m == 0 {
        return Err(Error::EmptyData);
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::InvalidInput(
            "feature rows have different lengths".into(),
        ));
    }
    let f = DMatrix::from_fn(m, dim, |i, j| features[i][j]);
    Ok(&f * f.transpose())
}

/// Approximate Gram matrix of `rows` under `mapper`.
pub fn gram_approx(mapper: &dyn FeatureMapper, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    gram_from_features(&mapper.map_rows(rows)?)
}

/// `‖K - K̂‖_F / ‖K‖_F`.
pub fn relative_frobenius_error(k: &DMatrix<f64>, k_hat: &DMatrix<f64>) -> Result<f64> {
    if k.shape() != k_hat.shape() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {:?} vs {:?}",
            k.shape(),
            k_hat.shape()
        )));
    }
    let norm = k.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput(
            "exact kernel matrix has zero norm".into(),
        ));
    }
    Ok((k - k_hat).norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_gram_has_unit_diagonal() {
        let k = KernelKind::gaussian(0.3).unwrap();
        let rows = vec![vec![0.1, 2.0], vec![-1.0, 0.5], vec![3.0, 3.0]];
        let g = gram_exact(&k, &rows).unwrap();
        for i in 0..3 {
            assert_eq!(g[(i, i)], 1.0);
            for j in 0..3 {
                assert_eq!(g[(i, j)], g[(j, i)]);
                assert_eq!(g[(i, j)], kernel_exact(&k, &rows[i], &rows[j]).unwrap());
            }
        }
        let same = gram_exact(&k, &vec![vec![1.0, -2.0]; 4]).unwrap();
        assert!(same.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn arccos_rejects_zero_rows() {
        assert!(gram_exact(&KernelKind::ArcCos0, &[vec![0.0, 0.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let k = DMatrix::<f64>::identity(2, 2);
        assert_eq!(relative_frobenius_error(&k, &k).unwrap(), 0.0);
        assert_eq!(
            relative_frobenius_error(&k, &DMatrix::zeros(2, 2)).unwrap(),
            1.0
        );
        let half = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5]));
        assert!((relative_frobenius_error(&k, &half).unwrap() - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!(relative_frobenius_error(&DMatrix::zeros(2, 2), &k).is_err());
        assert!(relative_frobenius_error(&k, &DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn feature_gram_is_outer_product() {
        let g = gram_from_features(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 6.0, 9.0]));
    }
}
