//! Haar-distributed dense orthogonal matrices via QR of a Gaussian matrix.

use nalgebra::DMatrix;
use rand::Rng;

use crate::rng;
use crate::{Error, Result};

/// `Q·D` where `Q` comes from the QR factorization of a standard Gaussian
/// `d × d` matrix and `D` is an independent diagonal of random signs.
pub fn haar_qr_orthogonal(d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(Error::InvalidDimension(
            "orthogonal matrix size must be >= 1".into(),
        ));
    }
    let mut r = rng::rng_from_seed(seed);
    Ok(haar_qr_with(d, &mut r))
}

pub(crate) fn haar_qr_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(d, d);
    rng::fill_standard_normal(rng, g.as_mut_slice());
    let mut q = g.qr().q();
    let signs = rng::rademacher(rng, d);
    for (j, s) in signs.into_iter().enumerate() {
        if s < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn orthogonal_for_many_sizes() {
        for d in [1, 2, 3, 8, 17, 64] {
            let q = haar_qr_orthogonal(d, d as u64 + 100).unwrap();
            let defect = (q.transpose() * &q - DMatrix::identity(d, d)).norm();
            assert!(defect <= 1e-10, "d={d} defect={defect}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            haar_qr_orthogonal(9, 4).unwrap(),
            haar_qr_orthogonal(9, 4).unwrap()
        );
        assert_ne!(
            haar_qr_orthogonal(9, 4).unwrap(),
            haar_qr_orthogonal(9, 5).unwrap()
        );
    }

    #[test]
    fn first_column_angle_is_uniform_in_two_dimensions() {
        let samples = 100_000;
        let bins = 36;
        let mut counts = vec![0usize; bins];
        let mut r = rng::rng_from_seed(2024);
        for _ in 0..samples {
            let q = haar_qr_with(2, &mut r);
            let angle = q[(1, 0)].atan2(q[(0, 0)]).rem_euclid(std::f64::consts::TAU);
            let bin = ((angle / std::f64::consts::TAU) * bins as f64) as usize;
            counts[bin.min(bins - 1)] += 1;
        }
        let expected = samples as f64 / bins as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let critical = ChiSquared::new((bins - 1) as f64)
            .unwrap()
            .inverse_cdf(0.99);
        assert!(stat < critical, "chi-square {stat} >= {critical}");
    }

    #[test]
    fn rejects_zero_size() {
        assert!(haar_qr_orthogonal(0, 1).is_err());
    }
}
