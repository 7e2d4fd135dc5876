//! Butterfly orthogonal matrices.
//!
//! For `d = 2^k` the matrix is defined recursively,
//!
//! ```text
//! B(2m) = diag(B(m), B̂(m)) · [ c·I  -s·I ]
//!                            [ s·I   c·I ]
//! ```
//!
//! where `B̂(m)` uses the next block of angles. Storing the `d - 1` angles
//! in in-order tree layout gives `O(d)` storage, and applying the
//! `log₂ d` factor layers costs `O(d log d)`.
//!
//! When `d` is not a power of two every factor of `B(2^k)` is truncated to
//! its leading `d × d` block, with rotations whose partner index falls
//! outside the block left as identity. A single truncated matrix has
//! structurally deficient columns, so the operator instead holds a product
//! `(B P)_1 (B P)_2 … (B P)_t` of independently drawn factors and
//! permutations.

use rand::Rng;

use crate::error::{check_dim, Result};
use crate::rng::{self, SeededRng};
use crate::Error;

/// Replication count of the `(BP)` product for non-power-of-two sizes.
pub const DEFAULT_REPLICATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
struct Factor {
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// `(P x)_i = x[perm[i]]`, applied before the rotation layers.
    perm: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyOrthogonal {
    dim: usize,
    padded: usize,
    angles: Vec<Vec<f64>>,
    factors: Vec<Factor>,
}

impl ButterflyOrthogonal {
    /// Builds a single butterfly matrix from explicit angles in in-order
    /// tree layout (`padded - 1` of them, where `padded` is the next power
    /// of two). No permutation is attached.
    pub fn from_angles(dim: usize, angles: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(
                "butterfly dimension must be >= 1".into(),
            ));
        }
        let padded = dim.next_power_of_two();
        check_dim(padded - 1, angles.len())?;
        let factor = Factor {
            cos: angles.iter().map(|a| a.cos()).collect(),
            sin: angles.iter().map(|a| a.sin()).collect(),
            perm: None,
        };
        Ok(Self {
            dim,
            padded,
            angles: vec![angles],
            factors: vec![factor],
        })
    }

    /// Samples the butterfly operator for `dim` from `seed`.
    ///
    /// Power-of-two sizes give one factor whose first column is a uniform
    /// point on the sphere. Other sizes give the `(BP)^t` product with
    /// `t = DEFAULT_REPLICATIONS`.
    pub fn sample(dim: usize, seed: u64) -> Result<Self> {
        Self::sample_with_replications(dim, seed, DEFAULT_REPLICATIONS)
    }

    pub fn sample_with_replications(dim: usize, seed: u64, t: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(
                "butterfly dimension must be >= 1".into(),
            ));
        }
        if t == 0 {
            return Err(Error::InvalidInput("replication count must be >= 1".into()));
        }
        let mut rng = rng::rng_from_seed(seed);
        Ok(Self::sample_from_rng(dim, t, &mut rng))
    }

    pub(crate) fn sample_from_rng(dim: usize, t: usize, rng: &mut SeededRng) -> Self {
        let padded = dim.next_power_of_two();
        if padded == dim {
            let angles = sphere_angles(&rng::unit_sphere(rng, padded));
            return Self::from_angles(dim, angles).expect("valid angle count");
        }
        let mut angles = Vec::with_capacity(t);
        let mut factors = Vec::with_capacity(t);
        for _ in 0..t {
            let a = sphere_angles(&rng::unit_sphere(rng, padded));
            let perm = rng::permutation(rng, dim);
            factors.push(Factor {
                cos: a.iter().map(|v| v.cos()).collect(),
                sin: a.iter().map(|v| v.sin()).collect(),
                perm: Some(perm),
            });
            angles.push(a);
        }
        Self {
            dim,
            padded,
            angles,
            factors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Angles of each `(BP)` factor, in in-order tree layout.
    pub fn angles(&self) -> &[Vec<f64>] {
        &self.angles
    }

    /// Number of `(BP)` factors; 1 for power-of-two sizes.
    pub fn replications(&self) -> usize {
        self.factors.len()
    }

    pub fn permutations(&self) -> Vec<&[usize]> {
        self.factors
            .iter()
            .filter_map(|f| f.perm.as_deref())
            .collect()
    }

    /// Number of stored scalars (angles, cached cos/sin and permutation entries).
    pub fn storage_len(&self) -> usize {
        self.factors
            .iter()
            .map(|f| 3 * f.cos.len() + f.perm.as_ref().map_or(0, Vec::len))
            .sum()
    }

    /// Scalar multiplies performed by one [`apply`](Self::apply).
    pub fn apply_cost(&self) -> usize {
        let mut pairs = 0;
        let mut h = self.padded / 2;
        while h >= 1 {
            for o in (0..self.padded).step_by(2 * h) {
                pairs += (0..h).filter(|i| o + h + i < self.dim).count();
            }
            h /= 2;
        }
        4 * pairs * self.factors.len()
    }

    /// Computes `B x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    /// Computes `Bᵀ x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut out = x.to_vec();
        self.apply_transpose_in_place(&mut out);
        Ok(out)
    }

    /// In-place `B x`; `x.len()` must equal `dim`.
    pub fn apply_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        let mut scratch = Vec::new();
        // (BP)_1 … (BP)_t x: the last factor acts first.
        for f in self.factors.iter().rev() {
            if let Some(p) = &f.perm {
                scratch.clear();
                scratch.extend(p.iter().map(|&j| x[j]));
                x.copy_from_slice(&scratch);
            }
            let mut h = self.padded / 2;
            while h >= 1 {
                self.rotate_layer(f, h, x, 1.0);
                h /= 2;
            }
        }
    }

    /// In-place `Bᵀ x`.
    pub fn apply_transpose_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        let mut scratch = vec![
            0.0;
            if self.factors.iter().any(|f| f.perm.is_some()) {
                self.dim
            } else {
                0
            }
        ];
        for f in &self.factors {
            let mut h = 1;
            while h < self.padded {
                self.rotate_layer(f, h, x, -1.0);
                h *= 2;
            }
            if let Some(p) = &f.perm {
                for (i, &j) in p.iter().enumerate() {
                    scratch[j] = x[i];
                }
                x.copy_from_slice(&scratch);
            }
        }
    }

    #[inline]
    fn rotate_layer(&self, f: &Factor, h: usize, x: &mut [f64], sign: f64) {
        let d = self.dim;
        for o in (0..self.padded).step_by(2 * h) {
            if o + h >= d {
                break;
            }
            let k = o + h - 1;
            let (c, s) = (f.cos[k], sign * f.sin[k]);
            let end = (o + 2 * h).min(d);
            for j in o + h..end {
                let i = j - h;
                let (a, b) = (x[i], x[j]);
                x[i] = c * a - s * b;
                x[j] = s * a + c * b;
            }
        }
    }

    /// Dense `d × d` form, column by column. Intended for tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        let mut m = nalgebra::DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        for j in 0..d {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            self.apply_in_place(&mut e);
            for i in 0..d {
                m[(i, j)] = e[i];
            }
        }
        m
    }
}

/// Angles (in-order tree layout) of the butterfly whose first column is `u`.
///
/// `u` must have power-of-two length and unit norm. Each internal node's
/// angle splits the norm of its block between the two halves; leaves take
/// the full-circle angle of their coordinate pair.
pub fn sphere_angles(u: &[f64]) -> Vec<f64> {
    let p = u.len();
    debug_assert!(p.is_power_of_two());
    let mut angles = vec![0.0; p.saturating_sub(1)];
    fill_angles(u, 0, p, &mut angles);
    angles
}

fn fill_angles(u: &[f64], offset: usize, size: usize, angles: &mut [f64]) {
    if size < 2 {
        return;
    }
    let h = size / 2;
    let norm = |s: &[f64]| s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let left = &u[offset..offset + h];
    let right = &u[offset + h..offset + size];
    angles[offset + h - 1] = if h == 1 {
        right[0].atan2(left[0])
    } else {
        norm(right).atan2(norm(left))
    };
    fill_angles(u, offset, h, angles);
    fill_angles(u, offset + h, h, angles);
}

/// Samples a butterfly operator with a caller-owned RNG (angles from a
/// uniform sphere point, permutations by Fisher–Yates).
pub fn sample_butterfly_with<R: Rng + ?Sized>(
    dim: usize,
    t: usize,
    rng: &mut R,
) -> ButterflyOrthogonal {
    let seed = rng.random::<u64>();
    let mut inner = rng::rng_from_seed(seed);
    ButterflyOrthogonal::sample_from_rng(dim, t, &mut inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn ortho_defect(m: &DMatrix<f64>) -> f64 {
        (m.transpose() * m - DMatrix::identity(m.nrows(), m.ncols())).norm()
    }

    #[test]
    fn size_one_is_identity() {
        let b = ButterflyOrthogonal::sample(1, 7).unwrap();
        assert_eq!(b.apply(&[3.5]).unwrap(), vec![3.5]);
        assert_eq!(b.angles()[0].len(), 0);
    }

    #[test]
    fn size_two_is_a_rotation() {
        let b = ButterflyOrthogonal::from_angles(2, vec![0.3]).unwrap();
        let m = b.to_dense();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let expected = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn size_four_matches_the_printed_product() {
        let (t1, t2, t3) = (0.4, -1.1, 2.3);
        let b = ButterflyOrthogonal::from_angles(4, vec![t1, t2, t3]).unwrap();
        let (c1, s1, c2, s2, c3, s3) = (t1.cos(), t1.sin(), t2.cos(), t2.sin(), t3.cos(), t3.sin());
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            c1 * c2, -s1 * c2, -c1 * s2, s1 * s2,
            s1 * c2, c1 * c2, -s1 * s2, -c1 * s2,
            c3 * s2, -s3 * s2, c3 * c2, -s3 * c2,
            s3 * s2, c3 * s2, s3 * c2, c3 * c2,
        ]);
        assert!((b.to_dense() - expected).norm() < 1e-14);
    }

    #[test]
    fn zero_angles_give_identity() {
        let b = ButterflyOrthogonal::from_angles(16, vec![0.0; 15]).unwrap();
        let x: Vec<f64> = (0..16).map(|i| i as f64 - 3.0).collect();
        assert_eq!(b.apply(&x).unwrap(), x);
    }

    #[test]
    fn first_column_is_the_sphere_point() {
        let mut r = rng::rng_from_seed(11);
        let u = rng::unit_sphere(&mut r, 32);
        let b = ButterflyOrthogonal::from_angles(32, sphere_angles(&u)).unwrap();
        let mut e1 = vec![0.0; 32];
        e1[0] = 1.0;
        let col = b.apply(&e1).unwrap();
        for (a, b) in col.iter().zip(&u) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn orthogonal_for_power_of_two_and_truncated_sizes() {
        for d in [2, 3, 4, 5, 7, 8, 15, 16, 33, 64, 100, 256] {
            let b = ButterflyOrthogonal::sample(d, d as u64).unwrap();
            assert!(ortho_defect(&b.to_dense()) <= 1e-10, "d={d}");
        }
    }

    #[test]
    fn transpose_inverts_apply() {
        for d in [8, 13, 64] {
            let b = ButterflyOrthogonal::sample(d, 99).unwrap();
            let x: Vec<f64> = (0..d).map(|i| (i as f64).sin()).collect();
            let y = b.apply_transpose(&b.apply(&x).unwrap()).unwrap();
            for (a, c) in x.iter().zip(&y) {
                assert!((a - c).abs() < 1e-12);
            }
            let dense = b.to_dense();
            let t = dense.transpose() * nalgebra::DVector::from_vec(x.clone());
            let fast = b.apply_transpose(&x).unwrap();
            for i in 0..d {
                assert!((t[i] - fast[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncated_single_factor_has_zero_columns_but_product_does_not() {
        let d = 15;
        let mut r = rng::rng_from_seed(5);
        let single =
            ButterflyOrthogonal::from_angles(d, sphere_angles(&rng::unit_sphere(&mut r, 16)))
                .unwrap();
        let dense = single.to_dense();
        let deficient = (0..d)
            .filter(|&j| dense.column(j).iter().any(|v| *v == 0.0))
            .count();
        assert!(deficient >= 1);

        let bp = ButterflyOrthogonal::sample(d, 5).unwrap();
        assert_eq!(bp.replications(), 3);
        let dense = bp.to_dense();
        let deficient = (0..d)
            .filter(|&j| dense.column(j).iter().any(|v| *v == 0.0))
            .count();
        assert_eq!(deficient, 0);
    }

    #[test]
    fn storage_is_linear_and_cost_is_d_log_d() {
        for k in 4..12 {
            let d = 1usize << k;
            let b = ButterflyOrthogonal::sample(d, 1).unwrap();
            assert!(b.storage_len() <= 3 * d);
            assert_eq!(b.apply_cost(), 2 * d * k);
        }
    }

    #[test]
    fn same_seed_same_operator() {
        assert_eq!(
            ButterflyOrthogonal::sample(24, 3).unwrap(),
            ButterflyOrthogonal::sample(24, 3).unwrap()
        );
        assert_ne!(
            ButterflyOrthogonal::sample(24, 3).unwrap(),
            ButterflyOrthogonal::sample(24, 4).unwrap()
        );
    }

    #[test]
    fn dimension_errors() {
        assert!(ButterflyOrthogonal::sample(0, 1).is_err());
        let b = ButterflyOrthogonal::sample(4, 1).unwrap();
        assert!(matches!(
            b.apply(&[1.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 3
            })
        ));
    }
}
