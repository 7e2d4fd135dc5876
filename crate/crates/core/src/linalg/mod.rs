//! Structured orthogonal operators and regular-simplex vertex sets.

mod butterfly;
mod haar;
mod hadamard;
mod simplex;

pub use butterfly::{
    sample_butterfly_with, sphere_angles, ButterflyOrthogonal, DEFAULT_REPLICATIONS,
};
pub use haar::haar_qr_orthogonal;
pub(crate) use haar::haar_qr_with;
pub use hadamard::{fwht_normalized, fwht_normalized_in_place};
pub use simplex::{simplex_vertices, SimplexVertices};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::rng::SeededRng;
use crate::Result;

/// Samples a butterfly operator for `d` from `seed`.
pub fn sample_butterfly(d: usize, seed: u64) -> Result<ButterflyOrthogonal> {
    ButterflyOrthogonal::sample(d, seed)
}

/// Computes `B x` in `O(d log d)`.
pub fn butterfly_apply(b: &ButterflyOrthogonal, x: &[f64]) -> Result<Vec<f64>> {
    b.apply(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrthogonalKind {
    /// Butterfly matrix; a `(BP)^3` product when `d` is not a power of two.
    #[serde(alias = "butterfly")]
    ButterflyBP,
    /// Dense Haar matrix from a Gaussian QR.
    #[serde(alias = "haar")]
    HaarQR,
}

/// A sampler kind paired with its seed; identical pairs give identical operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthogonalSampler {
    pub kind: OrthogonalKind,
    pub seed: u64,
}

impl OrthogonalSampler {
    pub fn new(kind: OrthogonalKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn sample(&self, d: usize) -> Result<OrthogonalOperator> {
        Ok(match self.kind {
            OrthogonalKind::ButterflyBP => {
                OrthogonalOperator::Butterfly(ButterflyOrthogonal::sample(d, self.seed)?)
            }
            OrthogonalKind::HaarQR => OrthogonalOperator::Dense(haar_qr_orthogonal(d, self.seed)?),
        })
    }
}

/// An orthogonal `d × d` operator, structured or dense.
#[derive(Debug, Clone, PartialEq)]
pub enum OrthogonalOperator {
    Butterfly(ButterflyOrthogonal),
    Dense(DMatrix<f64>),
}

impl OrthogonalOperator {
    pub(crate) fn sample_with(kind: OrthogonalKind, d: usize, rng: &mut SeededRng) -> Self {
        match kind {
            OrthogonalKind::ButterflyBP => {
                OrthogonalOperator::Butterfly(sample_butterfly_with(d, DEFAULT_REPLICATIONS, rng))
            }
            OrthogonalKind::HaarQR => OrthogonalOperator::Dense(haar_qr_with(d, rng)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OrthogonalOperator::Butterfly(b) => b.dim(),
            OrthogonalOperator::Dense(m) => m.nrows(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = x.to_vec();
        self.apply_in_place(&mut out);
        Ok(out)
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut out = x.to_vec();
        self.apply_transpose_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, x: &mut [f64]) {
        match self {
            OrthogonalOperator::Butterfly(b) => b.apply_in_place(x),
            OrthogonalOperator::Dense(m) => {
                let y = m * DVector::from_column_slice(x);
                x.copy_from_slice(y.as_slice());
            }
        }
    }

    pub(crate) fn apply_transpose_in_place(&self, x: &mut [f64]) {
        match self {
            OrthogonalOperator::Butterfly(b) => b.apply_transpose_in_place(x),
            OrthogonalOperator::Dense(m) => {
                let y = m.tr_mul(&DVector::from_column_slice(x));
                x.copy_from_slice(y.as_slice());
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            OrthogonalOperator::Butterfly(b) => b.to_dense(),
            OrthogonalOperator::Dense(m) => m.clone(),
        }
    }
}
