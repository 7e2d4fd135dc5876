//! Quadrature-based random features for kernel approximation.
//!
//! Kernels of the form `k(x, y) = E_w[φ(wᵀx) φ(wᵀy)]` with `w ~ N(0, I)` are
//! approximated by averaging stochastic spherical-radial (SR) quadrature rules
//! of degree (3, 3) instead of plain Monte-Carlo sampling. Each rule is built
//! from a randomly rotated regular simplex, where the rotation is either a
//! dense Haar matrix or a butterfly matrix applied in `O(d log d)`.
//!
//! The crate is organised as follows:
//!
//! - [`linalg`]: butterfly and Haar orthogonal operators, the normalized
//!   Walsh–Hadamard transform and regular-simplex vertex sets.
//! - [`kernels`]: exact kernels, their integrands and a Monte-Carlo oracle.
//! - [`quadrature`]: SR(1,1) and SR(3,3) rules and the explicit feature map.
//! - [`baselines`]: G, Gort, ROM and QMC random feature maps.
//! - [`analysis`]: closed-form error bounds and required feature counts.
//! - [`bench`]: datasets, Gram matrices, error reports and timings.
//! - [`cli`]: the `quadfeat` command-line driver.

pub mod analysis;
pub mod baselines;
pub mod bench;
pub mod cli;
mod error;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};

use std::fmt;

/// Anything that maps an input point to an explicit feature vector whose
/// inner products approximate a kernel.
pub trait FeatureMapper: Send + Sync {
    /// Dimension of accepted input points.
    fn input_dim(&self) -> usize;

    /// Length of the vectors produced by [`FeatureMapper::map_into`].
    fn output_dim(&self) -> usize;

    /// Writes the features of `x` into `out` (`out.len() == output_dim()`).
    fn map_into(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.output_dim()];
        self.map_into(x, &mut out)?;
        Ok(out)
    }

    /// Maps every row of `rows` and returns the features row by row.
    fn map_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.map_point(r)).collect()
    }
}

/// Number of features produced by `n` SR(3,3) samples in dimension `d`.
pub fn feature_dim(d: usize, n: usize) -> usize {
    2 * n * (d + 1) + 1
}

/// Methods compared by the benchmark harness and exposed by the CLI.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum Method {
    #[serde(rename = "sr33-butterfly", alias = "sr33")]
    Sr33Butterfly,
    #[serde(rename = "sr33-haar")]
    Sr33Haar,
    #[serde(rename = "g", alias = "G")]
    G,
    #[serde(rename = "gort", alias = "Gort")]
    Gort,
    #[serde(rename = "rom", alias = "ROM")]
    Rom,
    #[serde(rename = "qmc", alias = "QMC")]
    Qmc,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Sr33Butterfly,
        Method::Sr33Haar,
        Method::G,
        Method::Gort,
        Method::Rom,
        Method::Qmc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sr33Butterfly => "sr33-butterfly",
            Method::Sr33Haar => "sr33-haar",
            Method::G => "g",
            Method::Gort => "gort",
            Method::Rom => "rom",
            Method::Qmc => "qmc",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s.to_ascii_lowercase().as_str() {
            "sr33" | "sr33-butterfly" | "sr33-b" => Some(Method::Sr33Butterfly),
            "sr33-haar" | "sr33-qr" => Some(Method::Sr33Haar),
            "g" | "rff" => Some(Method::G),
            "gort" | "orf" => Some(Method::Gort),
            "rom" => Some(Method::Rom),
            "qmc" => Some(Method::Qmc),
            _ => None,
        }
    }

    pub fn is_quadrature(self) -> bool {
        matches!(self, Method::Sr33Butterfly | Method::Sr33Haar)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Builds the feature map of `method` for `kernel` with feature budget `dim`
/// (the `D` shared by every method in a comparison).
///
/// Quadrature methods require `dim == 2n(d+1)+1`; use [`feature_dim`].
pub fn build_mapper(
    method: Method,
    kernel: kernels::KernelKind,
    input_dim: usize,
    dim: usize,
    seed: u64,
) -> Result<Box<dyn FeatureMapper>> {
    use baselines::{build_baseline_map, BaselineKind};
    use linalg::OrthogonalKind;
    use quadrature::build_feature_map;

    let sr_blocks = || -> Result<usize> {
        let block = 2 * (input_dim + 1);
        if dim < block + 1 || !(dim - 1).is_multiple_of(block) {
            return Err(Error::InvalidInput(format!(
                "feature dimension {dim} is not of the form 2n(d+1)+1 for d={input_dim}"
            )));
        }
        Ok((dim - 1) / block)
    };
    Ok(match method {
        Method::Sr33Butterfly => Box::new(build_feature_map(
            kernel,
            input_dim,
            sr_blocks()?,
            seed,
            OrthogonalKind::ButterflyBP,
        )?),
        Method::Sr33Haar => Box::new(build_feature_map(
            kernel,
            input_dim,
            sr_blocks()?,
            seed,
            OrthogonalKind::HaarQR,
        )?),
        Method::G => Box::new(build_baseline_map(
            BaselineKind::G,
            kernel,
            input_dim,
            dim,
            seed,
        )?),
        Method::Gort => Box::new(build_baseline_map(
            BaselineKind::Gort,
            kernel,
            input_dim,
            dim,
            seed,
        )?),
        Method::Rom => Box::new(build_baseline_map(
            BaselineKind::Rom,
            kernel,
            input_dim,
            dim,
            seed,
        )?),
        Method::Qmc => Box::new(build_baseline_map(
            BaselineKind::Qmc,
            kernel,
            input_dim,
            dim,
            seed,
        )?),
    })
}
