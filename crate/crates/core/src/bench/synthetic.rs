//! Synthetic data generators used by tests and example configs.

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::rng;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SyntheticSpec {
    /// Isotropic Gaussian blobs around `N(0, centre_scale²·I)` centres.
    GaussianClusters {
        n: usize,
        d: usize,
        #[serde(default = "default_clusters")]
        clusters: usize,
        #[serde(default = "default_centre_scale")]
        centre_scale: f64,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Uniform points in `[-1, 1]^d`.
    UniformCube {
        n: usize,
        d: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_clusters() -> usize {
    5
}

fn default_centre_scale() -> f64 {
    1.0
}

fn default_spread() -> f64 {
    0.1
}

impl SyntheticSpec {
    pub fn generate(&self) -> Result<Dataset> {
        match *self {
            SyntheticSpec::GaussianClusters {
                n,
                d,
                clusters,
                centre_scale,
                spread,
                seed,
            } => gaussian_clusters_scaled(n, d, clusters, centre_scale, spread, seed),
            SyntheticSpec::UniformCube { n, d, seed } => uniform_cube(n, d, seed),
        }
    }
}

/// `n` points: a uniformly chosen centre (standard normal coordinates) plus
/// `N(0, spread²·I)` noise. Labels are the cluster indices.
pub fn gaussian_clusters(
    n: usize,
    d: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    gaussian_clusters_scaled(n, d, clusters, 1.0, spread, seed)
}

/// As [`gaussian_clusters`] with centre coordinates drawn from `N(0, centre_scale²)`.
pub fn gaussian_clusters_scaled(
    n: usize,
    d: usize,
    clusters: usize,
    centre_scale: f64,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    let mut r = rng::rng_from_seed(seed);
    let clusters = clusters.max(1);
    let centres: Vec<Vec<f64>> = (0..clusters)
        .map(|_| {
            (0..d)
                .map(|_| centre_scale * rng::standard_normal(&mut r))
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rand::Rng::random_range(&mut r, 0..clusters);
        rows.push(
            centres[c]
                .iter()
                .map(|m| m + spread * rng::standard_normal(&mut r))
                .collect(),
        );
        labels.push(c as f64);
    }
    Dataset::new(format!("gaussian-clusters-d{d}"), rows, Some(labels))
}

pub fn uniform_cube(n: usize, d: usize, seed: u64) -> Result<Dataset> {
    let mut r = rng::rng_from_seed(seed);
    let rows = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| rand::Rng::random_range(&mut r, -1.0..1.0))
                .collect()
        })
        .collect();
    Dataset::new(format!("uniform-cube-d{d}"), rows, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_determinism() {
        let a = gaussian_clusters(30, 4, 3, 0.2, 1).unwrap();
        assert_eq!((a.len(), a.dim()), (30, 4));
        assert_eq!(a, gaussian_clusters(30, 4, 3, 0.2, 1).unwrap());
        let u = uniform_cube(10, 2, 0).unwrap();
        assert!(u.rows.iter().flatten().all(|v| (-1.0..1.0).contains(v)));
    }
}
