//! Stochastic spherical-radial quadrature rules and the explicit feature map.
//!
//! The SR(3,3) rule with per-vertex radii reads
//!
//! ```text
//! SR(f) = (1 - Σ_j d/((d+1)ρ_j²))·f(0) + d/(d+1) · Σ_j [f(-ρ_j Q v_j) + f(ρ_j Q v_j)] / (2ρ_j²)
//! ```
//!
//! with `v_j` the `d + 1` regular-simplex vertices, `Q` a random rotation and
//! `ρ_j ~ χ(d+2)`. Every sample integrates polynomials of degree `<= 3`
//! against `N(0, I)` exactly; with a Haar `Q` and unconstrained radii the
//! average of samples is unbiased for any integrand.

mod feature_map;
mod rule;

pub use feature_map::{build_feature_map, FeatureMap};
pub use rule::{
    monomial_exactness_error, radius_sum, sample_sr33, sr11_estimate, sr33_estimate,
    sr33_estimate_even, RadiusMode, RadiusPolicy, SrSample, SrSampler, MAX_RADIUS_ATTEMPTS,
};

use crate::kernels::KernelKind;
use crate::{FeatureMapper, Result};

/// `ψ(x)` for a built feature map.
pub fn map_point(map: &FeatureMap, x: &[f64]) -> Result<Vec<f64>> {
    map.map_point(x)
}

/// Convenience: SR(3,3) estimate averaged over `n` independently seeded samples.
pub fn sr33_average(
    kernel: &KernelKind,
    x: &[f64],
    y: &[f64],
    n: usize,
    seed: u64,
    sampler: &SrSampler,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..n {
        let s = sampler.sample_seeded(crate::rng::child_seed(seed, i as u64))?;
        total += sr33_estimate(&s, kernel, x, y)?;
    }
    Ok(total / n.max(1) as f64)
}
