//! Seeded random streams and the samplers shared across modules.
//!
//! All randomness flows from explicit `u64` seeds. Child seeds are derived
//! with a splitmix64 step so that independent components (runs, blocks,
//! methods) get decorrelated streams without a shared global RNG.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One splitmix64 output for state `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed `index` of `parent`: `splitmix64(parent ^ splitmix64(index))`.
pub fn child_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Child seed keyed by a label, used to separate named streams.
pub fn labeled_seed(parent: u64, label: &str) -> u64 {
    // FNV-1a over the label bytes
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    child_seed(parent, h)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out {
        *v = StandardNormal.sample(rng);
    }
}

/// Degrees of freedom up to which χ(k) is drawn as a norm of `k` normals.
pub const CHI_DIRECT_MAX_DOF: usize = 64;

/// Draws from the χ distribution with `dof` degrees of freedom.
pub fn chi<R: Rng + ?Sized>(rng: &mut R, dof: usize) -> f64 {
    assert!(
        dof >= 1,
        "chi distribution needs at least one degree of freedom"
    );
    if dof <= CHI_DIRECT_MAX_DOF {
        let mut s = 0.0;
        for _ in 0..dof {
            let z: f64 = StandardNormal.sample(rng);
            s += z * z;
        }
        s.sqrt()
    } else {
        let chi2 = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        chi2.sample(rng).sqrt()
    }
}

/// Uniform point on the unit sphere in `R^dim`.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let mut u = vec![0.0; dim];
        fill_standard_normal(rng, &mut u);
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            u.iter_mut().for_each(|v| *v /= norm);
            return u;
        }
    }
}

/// Uniform random permutation of `0..n` (Fisher–Yates).
pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

/// Independent ±1 entries with probability 1/2 each.
pub fn rademacher<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_moments_match_on_both_sides_of_the_switch() {
        // E[χ_k²] = k
        for dof in [3usize, 10, 64, 65, 200] {
            let mut rng = rng_from_seed(dof as u64);
            let n = 40_000;
            let mean_sq = (0..n).map(|_| chi(&mut rng, dof).powi(2)).sum::<f64>() / n as f64;
            let se = (2.0 * dof as f64 / n as f64).sqrt();
            assert!(
                (mean_sq - dof as f64).abs() < 5.0 * se,
                "dof={dof} mean={mean_sq}"
            );
        }
    }

    #[test]
    fn permutation_is_a_bijection() {
        let mut rng = rng_from_seed(3);
        let mut p = permutation(&mut rng, 100);
        p.sort_unstable();
        assert_eq!(p, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn child_seeds_differ() {
        assert_ne!(child_seed(1, 0), child_seed(1, 1));
        assert_ne!(child_seed(1, 0), child_seed(2, 0));
        assert_eq!(labeled_seed(9, "g"), labeled_seed(9, "g"));
        assert_ne!(labeled_seed(9, "g"), labeled_seed(9, "gort"));
    }
}
