use rayon::prelude::*;

use super::rule::{sr33_estimate, SrSample, SrSampler};
use crate::error::check_dim;
use crate::kernels::KernelKind;
use crate::linalg::OrthogonalKind;
use crate::rng;
use crate::{feature_dim, Error, FeatureMapper, Result};

/// Explicit SR(3,3) feature map built from `n` independent rules.
///
/// Each block contributes `2(d+1)` features:
///
/// - Gaussian kernel: `√(d/(d+1))/ρ_j · (cos p_j, sin p_j)` for the `d+1`
///   projections `p_j = ρ_j (Q v_j)ᵀ x̃`. The `±` node pairs collapse
///   because the integrand is even.
/// - Arc-cosine kernels: `√2·a_j·φ(±p_j)` for both signs.
///
/// All block features carry a `1/√n` factor, and the `n` constant weights
/// are pooled into one trailing slot `√(mean(a0²)·f(0))`. The inner product
/// of two mapped points is exactly the block average of the rule values,
/// and the output length is `2n(d+1)+1`.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    kernel: KernelKind,
    dim: usize,
    kind: OrthogonalKind,
    seed: u64,
    blocks: Vec<SrSample>,
    constant: f64,
}

/// Samples `n` SR(3,3) rules (block `i` seeded by child `i` of `seed`) and
/// assembles the explicit map.
pub fn build_feature_map(
    kernel: KernelKind,
    d: usize,
    n: usize,
    seed: u64,
    kind: OrthogonalKind,
) -> Result<FeatureMap> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "number of SR samples must be >= 1".into(),
        ));
    }
    let sampler = SrSampler::new(d, kind)?;
    let blocks = (0..n)
        .map(|i| sampler.sample_seeded(rng::child_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    FeatureMap::from_blocks(kernel, kind, seed, blocks)
}

impl FeatureMap {
    /// Assembles a map from already-sampled rules with real `a0`.
    pub fn from_blocks(
        kernel: KernelKind,
        kind: OrthogonalKind,
        seed: u64,
        blocks: Vec<SrSample>,
    ) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidInput("no SR blocks".into()))?;
        let dim = first.dim();
        for b in &blocks {
            check_dim(dim, b.dim())?;
            if b.a0().is_none() {
                return Err(Error::InvalidInput(
                    "block has negative constant weight; resample its radii".into(),
                ));
            }
        }
        let constant =
            blocks.iter().map(SrSample::constant_weight).sum::<f64>() / blocks.len() as f64;
        Ok(Self {
            kernel,
            dim,
            kind,
            seed,
            blocks,
            constant,
        })
    }

    pub fn kernel(&self) -> &KernelKind {
        &self.kernel
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn n_samples(&self) -> usize {
        self.blocks.len()
    }

    /// `D = 2n(d+1)+1`.
    pub fn feature_dim(&self) -> usize {
        feature_dim(self.dim, self.blocks.len())
    }

    pub fn orthogonal_kind(&self) -> OrthogonalKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn blocks(&self) -> &[SrSample] {
        &self.blocks
    }

    /// Pooled constant weight `mean_k a0_k²`.
    pub fn constant_weight(&self) -> f64 {
        self.constant
    }

    /// Average over blocks of the SR(3,3) rule value for `f_xy`.
    pub fn block_rule_average(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for b in &self.blocks {
            total += sr33_estimate(b, &self.kernel, x, y)?;
        }
        Ok(total / self.blocks.len() as f64)
    }

    /// Maps many points, splitting rows across the rayon pool.
    pub fn map_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.par_iter().map(|r| self.map_point(r)).collect()
    }
}

impl FeatureMapper for FeatureMap {
    fn input_dim(&self) -> usize {
        self.dim
    }

    fn output_dim(&self) -> usize {
        self.feature_dim()
    }

    fn map_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        check_dim(self.output_dim(), out.len())?;
        let d = self.dim;
        let m = d + 1;
        let norm = 1.0 / (self.blocks.len() as f64).sqrt();
        let s = self.kernel.input_scale();
        let mut z = vec![0.0; d];
        let mut proj = vec![0.0; m];
        for (block, chunk) in self.blocks.iter().zip(out.chunks_exact_mut(2 * m)) {
            z.iter_mut().zip(x).for_each(|(zi, xi)| *zi = s * xi);
            block.project_into(&mut z, &mut proj);
            let (lo, hi) = chunk.split_at_mut(m);
            match self.kernel {
                KernelKind::Gaussian { .. } => {
                    let c = (d as f64 / m as f64).sqrt() * norm;
                    for j in 0..m {
                        let w = c / block.rho[j];
                        let (sin, cos) = proj[j].sin_cos();
                        lo[j] = w * cos;
                        hi[j] = w * sin;
                    }
                }
                KernelKind::ArcCos0 | KernelKind::ArcCos1 => {
                    let phi = self.kernel.nonlinearity();
                    for j in 0..m {
                        let w = std::f64::consts::SQRT_2 * block.a[j] * norm;
                        lo[j] = w * phi.eval(proj[j]);
                        hi[j] = w * phi.eval(-proj[j]);
                    }
                }
            }
        }
        let last = out.len() - 1;
        out[last] = (self.constant * self.kernel.integrand_at_zero()).sqrt();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::McEstimate;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn feature_dimension_formula() {
        let m = build_feature_map(
            KernelKind::gaussian_default(4),
            4,
            1,
            0,
            OrthogonalKind::ButterflyBP,
        )
        .unwrap();
        assert_eq!(m.feature_dim(), 11);
        assert_eq!(m.map_point(&[0.1, 0.2, 0.3, 0.4]).unwrap().len(), 11);
        let m = build_feature_map(KernelKind::ArcCos1, 16, 3, 0, OrthogonalKind::HaarQR).unwrap();
        assert_eq!(m.feature_dim(), 103);
    }

    #[test]
    fn gaussian_self_inner_product_is_one_per_map() {
        let x = [0.3, -1.0, 0.2, 0.8, -0.1];
        for seed in 0..30 {
            let m = build_feature_map(
                KernelKind::gaussian(0.4).unwrap(),
                5,
                3,
                seed,
                OrthogonalKind::ButterflyBP,
            )
            .unwrap();
            let f = m.map_point(&x).unwrap();
            assert!((dot(&f, &f) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_vector_self_product_averages_to_one() {
        let d = 6;
        let mut r = rng::rng_from_seed(10);
        let est = McEstimate::from_values((0..1000u64).map(|seed| {
            let x = rng::unit_sphere(&mut r, d);
            let m = build_feature_map(
                KernelKind::gaussian_default(d),
                d,
                1,
                seed,
                OrthogonalKind::HaarQR,
            )
            .unwrap();
            let f = m.map_point(&x).unwrap();
            dot(&f, &f)
        }));
        assert!((est.mean - 1.0).abs() < 1e-12, "{est:?}");
    }

    #[test]
    fn relu_map_of_the_origin_is_zero() {
        let m =
            build_feature_map(KernelKind::ArcCos1, 4, 2, 1, OrthogonalKind::ButterflyBP).unwrap();
        let f = m.map_point(&[0.0; 4]).unwrap();
        assert!(f.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn inner_products_equal_the_block_rule_average() {
        let mut r = rng::rng_from_seed(12);
        let kernels = [
            KernelKind::gaussian_default(8),
            KernelKind::ArcCos0,
            KernelKind::ArcCos1,
        ];
        for (i, k) in kernels.iter().enumerate() {
            for seed in 0..20u64 {
                let kind = if seed % 2 == 0 {
                    OrthogonalKind::ButterflyBP
                } else {
                    OrthogonalKind::HaarQR
                };
                let m = build_feature_map(*k, 8, 3, seed * 31 + i as u64, kind).unwrap();
                let x: Vec<f64> = (0..8).map(|_| rng::standard_normal(&mut r)).collect();
                let y: Vec<f64> = (0..8).map(|_| rng::standard_normal(&mut r)).collect();
                let lhs = dot(&m.map_point(&x).unwrap(), &m.map_point(&y).unwrap());
                let rhs = m.block_rule_average(&x, &y).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                    "{k}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn same_seed_same_map() {
        let x = [0.5, -0.5, 1.5, 0.0, 2.0, 1.0, -1.0];
        let a =
            build_feature_map(KernelKind::ArcCos0, 7, 2, 42, OrthogonalKind::ButterflyBP).unwrap();
        let b =
            build_feature_map(KernelKind::ArcCos0, 7, 2, 42, OrthogonalKind::ButterflyBP).unwrap();
        assert_eq!(a.map_point(&x).unwrap(), b.map_point(&x).unwrap());
    }

    #[test]
    fn errors() {
        assert!(build_feature_map(KernelKind::ArcCos0, 4, 0, 1, OrthogonalKind::HaarQR).is_err());
        let m = build_feature_map(KernelKind::ArcCos0, 4, 1, 1, OrthogonalKind::HaarQR).unwrap();
        assert!(matches!(
            m.map_point(&[1.0; 5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
