use std::sync::Arc;

use crate::error::check_dim;
use crate::kernels::KernelKind;
use crate::linalg::{simplex_vertices, OrthogonalKind, OrthogonalOperator, SimplexVertices};
use crate::rng::{self, SeededRng};
use crate::{Error, Result};

/// Upper bound on radius-vector draws before sampling gives up.
pub const MAX_RADIUS_ATTEMPTS: usize = 1000;

/// How radii are attached to the simplex vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusMode {
    /// Independent `ρ_j ~ χ(d+2)` for every vertex.
    #[default]
    PerVertex,
    /// One `ρ ~ χ(d+2)` shared by all vertices.
    Shared,
}

/// What to do when the constant weight `a0² = 1 - Σ_j d/((d+1)ρ_j²)` is negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusPolicy {
    /// Redraw the whole radius vector until `a0² >= 0`. Required for an
    /// explicit real feature map; conditioning on acceptance biases the rule.
    #[default]
    Resample,
    /// Keep the first draw. The rule is then an unbiased estimate of the
    /// Gaussian integral, but `a0` may be imaginary.
    Unconstrained,
}

/// `Σ_j d / ((d+1) ρ_j²)`.
pub fn radius_sum(d: usize, rho: &[f64]) -> f64 {
    let c = d as f64 / (d + 1) as f64;
    rho.iter().map(|r| c / (r * r)).sum()
}

/// One sampled SR(3,3) rule: rotation, radii and derived weights.
#[derive(Debug, Clone)]
pub struct SrSample {
    pub(crate) q: OrthogonalOperator,
    pub(crate) rho: Vec<f64>,
    pub(crate) a0_sq: f64,
    pub(crate) a: Vec<f64>,
    pub(crate) draws: usize,
    pub(crate) simplex: Arc<SimplexVertices>,
}

impl SrSample {
    /// Assembles a sample from explicit parts (radii must be positive).
    pub fn from_parts(q: OrthogonalOperator, rho: Vec<f64>) -> Result<Self> {
        let d = q.dim();
        if d < 1 {
            return Err(Error::InvalidDimension("empty rotation".into()));
        }
        check_dim(d + 1, rho.len())?;
        if rho.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidInput(
                "radii must be positive and finite".into(),
            ));
        }
        let simplex = Arc::new(simplex_vertices(d)?);
        Ok(Self::assemble(q, rho, 1, simplex))
    }

    fn assemble(
        q: OrthogonalOperator,
        rho: Vec<f64>,
        draws: usize,
        simplex: Arc<SimplexVertices>,
    ) -> Self {
        let d = q.dim();
        let a0_sq = 1.0 - radius_sum(d, &rho);
        let scale = (d as f64 / (2 * (d + 1)) as f64).sqrt();
        let a = rho.iter().map(|r| scale / r).collect();
        SrSample {
            q,
            rho,
            a0_sq,
            a,
            draws,
            simplex,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn rotation(&self) -> &OrthogonalOperator {
        &self.q
    }

    pub fn radii(&self) -> &[f64] {
        &self.rho
    }

    /// Coefficient of `f(0)` in the rule, `a0²`. Negative only for
    /// [`RadiusPolicy::Unconstrained`] samples.
    pub fn constant_weight(&self) -> f64 {
        self.a0_sq
    }

    /// `a0`, when real.
    pub fn a0(&self) -> Option<f64> {
        (self.a0_sq >= 0.0).then(|| self.a0_sq.sqrt())
    }

    /// Feature weights `a_j = (1/ρ_j)·√(d/(2(d+1)))`.
    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    /// Radius vectors drawn to obtain this sample (1 if the first was accepted).
    pub fn draws(&self) -> usize {
        self.draws
    }

    /// Quadrature nodes `ρ_j Q v_j` (the `+` half; the rule also uses their negatives).
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        self.simplex
            .vertices()
            .iter()
            .zip(&self.rho)
            .map(|(v, r)| {
                let mut w = v.clone();
                self.q.apply_in_place(&mut w);
                w.iter_mut().for_each(|c| *c *= r);
                w
            })
            .collect()
    }

    /// `ρ_j (Q v_j)ᵀ z` for every vertex, via one `Qᵀ z` and the simplex suffix sum.
    pub fn projections(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), z.len())?;
        let mut out = vec![0.0; self.dim() + 1];
        let mut scratch = z.to_vec();
        self.project_into(&mut scratch, &mut out);
        Ok(out)
    }

    /// `z` is overwritten with `Qᵀ z`.
    pub(crate) fn project_into(&self, z: &mut [f64], out: &mut [f64]) {
        self.q.apply_transpose_in_place(z);
        self.simplex.project_into(z, out);
        for (o, r) in out.iter_mut().zip(&self.rho) {
            *o *= r;
        }
    }

    /// Every node of the rule with its weight: the origin, then `±ρ_j Q v_j`.
    pub fn weighted_nodes(&self) -> Vec<(f64, Vec<f64>)> {
        let d = self.dim();
        let c = d as f64 / (d + 1) as f64;
        let mut out = vec![(self.a0_sq, vec![0.0; d])];
        for (w, r) in self.nodes().into_iter().zip(&self.rho) {
            let weight = c / (2.0 * r * r);
            let neg = w.iter().map(|v| -v).collect();
            out.push((weight, w));
            out.push((weight, neg));
        }
        out
    }

    /// Rule value for an arbitrary integrand `f`.
    pub fn rule_value(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let d = self.dim();
        let zero = vec![0.0; d];
        let mut total = self.a0_sq * f(&zero);
        let c = d as f64 / (d + 1) as f64;
        for (w, r) in self.nodes().into_iter().zip(&self.rho) {
            let neg: Vec<f64> = w.iter().map(|v| -v).collect();
            total += c * (f(&w) + f(&neg)) / (2.0 * r * r);
        }
        total
    }
}

/// Largest deviation of the rule from the standard-Gaussian moments
/// `E[w_i]`, `E[w_i w_j] = δ_ij`, `E[w_i w_j w_k] = 0` and `E[1] = 1`, over all
/// monomials of degree `<= 3`.
pub fn monomial_exactness_error(sample: &SrSample) -> f64 {
    let d = sample.dim();
    let nodes = sample.weighted_nodes();
    let mut worst = (nodes.iter().map(|(w, _)| w).sum::<f64>() - 1.0).abs();
    for i in 0..d {
        let m1: f64 = nodes.iter().map(|(w, x)| w * x[i]).sum();
        worst = worst.max(m1.abs());
        for j in i..d {
            let m2: f64 = nodes.iter().map(|(w, x)| w * x[i] * x[j]).sum();
            worst = worst.max((m2 - if i == j { 1.0 } else { 0.0 }).abs());
            for k in j..d {
                let m3: f64 = nodes.iter().map(|(w, x)| w * x[i] * x[j] * x[k]).sum();
                worst = worst.max(m3.abs());
            }
        }
    }
    worst
}

/// Builder for SR(3,3) samples in a fixed dimension.
#[derive(Debug, Clone)]
pub struct SrSampler {
    dim: usize,
    kind: OrthogonalKind,
    mode: RadiusMode,
    policy: RadiusPolicy,
    simplex: Arc<SimplexVertices>,
}

impl SrSampler {
    /// Requires `d >= 3`; the rule's variance has a `(d - 2)` pole.
    pub fn new(dim: usize, kind: OrthogonalKind) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidDimension(format!(
                "SR(3,3) rules need d >= 3, got {dim}"
            )));
        }
        Ok(Self {
            dim,
            kind,
            mode: RadiusMode::default(),
            policy: RadiusPolicy::default(),
            simplex: Arc::new(simplex_vertices(dim)?),
        })
    }

    pub fn with_radius_mode(mut self, mode: RadiusMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_policy(mut self, policy: RadiusPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn simplex(&self) -> &SimplexVertices {
        &self.simplex
    }

    /// One radius vector without any acceptance step.
    pub fn draw_radii(&self, rng: &mut SeededRng) -> Vec<f64> {
        let dof = self.dim + 2;
        match self.mode {
            RadiusMode::PerVertex => (0..=self.dim).map(|_| rng::chi(rng, dof)).collect(),
            RadiusMode::Shared => vec![rng::chi(rng, dof); self.dim + 1],
        }
    }

    /// Radii per the configured policy, with the number of draws used.
    pub fn sample_radii(&self, rng: &mut SeededRng) -> Result<(Vec<f64>, usize)> {
        for attempt in 1..=MAX_RADIUS_ATTEMPTS {
            let rho = self.draw_radii(rng);
            if self.policy == RadiusPolicy::Unconstrained || radius_sum(self.dim, &rho) <= 1.0 {
                return Ok((rho, attempt));
            }
        }
        Err(Error::SamplingFailure(MAX_RADIUS_ATTEMPTS))
    }

    pub fn sample(&self, rng: &mut SeededRng) -> Result<SrSample> {
        let (rho, draws) = self.sample_radii(rng)?;
        let q = OrthogonalOperator::sample_with(self.kind, self.dim, rng);
        Ok(SrSample::assemble(q, rho, draws, Arc::clone(&self.simplex)))
    }

    pub fn sample_seeded(&self, seed: u64) -> Result<SrSample> {
        self.sample(&mut rng::rng_from_seed(seed))
    }
}

/// Samples one SR(3,3) rule with per-vertex radii, resampled until `a0² >= 0`.
pub fn sample_sr33(d: usize, seed: u64, kind: OrthogonalKind) -> Result<SrSample> {
    SrSampler::new(d, kind)?.sample_seeded(seed)
}

fn scaled_projections(
    sample: &SrSample,
    k: &KernelKind,
    x: &[f64],
    y: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(sample.dim(), x.len())?;
    check_dim(sample.dim(), y.len())?;
    let s = k.input_scale();
    let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
    let ys: Vec<f64> = y.iter().map(|v| v * s).collect();
    Ok((sample.projections(&xs)?, sample.projections(&ys)?))
}

/// SR(3,3) estimate of `k(x, y)`:
/// `a0²·f(0) + (d/(d+1)) Σ_j [f(-ρ_j Q v_j) + f(ρ_j Q v_j)] / (2ρ_j²)`.
pub fn sr33_estimate(sample: &SrSample, k: &KernelKind, x: &[f64], y: &[f64]) -> Result<f64> {
    let (px, py) = scaled_projections(sample, k, x, y)?;
    let d = sample.dim();
    let c = d as f64 / (d + 1) as f64;
    let mut total = sample.a0_sq * k.integrand_at_zero();
    for ((a, b), r) in px.iter().zip(&py).zip(&sample.rho) {
        let sym = k.integrand_from_projections(*a, *b) + k.integrand_from_projections(-a, -b);
        total += c * sym / (2.0 * r * r);
    }
    Ok(total)
}

/// Reduced rule for even integrands: `a0²·f(0) + (d/(d+1)) Σ_j f(ρ_j Q v_j)/ρ_j²`.
pub fn sr33_estimate_even(sample: &SrSample, k: &KernelKind, x: &[f64], y: &[f64]) -> Result<f64> {
    if !k.is_even() {
        return Err(Error::Misuse(format!(
            "the reduced rule needs an even integrand; {} is not even",
            k.name()
        )));
    }
    let (px, py) = scaled_projections(sample, k, x, y)?;
    let d = sample.dim();
    let c = d as f64 / (d + 1) as f64;
    let mut total = sample.a0_sq * k.integrand_at_zero();
    for ((a, b), r) in px.iter().zip(&py).zip(&sample.rho) {
        total += c * k.integrand_from_projections(*a, *b) / (r * r);
    }
    Ok(total)
}

/// SR(1,1) rule: the integrand at one standard normal draw (one RFF sample).
pub fn sr11_estimate(d: usize, seed: u64, k: &KernelKind, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(d, x.len())?;
    check_dim(d, y.len())?;
    let mut r = rng::rng_from_seed(seed);
    let mut w = vec![0.0; d];
    rng::fill_standard_normal(&mut r, &mut w);
    crate::kernels::integrand(k, x, y, &w)
}
