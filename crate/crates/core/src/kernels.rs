//! Exact kernels and their Gaussian integral representations.
//!
//! Every kernel here satisfies `k(x, y) = E_w[f_xy(w)]` with `w ~ N(0, I)`:
//!
//! | kernel    | φ            | f_xy(w)                               |
//! |-----------|--------------|---------------------------------------|
//! | Gaussian  | (cos, sin)   | cos(wᵀ(x̃ - ỹ)),  x̃ = √(2γ)·x          |
//! | ArcCos0   | Heaviside    | 2·Θ(wᵀx)·Θ(wᵀy)                       |
//! | ArcCos1   | ReLU         | 2·max(0, wᵀx)·max(0, wᵀy)             |
//!
//! The factor 2 of the arc-cosine representations lives in the integrand.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelKind {
    /// `exp(-γ‖x - y‖²)`.
    Gaussian { gamma: f64 },
    /// `1 - θ/π`.
    ArcCos0,
    /// `(‖x‖‖y‖/π)(sin θ + (π - θ) cos θ)`.
    ArcCos1,
}

/// The pointwise nonlinearity paired with each kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseNonlinearity {
    CosSin,
    Heaviside,
    Relu,
}

impl PointwiseNonlinearity {
    /// `φ(0)`; for `CosSin` this is the pair `(1, 0)`, reported by its first component.
    pub fn value_at_zero(self) -> f64 {
        match self {
            PointwiseNonlinearity::CosSin => 1.0,
            PointwiseNonlinearity::Heaviside => 0.5,
            PointwiseNonlinearity::Relu => 0.0,
        }
    }

    /// Scalar nonlinearities only.
    pub fn eval(self, t: f64) -> f64 {
        match self {
            PointwiseNonlinearity::CosSin => {
                panic!("CosSin is vector valued; use cos/sin directly")
            }
            PointwiseNonlinearity::Heaviside => heaviside(t),
            PointwiseNonlinearity::Relu => t.max(0.0),
        }
    }
}

#[inline]
pub fn heaviside(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        0.0
    } else {
        0.5
    }
}

impl KernelKind {
    /// Gaussian kernel with `γ > 0`.
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(KernelKind::Gaussian { gamma })
    }

    /// Gaussian kernel with the default bandwidth `γ = 1/d`.
    pub fn gaussian_default(d: usize) -> Self {
        KernelKind::Gaussian {
            gamma: 1.0 / d.max(1) as f64,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Gaussian { .. } => "gaussian",
            KernelKind::ArcCos0 => "arccos0",
            KernelKind::ArcCos1 => "arccos1",
        }
    }

    pub fn nonlinearity(&self) -> PointwiseNonlinearity {
        match self {
            KernelKind::Gaussian { .. } => PointwiseNonlinearity::CosSin,
            KernelKind::ArcCos0 => PointwiseNonlinearity::Heaviside,
            KernelKind::ArcCos1 => PointwiseNonlinearity::Relu,
        }
    }

    /// Whether `f_xy(w) = f_xy(-w)` for all inputs.
    pub fn is_even(&self) -> bool {
        matches!(self, KernelKind::Gaussian { .. })
    }

    /// Factor applied to inputs before projecting onto `w`.
    pub fn input_scale(&self) -> f64 {
        match self {
            KernelKind::Gaussian { gamma } => (2.0 * gamma).sqrt(),
            _ => 1.0,
        }
    }

    /// `f_xy` evaluated from the projections `a = wᵀx̃`, `b = wᵀỹ`.
    #[inline]
    pub fn integrand_from_projections(&self, a: f64, b: f64) -> f64 {
        match self {
            KernelKind::Gaussian { .. } => a.cos() * b.cos() + a.sin() * b.sin(),
            KernelKind::ArcCos0 => 2.0 * heaviside(a) * heaviside(b),
            KernelKind::ArcCos1 => 2.0 * a.max(0.0) * b.max(0.0),
        }
    }

    /// `f_xy(0)`.
    pub fn integrand_at_zero(&self) -> f64 {
        self.integrand_from_projections(0.0, 0.0)
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelKind::Gaussian { gamma } => write!(f, "gaussian(gamma={gamma})"),
            other => f.write_str(other.name()),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Angle between `x` and `y`, with the cosine clamped to `[-1, 1]`.
fn angle(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let nx = dot(x, x).sqrt();
    let ny = dot(y, y).sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let cos = (dot(x, y) / (nx * ny)).clamp(-1.0, 1.0);
    Ok((cos.acos(), nx, ny))
}

/// Closed-form kernel value.
pub fn kernel_exact(k: &KernelKind, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    match *k {
        KernelKind::Gaussian { gamma } => {
            let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            Ok((-gamma * sq).exp())
        }
        KernelKind::ArcCos0 => {
            let (theta, _, _) = angle(x, y)?;
            Ok(1.0 - theta / PI)
        }
        KernelKind::ArcCos1 => {
            let (theta, nx, ny) = angle(x, y)?;
            Ok(nx * ny / PI * (theta.sin() + (PI - theta) * theta.cos()))
        }
    }
}

/// `f_xy(w)`.
pub fn integrand(k: &KernelKind, x: &[f64], y: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    check_dim(x.len(), w.len())?;
    let s = k.input_scale();
    Ok(k.integrand_from_projections(s * dot(w, x), s * dot(w, y)))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        // Welford
        let (mut n, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
        for v in values {
            n += 1;
            let delta = v - mean;
            mean += delta / n as f64;
            m2 += delta * (v - mean);
        }
        let std_err = if n > 1 {
            (m2 / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_err,
            samples: n,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }
}

/// Plain Monte-Carlo estimate of `E_w[f_xy(w)]` with i.i.d. standard normal `w`.
pub fn mc_oracle(
    k: &KernelKind,
    x: &[f64],
    y: &[f64],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_dim(x.len(), y.len())?;
    if samples == 0 {
        return Err(Error::InvalidInput(
            "mc_oracle needs at least one sample".into(),
        ));
    }
    let mut r = rng::rng_from_seed(seed);
    let mut w = vec![0.0; x.len()];
    let s = k.input_scale();
    Ok(McEstimate::from_values((0..samples).map(|_| {
        rng::fill_standard_normal(&mut r, &mut w);
        k.integrand_from_projections(s * dot(&w, x), s * dot(&w, y))
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [KernelKind; 3] = [
        KernelKind::Gaussian { gamma: 0.3 },
        KernelKind::ArcCos0,
        KernelKind::ArcCos1,
    ];

    #[test]
    fn gaussian_on_the_diagonal_is_one() {
        let k = KernelKind::gaussian(0.7).unwrap();
        assert_eq!(kernel_exact(&k, &[1.0, -2.0], &[1.0, -2.0]).unwrap(), 1.0);
    }

    #[test]
    fn arccos0_of_opposite_vectors_is_zero() {
        let x = [0.3, -1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(kernel_exact(&KernelKind::ArcCos0, &x, &y).unwrap().abs() < 1e-15);
    }

    #[test]
    fn arccos1_of_orthonormal_pair_is_one_over_pi() {
        let v = kernel_exact(&KernelKind::ArcCos1, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((v - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn arccos1_on_the_diagonal_is_the_squared_norm() {
        let x = [0.5, 1.5, -2.0, 0.25];
        let v = kernel_exact(&KernelKind::ArcCos1, &x, &x).unwrap();
        assert!((v - dot(&x, &x)).abs() < 1e-12);
    }

    #[test]
    fn arc_cosine_rejects_zero_vectors() {
        assert!(matches!(
            kernel_exact(&KernelKind::ArcCos0, &[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(
            kernel_exact(&KernelKind::ArcCos1, &[1.0, 0.0], &[0.0, 0.0]),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn clamping_keeps_parallel_vectors_finite() {
        let x = [0.1, 0.2, 0.3];
        let y = [0.3, 0.6, 0.9000000000000001];
        assert!((kernel_exact(&KernelKind::ArcCos0, &x, &y).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn integrand_examples() {
        let g = KernelKind::gaussian(0.5).unwrap();
        assert!(
            (integrand(&g, &[1.0, 2.0], &[1.0, 2.0], &[0.3, -4.0]).unwrap() - 1.0).abs() < 1e-15
        );
        assert_eq!(
            integrand(&KernelKind::ArcCos0, &[1.0, 0.0], &[-1.0, 0.0], &[1.0, 0.0]).unwrap(),
            0.0
        );
        assert_eq!(
            integrand(&KernelKind::ArcCos1, &[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]).unwrap(),
            2.0
        );
        assert_eq!(KernelKind::ArcCos0.integrand_at_zero(), 0.5);
        assert_eq!(KernelKind::ArcCos1.integrand_at_zero(), 0.0);
        assert_eq!(g.integrand_at_zero(), 1.0);
    }

    #[test]
    fn cos_sin_features_reproduce_the_shift_cosine() {
        let mut r = rng::rng_from_seed(17);
        for _ in 0..1000 {
            let a = 10.0 * rng::standard_normal(&mut r);
            let b = 10.0 * rng::standard_normal(&mut r);
            let product = a.cos() * b.cos() + a.sin() * b.sin();
            assert!((product - (a - b).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_is_exact() {
        let x = [0.3, -0.8, 1.1];
        let y = [2.0, 0.1, -0.4];
        for k in ALL {
            assert_eq!(
                kernel_exact(&k, &x, &y).unwrap(),
                kernel_exact(&k, &y, &x).unwrap()
            );
        }
    }

    #[test]
    fn single_sample_oracle_is_the_integrand_at_the_draw() {
        let (x, y) = ([0.2, 0.4], [-0.1, 0.9]);
        for k in ALL {
            let est = mc_oracle(&k, &x, &y, 1, 8).unwrap();
            let mut r = rng::rng_from_seed(8);
            let mut w = vec![0.0; 2];
            rng::fill_standard_normal(&mut r, &mut w);
            assert_eq!(est.mean, integrand(&k, &x, &y, &w).unwrap());
            assert_eq!(est.std_err, 0.0);
        }
    }

    #[test]
    fn oracle_for_arccos0_on_identical_points_is_one() {
        let x = [0.4, -1.2, 0.7];
        let est = mc_oracle(&KernelKind::ArcCos0, &x, &x, 200_000, 1).unwrap();
        assert!(est.covers(1.0, 4.0), "{est:?}");
    }

    #[test]
    fn oracle_agrees_with_gaussian_closed_form_in_four_dimensions() {
        let k = KernelKind::gaussian_default(4);
        let (x, y) = ([0.5, -0.3, 1.2, 0.1], [-0.4, 0.2, 0.6, 1.0]);
        let est = mc_oracle(&k, &x, &y, 1_000_000, 3).unwrap();
        assert!(
            est.covers(kernel_exact(&k, &x, &y).unwrap(), 4.0),
            "{est:?}"
        );
    }

    #[test]
    fn bad_gamma_is_rejected() {
        assert!(KernelKind::gaussian(0.0).is_err());
        assert!(KernelKind::gaussian(f64::NAN).is_err());
        assert!(mc_oracle(&KernelKind::ArcCos0, &[1.0], &[1.0], 0, 1).is_err());
    }
}
