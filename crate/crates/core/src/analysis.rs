//! Closed-form error bounds for quadrature-based and RFF feature maps.
//!
//! The uniform-error bound over a compact set of diameter `l` reads
//!
//! ```text
//! P(sup |k̂ - k| >= ε) <= β_d (σ_p l κ μ / ε)^{2d/(d+1)} exp(-D ε² / (8 M² (d+1)))
//! ```
//!
//! which gives the feature counts computed below. Everything is evaluated in
//! log space.

use crate::{Error, Result};

/// Inputs shared by the required-feature-count bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub d: usize,
    pub eps: f64,
    pub delta: f64,
    /// Diameter of the input domain.
    pub l: f64,
    /// Spectral scale of the kernel.
    pub sigma_p: f64,
    /// Bound on `|φ|`.
    pub kappa: f64,
    /// Bound on `|φ'|`.
    pub mu: f64,
    /// Bound on `|(1 - f_xy(ρz))/ρ²|`.
    pub m: f64,
    /// KRR regularization ratio `λ/n`.
    pub lambda0: f64,
    /// `√(Σ y²/n)` of the centred training labels.
    pub sigma_y: f64,
}

impl BoundInputs {
    /// Gaussian-kernel constants: `M = 1/2`, `κ = μ = 1`.
    pub fn rbf(d: usize, eps: f64, delta: f64, sigma_p: f64, l: f64) -> Self {
        Self {
            d,
            eps,
            delta,
            l,
            sigma_p,
            kappa: 1.0,
            mu: 1.0,
            m: 0.5,
            lambda0: 1.0,
            sigma_y: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be >= 1".into()));
        }
        let named = [
            ("eps", self.eps),
            ("delta", self.delta),
            ("l", self.l),
            ("sigma_p", self.sigma_p),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("M", self.m),
            ("lambda0", self.lambda0),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.delta >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "delta must be < 1, got {}",
                self.delta
            )));
        }
        if !(self.sigma_y >= 0.0 && self.sigma_y.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sigma_y must be nonnegative, got {}",
                self.sigma_y
            )));
        }
        Ok(())
    }
}

/// Required feature count with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    /// Smallest integer `D` meeting the bound; 0 when the bound is vacuous.
    pub required_d: u64,
    /// Exact real-valued right-hand side (may be negative).
    pub value: f64,
    /// The bracketed logarithmic term.
    pub bracket: f64,
    pub beta_d: f64,
    /// The bracket is not positive, so any `D` satisfies the bound.
    pub vacuous: bool,
    /// Degenerate inputs (e.g. `σ_y = 0`) make the requirement trivially 0.
    pub degenerate: bool,
}

impl BoundResult {
    fn new(prefactor: f64, bracket: f64, beta_d: f64) -> Self {
        let value = prefactor * bracket;
        let vacuous = bracket <= 0.0;
        let required_d = if vacuous { 0 } else { value.ceil() as u64 };
        BoundResult {
            required_d,
            value,
            bracket,
            beta_d,
            vacuous,
            degenerate: false,
        }
    }
}

/// `ln β_d`, with `β_d = (d^{-d/(d+1)} + d^{1/(d+1)}) 2^{(6d+1)/(d+1)} (d/(d+1))^{d/(d+1)}`.
pub fn ln_beta_d(d: usize) -> f64 {
    let d = d as f64;
    let r = d / (d + 1.0);
    let ln_d = d.ln();
    // ln(d^{-r} + d^{1/(d+1)}) = (1/(d+1)) ln d + ln(1 + d^{-1})
    let first = ln_d / (d + 1.0) + (1.0 / d).ln_1p();
    first + (6.0 * d + 1.0) / (d + 1.0) * std::f64::consts::LN_2 + r * (r.ln())
}

pub fn beta_d(d: usize) -> f64 {
    ln_beta_d(d).exp()
}

fn dim_exponent(d: usize) -> f64 {
    2.0 / (1.0 + 1.0 / d as f64)
}

/// `D >= (8M²(d+1)/ε²)[ (2/(1+1/d)) ln(σ_p l κ μ/ε) + ln(β_d/δ) ]`.
pub fn required_d_quadrature(b: &BoundInputs) -> Result<BoundResult> {
    b.validate()?;
    let d = b.d as f64;
    let ln_ratio = b.sigma_p.ln() + b.l.ln() + b.kappa.ln() + b.mu.ln() - b.eps.ln();
    let bracket = dim_exponent(b.d) * ln_ratio + ln_beta_d(b.d) - b.delta.ln();
    let prefactor = 8.0 * b.m * b.m * (d + 1.0) / (b.eps * b.eps);
    Ok(BoundResult::new(prefactor, bracket, beta_d(b.d)))
}

/// RFF requirement:
/// `D >= (8(d+1)/ε²)[ (2/(1+1/d)) ln(σ_p l/ε) + ln(β_d/δ) + (d/(d+1)) ln((3d+3)/(2d)) ]`.
pub fn required_d_rff(b: &BoundInputs) -> Result<BoundResult> {
    b.validate()?;
    let d = b.d as f64;
    let ln_ratio = b.sigma_p.ln() + b.l.ln() - b.eps.ln();
    let bracket = dim_exponent(b.d) * ln_ratio + ln_beta_d(b.d) - b.delta.ln()
        + d / (d + 1.0) * ((3.0 * d + 3.0) / (2.0 * d)).ln();
    let prefactor = 8.0 * (d + 1.0) / (b.eps * b.eps);
    Ok(BoundResult::new(prefactor, bracket, beta_d(b.d)))
}

/// Requirement for a kernel-ridge-regression prediction error of at most `ε`:
/// the quadrature bound at the kernel tolerance `λ₀² ε / (σ_y (λ₀ + 1))`.
pub fn required_d_krr(b: &BoundInputs) -> Result<BoundResult> {
    b.validate()?;
    if b.sigma_y == 0.0 {
        return Ok(BoundResult {
            required_d: 0,
            value: 0.0,
            bracket: f64::NEG_INFINITY,
            beta_d: beta_d(b.d),
            vacuous: false,
            degenerate: true,
        });
    }
    let d = b.d as f64;
    let growth = (b.lambda0 + 1.0) / (b.lambda0 * b.lambda0 * b.eps);
    let ln_ratio =
        b.sigma_y.ln() + b.sigma_p.ln() + b.l.ln() + b.kappa.ln() + b.mu.ln() + growth.ln();
    let bracket = dim_exponent(b.d) * ln_ratio + ln_beta_d(b.d) - b.delta.ln();
    let prefactor = 8.0 * b.m * b.m * (d + 1.0) * b.sigma_y * b.sigma_y * growth * growth;
    Ok(BoundResult::new(prefactor, bracket, beta_d(b.d)))
}

/// Variance bound `(2 + κ⁴ + κ²) / (n (d - 2))` for the average of `n` SR(3,3) samples.
pub fn variance_bound_sr33(d: usize, n: usize, kappa: f64) -> Result<f64> {
    if d <= 2 {
        return Err(Error::InvalidDimension(format!(
            "variance bound needs d > 2, got {d}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let k2 = kappa * kappa;
    Ok((2.0 + k2 * k2 + k2) / (n as f64 * (d as f64 - 2.0)))
}
