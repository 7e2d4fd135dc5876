//! Monte-Carlo and quasi-Monte-Carlo random feature baselines.
//!
//! Every baseline draws a weight matrix `M` with `m` rows and estimates the
//! kernel as an average of `f_xy` over those rows:
//!
//! - `G`: i.i.d. standard normal entries.
//! - `Gort`: stacked `S·Q` blocks, `Q` Haar and `S` diagonal with `χ(d)` entries.
//! - `ROM`: stacked `√p·(H D₁)(H D₂)(H D₃)` blocks with normalized Hadamard
//!   `H` and Rademacher diagonals, inputs zero-padded to `p = 2^⌈log₂ d⌉`.
//! - `QMC`: Halton points pushed through the inverse normal CDF.
//!
//! For a feature budget `D`, the Gaussian kernel uses `m = ⌊D/2⌋` rows and
//! emits `(cos, sin)` pairs; the arc-cosine kernels use `m = D` rows.

mod halton;

pub use halton::{halton_sequence, normal_quantile, radical_inverse, DEFAULT_SKIP, PRIMES};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::kernels::KernelKind;
use crate::linalg::{fwht_normalized_in_place, haar_qr_with};
use crate::rng;
use crate::{Error, FeatureMapper, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    G,
    Gort,
    Rom,
    Qmc,
}

#[derive(Debug, Clone)]
enum Weights {
    Dense(DMatrix<f64>),
    Rom {
        padded: usize,
        signs: Vec<[Vec<f64>; 3]>,
    },
}

#[derive(Debug, Clone)]
pub struct BaselineMap {
    kind: BaselineKind,
    kernel: KernelKind,
    input_dim: usize,
    budget: usize,
    rows: usize,
    weights: Weights,
}

/// Number of weight rows used for a feature budget.
pub fn rows_for_budget(kernel: &KernelKind, budget: usize) -> usize {
    match kernel {
        KernelKind::Gaussian { .. } => budget / 2,
        _ => budget,
    }
}

/// Builds a baseline map with feature budget `budget` (`D`).
pub fn build_baseline_map(
    kind: BaselineKind,
    kernel: KernelKind,
    d: usize,
    budget: usize,
    seed: u64,
) -> Result<BaselineMap> {
    if d == 0 {
        return Err(Error::InvalidDimension(
            "input dimension must be >= 1".into(),
        ));
    }
    let rows = rows_for_budget(&kernel, budget);
    if rows == 0 {
        return Err(Error::InvalidInput(format!(
            "feature budget {budget} is too small for the {} kernel",
            kernel.name()
        )));
    }
    let mut r = rng::rng_from_seed(seed);
    let weights = match kind {
        BaselineKind::G => {
            let mut m = DMatrix::zeros(rows, d);
            for i in 0..rows {
                for j in 0..d {
                    m[(i, j)] = rng::standard_normal(&mut r);
                }
            }
            Weights::Dense(m)
        }
        BaselineKind::Gort => {
            let mut m = DMatrix::zeros(rows, d);
            let mut filled = 0;
            while filled < rows {
                let q = haar_qr_with(d, &mut r);
                for i in 0..d.min(rows - filled) {
                    let norm = rng::chi(&mut r, d);
                    for j in 0..d {
                        m[(filled + i, j)] = norm * q[(i, j)];
                    }
                }
                filled += d.min(rows - filled);
            }
            Weights::Dense(m)
        }
        BaselineKind::Rom => {
            let padded = d.next_power_of_two();
            let blocks = rows.div_ceil(padded);
            let signs = (0..blocks)
                .map(|_| {
                    [
                        rng::rademacher(&mut r, padded),
                        rng::rademacher(&mut r, padded),
                        rng::rademacher(&mut r, padded),
                    ]
                })
                .collect();
            Weights::Rom { padded, signs }
        }
        BaselineKind::Qmc => {
            let pts = halton_sequence(d, rows, DEFAULT_SKIP)?;
            let mut m = DMatrix::zeros(rows, d);
            for (i, p) in pts.iter().enumerate() {
                for (j, u) in p.iter().enumerate() {
                    m[(i, j)] = normal_quantile(*u);
                }
            }
            Weights::Dense(m)
        }
    };
    Ok(BaselineMap {
        kind,
        kernel,
        input_dim: d,
        budget,
        rows,
        weights,
    })
}

impl BaselineMap {
    pub fn kind(&self) -> BaselineKind {
        self.kind
    }

    pub fn kernel(&self) -> &KernelKind {
        &self.kernel
    }

    /// The feature budget `D` this map was built for.
    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Width of the weight matrix: `d`, or the padded size for ROM.
    pub fn weight_dim(&self) -> usize {
        match &self.weights {
            Weights::Dense(_) => self.input_dim,
            Weights::Rom { padded, .. } => *padded,
        }
    }

    /// `M z` for an (already scaled, unpadded) input `z`.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim, z.len())?;
        let mut out = vec![0.0; self.rows];
        self.project_into(z, &mut out);
        Ok(out)
    }

    fn project_into(&self, z: &[f64], out: &mut [f64]) {
        match &self.weights {
            Weights::Dense(m) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = m.row(i).iter().zip(z).map(|(a, b)| a * b).sum();
                }
            }
            Weights::Rom { padded, signs } => {
                let scale = (*padded as f64).sqrt();
                let mut buf = vec![0.0; *padded];
                for (block, chunk) in signs.iter().zip(out.chunks_mut(*padded)) {
                    buf[..z.len()].copy_from_slice(z);
                    buf[z.len()..].iter_mut().for_each(|v| *v = 0.0);
                    for diag in block.iter().rev() {
                        buf.iter_mut().zip(diag).for_each(|(v, s)| *v *= s);
                        fwht_normalized_in_place(&mut buf).expect("padded to a power of two");
                    }
                    for (o, v) in chunk.iter_mut().zip(&buf) {
                        *o = scale * v;
                    }
                }
            }
        }
    }

    /// Dense weight matrix (`rows × weight_dim`). Intended for tests.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        match &self.weights {
            Weights::Dense(m) => m.clone(),
            Weights::Rom { padded, .. } => {
                let p = *padded;
                let mut m = DMatrix::zeros(self.rows, p);
                // columns of M are images of the padded basis vectors
                let probe = Self {
                    input_dim: p,
                    ..self.clone()
                };
                let mut e = vec![0.0; p];
                let mut col = vec![0.0; self.rows];
                for j in 0..p {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[j] = 1.0;
                    probe.project_into(&e, &mut col);
                    for i in 0..self.rows {
                        m[(i, j)] = col[i];
                    }
                }
                m
            }
        }
    }
}

impl FeatureMapper for BaselineMap {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Always the budget `D`; an odd Gaussian budget leaves the last slot zero.
    fn output_dim(&self) -> usize {
        self.budget
    }

    fn map_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.input_dim, x.len())?;
        check_dim(self.output_dim(), out.len())?;
        let s = self.kernel.input_scale();
        let z: Vec<f64> = x.iter().map(|v| v * s).collect();
        let mut proj = vec![0.0; self.rows];
        self.project_into(&z, &mut proj);
        let m = self.rows as f64;
        match self.kernel {
            KernelKind::Gaussian { .. } => {
                let w = 1.0 / m.sqrt();
                let (lo, rest) = out.split_at_mut(self.rows);
                let (hi, spare) = rest.split_at_mut(self.rows);
                spare.iter_mut().for_each(|v| *v = 0.0);
                for ((c, sn), p) in lo.iter_mut().zip(hi.iter_mut()).zip(&proj) {
                    let (sin, cos) = p.sin_cos();
                    *c = w * cos;
                    *sn = w * sin;
                }
            }
            _ => {
                let w = (2.0 / m).sqrt();
                let phi = self.kernel.nonlinearity();
                for (o, p) in out.iter_mut().zip(&proj) {
                    *o = w * phi.eval(*p);
                }
            }
        }
        Ok(())
    }
}
