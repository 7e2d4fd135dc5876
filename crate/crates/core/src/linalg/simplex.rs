//! Vertices of the regular simplex centred at the origin.
//!
//! The `d + 1` vertices are the centred standard basis of `R^{d+1}`
//! expressed in the Helmert basis of the sum-zero hyperplane and scaled to
//! unit length. Coordinate `k` (1-based) of vertex `j` is
//! `c·h_k[j]` with `h_k = (1, …, 1, -k, 0, …) / √(k(k+1))` and
//! `c = √((d+1)/d)`. The same structure turns all `d + 1` projections
//! `v_jᵀz` into one suffix sum.

use crate::error::check_dim;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVertices {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    // 1 / √(k(k+1)) for k = 1..=dim
    helmert: Vec<f64>,
    scale: f64,
}

/// The deterministic regular simplex with `d + 1` unit vertices in `R^d`.
pub fn simplex_vertices(d: usize) -> Result<SimplexVertices> {
    if d == 0 {
        return Err(Error::InvalidDimension(
            "simplex dimension must be >= 1".into(),
        ));
    }
    let helmert: Vec<f64> = (1..=d)
        .map(|k| 1.0 / ((k * (k + 1)) as f64).sqrt())
        .collect();
    let scale = ((d + 1) as f64 / d as f64).sqrt();
    let vertices = (0..=d)
        .map(|j| {
            (1..=d)
                .map(|k| {
                    let entry = if j < k {
                        helmert[k - 1]
                    } else if j == k {
                        -(k as f64) * helmert[k - 1]
                    } else {
                        0.0
                    };
                    scale * entry
                })
                .collect()
        })
        .collect();
    Ok(SimplexVertices {
        dim: d,
        vertices,
        helmert,
        scale,
    })
}

impl SimplexVertices {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.dim + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, j: usize) -> &[f64] {
        &self.vertices[j]
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// All inner products `v_jᵀ z`, in `O(d)`.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, z.len())?;
        let mut out = vec![0.0; self.dim + 1];
        self.project_into(z, &mut out);
        Ok(out)
    }

    /// Unchecked variant of [`project`](Self::project); `out.len() == d + 1`.
    pub fn project_into(&self, z: &[f64], out: &mut [f64]) {
        let d = self.dim;
        // out[j] = Σ_{k > j} z_k h_k  -  j z_j h_j   (1-based k, 0-based j)
        let mut suffix = 0.0;
        for j in (0..=d).rev() {
            let own = if j >= 1 {
                j as f64 * z[j - 1] * self.helmert[j - 1]
            } else {
                0.0
            };
            out[j] = self.scale * (suffix - own);
            if j >= 1 {
                suffix += z[j - 1] * self.helmert[j - 1];
            }
        }
    }
}
