//! Orthonormal fast Walsh–Hadamard transform.

use crate::{Error, Result};

/// In-place orthonormal Walsh–Hadamard transform (`H / √n`, Sylvester order).
pub fn fwht_normalized_in_place(x: &mut [f64]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(())
}

pub fn fwht_normalized(x: &[f64]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    fwht_normalized_in_place(&mut out)?;
    Ok(out)
}
