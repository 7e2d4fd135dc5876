use std::time::Instant;

use serde::Serialize;

use crate::kernels::KernelKind;
use crate::rng::{fill_standard_normal, labeled_seed, rng_from_seed};
use crate::{build_mapper, Method, Result};

pub const DEFAULT_REPEATS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingStats {
    pub method: Method,
    pub d: usize,
    pub dim: usize,
    pub batch: usize,
    pub repeats: usize,
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sum of all features of the batch; independent of timing noise.
    pub checksum: f64,
}

/// Times mapping `batch` standard-normal points, `repeats` times after one
/// discarded warm-up pass. Map construction is not timed.
pub fn walltime_mapping(
    method: Method,
    kernel: KernelKind,
    d: usize,
    dim: usize,
    batch: usize,
    repeats: usize,
    seed: u64,
) -> Result<TimingStats> {
    let mapper = build_mapper(method, kernel, d, dim, seed)?;
    let mut r = rng_from_seed(labeled_seed(seed, "walltime-points"));
    let points: Vec<Vec<f64>> = (0..batch)
        .map(|_| {
            let mut p = vec![0.0; d];
            fill_standard_normal(&mut r, &mut p);
            p
        })
        .collect();
    let mut out = vec![0.0; mapper.output_dim()];
    let pass = |out: &mut [f64]| -> Result<f64> {
        let mut sum = 0.0;
        for p in &points {
            mapper.map_into(p, out)?;
            sum += out.iter().sum::<f64>();
        }
        Ok(sum)
    };
    let checksum = pass(&mut out)?;
    let repeats = repeats.max(1);
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        std::hint::black_box(pass(&mut out)?);
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let median = if repeats % 2 == 1 {
        times[repeats / 2]
    } else {
        0.5 * (times[repeats / 2 - 1] + times[repeats / 2])
    };
    Ok(TimingStats {
        method,
        d,
        dim,
        batch,
        repeats,
        median,
        mean: times.iter().sum::<f64>() / repeats as f64,
        min: times[0],
        max: times[repeats - 1],
        checksum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_are_ordered_and_checksum_stable() {
        let k = KernelKind::gaussian_default(8);
        let a = walltime_mapping(Method::Sr33Butterfly, k, 8, 19, 16, 5, 1).unwrap();
        let b = walltime_mapping(Method::Sr33Butterfly, k, 8, 19, 16, 5, 1).unwrap();
        assert!(a.min <= a.median && a.median <= a.max);
        assert_eq!(a.checksum, b.checksum);
        assert_eq!(a.repeats, 5);
    }
}
