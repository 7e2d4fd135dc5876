use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::gram::{gram_exact, gram_from_features, relative_frobenius_error};
use super::report::{ErrorReport, ErrorRow};
use crate::kernels::KernelKind;
use crate::rng::{child_seed, labeled_seed};
use crate::{build_mapper, feature_dim, Error, Method, Result};

/// Environment variable capping the worker count of experiment runs.
pub const THREADS_ENV: &str = "QUADFEAT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelChoice {
    Gaussian,
    ArcCos0,
    ArcCos1,
}

impl KernelChoice {
    pub fn resolve(self, d: usize, gamma: GammaPolicy) -> Result<KernelKind> {
        Ok(match self {
            KernelChoice::Gaussian => match gamma {
                GammaPolicy::InverseDim => KernelKind::gaussian_default(d),
                GammaPolicy::Explicit(g) => KernelKind::gaussian(g)?,
            },
            KernelChoice::ArcCos0 => KernelKind::ArcCos0,
            KernelChoice::ArcCos1 => KernelKind::ArcCos1,
        })
    }
}

/// Gaussian bandwidth: `1/d` or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaPolicy {
    #[default]
    InverseDim,
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kernels: Vec<KernelChoice>,
    pub methods: Vec<Method>,
    /// SR sample counts; every method in a cell gets `D = 2n(d+1)+1`.
    pub n_values: Vec<usize>,
    pub subset_size: usize,
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub gamma: GammaPolicy,
}

impl ExperimentConfig {
    pub fn validate(&self, data: &Dataset) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidInput(m));
        if self.kernels.is_empty() {
            return fail("kernels: at least one kernel is required".into());
        }
        if self.methods.is_empty() {
            return fail("methods: at least one method is required".into());
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return fail("n_values: must be a non-empty list of positive integers".into());
        }
        if self.runs == 0 {
            return fail("runs: must be >= 1".into());
        }
        if self.subset_size < 2 || self.subset_size > data.len() {
            return fail(format!(
                "subset_size: must lie in [2, {}], got {}",
                data.len(),
                self.subset_size
            ));
        }
        if self.methods.iter().any(|m| m.is_quadrature()) && data.dim() < 3 {
            return fail(format!(
                "quadrature methods need d >= 3, data has d = {}",
                data.dim()
            ));
        }
        Ok(())
    }
}

/// Seed of the row subset used by run `run`.
pub fn subset_seed(master: u64, run: usize) -> u64 {
    child_seed(labeled_seed(master, "subset"), run as u64)
}

/// Seed of the feature map of one (kernel, method, n, run) cell.
pub fn map_seed(master: u64, kernel: &str, method: Method, n: usize, run: usize) -> u64 {
    child_seed(
        labeled_seed(master, &format!("{kernel}/{method}/{n}")),
        run as u64,
    )
}

/// Runs `f` on a pool capped by `QUADFEAT_THREADS` when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, data: &Dataset) -> Result<ErrorReport> {
    cfg.validate(data)?;
    let d = data.dim();
    let kernels = cfg
        .kernels
        .iter()
        .map(|k| k.resolve(d, cfg.gamma))
        .collect::<Result<Vec<_>>>()?;

    let per_run = |run: usize| -> Result<Vec<ErrorRow>> {
        let idx = data.subset_indices(cfg.subset_size, subset_seed(cfg.seed, run))?;
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| data.rows[i].clone()).collect();
        let mut out = Vec::new();
        for kernel in &kernels {
            let exact = gram_exact(kernel, &rows)?;
            for &method in &cfg.methods {
                for &n in &cfg.n_values {
                    let dim = feature_dim(d, n);
                    let mapper = build_mapper(
                        method,
                        *kernel,
                        d,
                        dim,
                        map_seed(cfg.seed, kernel.name(), method, n, run),
                    )?;
                    if mapper.output_dim() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            got: mapper.output_dim(),
                        });
                    }
                    let start = Instant::now();
                    let features = mapper.map_rows(&rows)?;
                    let map_seconds = start.elapsed().as_secs_f64();
                    let start = Instant::now();
                    let approx = gram_from_features(&features)?;
                    let gram_seconds = start.elapsed().as_secs_f64();
                    out.push(ErrorRow {
                        dataset: data.name.clone(),
                        kernel: kernel.name().to_string(),
                        method,
                        n,
                        dim,
                        run,
                        error: relative_frobenius_error(&exact, &approx)?,
                        map_seconds,
                        gram_seconds,
                    });
                }
            }
        }
        Ok(out)
    };

    let results: Vec<Result<Vec<ErrorRow>>> =
        with_thread_cap(|| (0..cfg.runs).into_par_iter().map(per_run).collect())?;
    let mut rows =
        Vec::with_capacity(cfg.runs * kernels.len() * cfg.methods.len() * cfg.n_values.len());
    for r in results {
        rows.extend(r?);
    }
    let order = |r: &ErrorRow| {
        (
            cfg.kernels
                .iter()
                .position(|k| kernels_name(*k) == r.kernel)
                .unwrap_or(usize::MAX),
            cfg.methods
                .iter()
                .position(|m| *m == r.method)
                .unwrap_or(usize::MAX),
            cfg.n_values
                .iter()
                .position(|n| *n == r.n)
                .unwrap_or(usize::MAX),
            r.run,
        )
    };
    rows.sort_by_key(order);
    Ok(ErrorReport::from_rows(rows))
}

fn kernels_name(k: KernelChoice) -> &'static str {
    match k {
        KernelChoice::Gaussian => "gaussian",
        KernelChoice::ArcCos0 => "arccos0",
        KernelChoice::ArcCos1 => "arccos1",
    }
}
