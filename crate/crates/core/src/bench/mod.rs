//! Experiment harness: data ingestion, Gram matrices, approximation-error
//! reports with confidence intervals, and mapping walltimes.

pub mod dataset;
pub mod experiment;
pub mod gram;
pub mod report;
pub mod synthetic;
pub mod timing;

pub use dataset::{load_dataset, parse_csv, parse_libsvm, DataFormat, Dataset};
pub use experiment::{run_experiment, ExperimentConfig, GammaPolicy, KernelChoice, THREADS_ENV};
pub use gram::{gram_approx, gram_exact, gram_from_features, relative_frobenius_error};
pub use report::{mean_ci95, CellSummary, ErrorReport, ErrorRow, REPORT_SCHEMA};
pub use synthetic::{gaussian_clusters, gaussian_clusters_scaled, uniform_cube, SyntheticSpec};
pub use timing::{walltime_mapping, TimingStats, DEFAULT_REPEATS};
