//! The `quadfeat` command-line driver.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{self, BoundInputs};
use crate::bench::{
    load_dataset, run_experiment, walltime_mapping, DataFormat, Dataset, ExperimentConfig,
    SyntheticSpec, DEFAULT_REPEATS,
};
use crate::kernels::KernelKind;
use crate::linalg::{fwht_normalized, simplex_vertices, OrthogonalKind, OrthogonalSampler};
use crate::quadrature::{
    build_feature_map, monomial_exactness_error, sr33_estimate, sr33_estimate_even, SrSampler,
};
use crate::rng::{child_seed, fill_standard_normal, labeled_seed, rng_from_seed};
use crate::{build_mapper, feature_dim, Error, FeatureMapper, Method};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "quadfeat",
    version,
    about = "Quadrature-based random features for kernel approximation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Export the feature matrix of a dataset as CSV.
    Map(MapArgs),
    /// Kernel approximation error experiment driven by a JSON config.
    ApproxError(ApproxErrorArgs),
    /// Time the mapping of a batch of random points.
    Walltime(WalltimeArgs),
    /// Evaluate a closed-form error bound.
    Bound(BoundArgs),
    /// Run the fast invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Arccos0,
    Arccos1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Libsvm,
}

impl From<FormatArg> for DataFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => DataFormat::Csv,
            FormatArg::Libsvm => DataFormat::Libsvm,
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
        format!("unknown method {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Args)]
struct FeatureArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    /// Gaussian bandwidth; defaults to 1/d.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_parser = parse_method, default_value = "sr33-butterfly")]
    method: Method,
    /// Number of SR samples; sets D = 2n(d+1)+1.
    #[arg(long, conflicts_with = "dim")]
    n: Option<usize>,
    /// Output feature dimension D.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    standardize: bool,
    #[command(flatten)]
    features: FeatureArgs,
    /// Feature CSV path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApproxErrorArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` of the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WalltimeArgs {
    #[command(flatten)]
    features: FeatureArgs,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    batch: usize,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    /// Also write the statistics as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundProp {
    #[value(name = "quadrature", alias = "3.1-quad")]
    Quadrature,
    #[value(name = "rff", alias = "3.1-rff")]
    Rff,
    Krr,
    Variance,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    prop: BoundProp,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Diameter of the input domain.
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_p: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long = "m", default_value_t = 0.5)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_y: f64,
    /// SR samples, for `variance`.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Map(a) => cmd_map(a),
        Command::ApproxError(a) => cmd_approx_error(a),
        Command::Walltime(a) => cmd_walltime(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Selftest(a) => cmd_selftest(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn resolve_kernel(k: KernelArg, gamma: Option<f64>, d: usize) -> CliResult<KernelKind> {
    match (k, gamma) {
        (KernelArg::Gaussian, None) => Ok(KernelKind::gaussian_default(d)),
        (KernelArg::Gaussian, Some(g)) => {
            KernelKind::gaussian(g).map_err(|e| CliError::Usage(e.to_string()))
        }
        (_, Some(_)) => Err(CliError::Usage(
            "--gamma only applies to the gaussian kernel".into(),
        )),
        (KernelArg::Arccos0, None) => Ok(KernelKind::ArcCos0),
        (KernelArg::Arccos1, None) => Ok(KernelKind::ArcCos1),
    }
}

/// Output dimension from `--n` or `--dim`, checked against the method.
fn resolve_dim(f: &FeatureArgs, d: usize) -> CliResult<usize> {
    let dim = match (f.n, f.dim) {
        (Some(0), _) => return Err(CliError::Usage("--n must be >= 1".into())),
        (Some(n), _) => feature_dim(d, n),
        (None, Some(0)) => return Err(CliError::Usage("--dim must be >= 1".into())),
        (None, Some(dim)) => dim,
        (None, None) => return Err(CliError::Usage("one of --n or --dim is required".into())),
    };
    if f.method.is_quadrature() {
        if d < 3 {
            return Err(CliError::Usage(format!(
                "{} needs d >= 3, data has d = {d}",
                f.method
            )));
        }
        let block = 2 * (d + 1);
        if dim < block + 1 || !(dim - 1).is_multiple_of(block) {
            return Err(CliError::Usage(format!(
                "--dim {dim} is not of the form 2n(d+1)+1 for d = {d}; use --n"
            )));
        }
    }
    Ok(dim)
}

fn padded_dim(method: Method, d: usize) -> usize {
    if method == Method::Rom {
        d.next_power_of_two()
    } else {
        d
    }
}

fn cmd_map(a: MapArgs) -> CliResult<i32> {
    let mut data = load_dataset(&a.input, a.format.into())?;
    if a.standardize {
        data.standardize();
    }
    let d = data.dim();
    let f = &a.features;
    let kernel = resolve_kernel(f.kernel, f.gamma, d)?;
    let dim = resolve_dim(f, d)?;
    let mapper = build_mapper(f.method, kernel, d, dim, f.seed)?;

    let mut body = String::new();
    let _ = writeln!(
        body,
        "# method={} kernel={} seed={} D={} d={} padded_d={} rows={}",
        f.method,
        kernel,
        f.seed,
        dim,
        d,
        padded_dim(f.method, d),
        data.len()
    );
    let mut buf = vec![0.0; dim];
    for row in &data.rows {
        mapper.map_into(row, &mut buf)?;
        let line: Vec<String> = buf.iter().map(|v| v.to_string()).collect();
        body.push_str(&line.join(","));
        body.push('\n');
    }
    match &a.output {
        Some(path) => {
            std::fs::write(path, body)?;
            println!("seed: {}", f.seed);
            println!(
                "wrote {}x{} features ({}, {}) to {}",
                data.len(),
                dim,
                f.method,
                kernel.name(),
                path.display()
            );
        }
        None => {
            eprintln!("seed: {}", f.seed);
            std::io::stdout().write_all(body.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
enum DatasetSource {
    Synthetic(SyntheticSpec),
    File {
        path: PathBuf,
        format: DataFormat,
        #[serde(default)]
        standardize: bool,
    },
}

/// Layout of the `approx-error` JSON config.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxErrorConfig {
    dataset: DatasetSource,
    experiment: ExperimentConfig,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

fn load_source(src: &DatasetSource, base: &Path) -> CliResult<Dataset> {
    match src {
        DatasetSource::Synthetic(spec) => spec
            .generate()
            .map_err(|e| CliError::Usage(format!("dataset: {e}"))),
        DatasetSource::File {
            path,
            format,
            standardize,
        } => {
            let path = if path.is_relative() {
                base.join(path)
            } else {
                path.clone()
            };
            let mut data = load_dataset(path, *format)?;
            if *standardize {
                data.standardize();
            }
            Ok(data)
        }
    }
}

fn cmd_approx_error(a: ApproxErrorArgs) -> CliResult<i32> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", a.config.display())))?;
    let cfg: ApproxErrorConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let data = load_source(&cfg.dataset, &base)?;
    cfg.experiment
        .validate(&data)
        .map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
    let out_dir = a
        .output_dir
        .or_else(|| {
            cfg.output_dir.as_ref().map(|p| {
                if p.is_relative() {
                    base.join(p)
                } else {
                    p.clone()
                }
            })
        })
        .unwrap_or_else(|| PathBuf::from("quadfeat-report"));

    println!("seed: {}", cfg.experiment.seed);
    println!(
        "dataset: {} ({} rows, d = {})",
        data.name,
        data.len(),
        data.dim()
    );
    let report = run_experiment(&cfg.experiment, &data)?;
    println!(
        "{:<10} {:<16} {:>3} {:>6} {:>12} {:>12}",
        "kernel", "method", "n", "D", "mean", "ci95"
    );
    for c in &report.cells {
        println!(
            "{:<10} {:<16} {:>3} {:>6} {:>12.6e} {:>12.6e}",
            c.kernel,
            c.method.name(),
            c.n,
            c.dim,
            c.mean,
            c.ci_half_width
        );
    }
    for p in report.write_files(&out_dir)? {
        println!(
            "wrote {}",
            p.file_name().and_then(|s| s.to_str()).unwrap_or_default()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_walltime(a: WalltimeArgs) -> CliResult<i32> {
    let f = &a.features;
    let kernel = resolve_kernel(f.kernel, f.gamma, a.d)?;
    let dim = resolve_dim(f, a.d)?;
    if a.batch == 0 || a.repeats == 0 {
        return Err(CliError::Usage("--batch and --repeats must be >= 1".into()));
    }
    let stats = walltime_mapping(f.method, kernel, a.d, dim, a.batch, a.repeats, f.seed)?;
    println!("seed: {}", f.seed);
    println!(
        "method={} kernel={} d={} D={} batch={} repeats={}",
        f.method,
        kernel.name(),
        a.d,
        dim,
        a.batch,
        a.repeats
    );
    println!("checksum={}", stats.checksum);
    println!("median_seconds={:.9}", stats.median);
    println!("mean_seconds={:.9}", stats.mean);
    if let Some(path) = &a.output {
        std::fs::write(
            path,
            serde_json::to_string_pretty(&stats).map_err(Error::from)? + "\n",
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_bound(a: BoundArgs) -> CliResult<i32> {
    if a.d == 0 {
        return Err(CliError::Usage("--d must be >= 1".into()));
    }
    println!("seed: {}", a.seed);
    println!("d: {}", a.d);
    println!("beta_d: {}", analysis::beta_d(a.d));
    let usage = |e: Error| CliError::Usage(e.to_string());
    if a.prop == BoundProp::Variance {
        let v = analysis::variance_bound_sr33(a.d, a.n, a.kappa).map_err(usage)?;
        println!("property: variance");
        println!("n: {}", a.n);
        println!("variance_bound: {v}");
        return Ok(EXIT_OK);
    }
    let b = BoundInputs {
        d: a.d,
        eps: a.eps,
        delta: a.delta,
        l: a.l,
        sigma_p: a.sigma_p,
        kappa: a.kappa,
        mu: a.mu,
        m: a.m,
        lambda0: a.lambda0,
        sigma_y: a.sigma_y,
    };
    let (name, r) = match a.prop {
        BoundProp::Quadrature => (
            "quadrature",
            analysis::required_d_quadrature(&b).map_err(usage)?,
        ),
        BoundProp::Rff => ("rff", analysis::required_d_rff(&b).map_err(usage)?),
        BoundProp::Krr => ("krr", analysis::required_d_krr(&b).map_err(usage)?),
        BoundProp::Variance => unreachable!(),
    };
    println!("property: {name}");
    println!("required_D: {}", r.required_d);
    println!("value: {}", r.value);
    println!("bracket: {}", r.bracket);
    println!("vacuous: {}", r.vacuous);
    println!("degenerate: {}", r.degenerate);
    if matches!(a.prop, BoundProp::Quadrature | BoundProp::Rff) {
        let q = analysis::required_d_quadrature(&b).map_err(usage)?;
        let f = analysis::required_d_rff(&b).map_err(usage)?;
        println!("quadrature_le_rff: {}", q.required_d <= f.required_d);
    }
    Ok(EXIT_OK)
}

type Check = (
    &'static str,
    Box<dyn Fn(u64) -> crate::Result<Option<String>>>,
);

fn selftest_checks() -> Vec<Check> {
    fn gauss(seed: u64, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        fill_standard_normal(&mut rng_from_seed(seed), &mut v);
        v
    }
    fn orth_error(kind: OrthogonalKind, d: usize, seed: u64) -> crate::Result<f64> {
        let q = OrthogonalSampler::new(kind, seed).sample(d)?.to_dense();
        let e = q.transpose() * &q - nalgebra::DMatrix::<f64>::identity(d, d);
        Ok(e.amax())
    }
    vec![
        (
            "butterfly orthogonality",
            Box::new(|seed| {
                for d in [2, 5, 16, 100, 256] {
                    let e = orth_error(OrthogonalKind::ButterflyBP, d, child_seed(seed, d as u64))?;
                    if e > 1e-10 {
                        return Ok(Some(format!("d={d}: max |QᵀQ - I| = {e:e}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "haar orthogonality",
            Box::new(|seed| {
                for d in [3, 32] {
                    let e = orth_error(OrthogonalKind::HaarQR, d, child_seed(seed, d as u64))?;
                    if e > 1e-10 {
                        return Ok(Some(format!("d={d}: max |QᵀQ - I| = {e:e}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "hadamard involution",
            Box::new(|seed| {
                let x = gauss(seed, 64);
                let y = fwht_normalized(&fwht_normalized(&x)?)?;
                let e = x
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                Ok((e > 1e-12).then(|| format!("max deviation {e:e}")))
            }),
        ),
        (
            "simplex identities",
            Box::new(|_| {
                for d in 1..=32 {
                    let s = simplex_vertices(d)?;
                    for i in 0..=d {
                        for j in 0..=d {
                            let g: f64 = s
                                .vertex(i)
                                .iter()
                                .zip(s.vertex(j))
                                .map(|(a, b)| a * b)
                                .sum();
                            let want = if i == j { 1.0 } else { -1.0 / d as f64 };
                            if (g - want).abs() > 1e-12 {
                                return Ok(Some(format!("d={d}: <v{i}, v{j}> = {g}")));
                            }
                        }
                    }
                }
                Ok(None)
            }),
        ),
        (
            "polynomial exactness",
            Box::new(|seed| {
                for d in 3..=16 {
                    for kind in [OrthogonalKind::ButterflyBP, OrthogonalKind::HaarQR] {
                        let sampler = SrSampler::new(d, kind)?;
                        for i in 0..5u64 {
                            let s = sampler.sample_seeded(child_seed(seed, 1000 * d as u64 + i))?;
                            let e = monomial_exactness_error(&s);
                            if e > 1e-10 {
                                return Ok(Some(format!("d={d}: monomial error {e:e}")));
                            }
                        }
                    }
                }
                Ok(None)
            }),
        ),
        (
            "even-rule equivalence",
            Box::new(|seed| {
                for i in 0..200u64 {
                    let d = 3 + (i as usize % 14);
                    let k = KernelKind::gaussian(0.5)?;
                    let s = SrSampler::new(d, OrthogonalKind::ButterflyBP)?
                        .sample_seeded(child_seed(seed, i))?;
                    let x = gauss(labeled_seed(seed, &format!("x{i}")), d);
                    let y = gauss(labeled_seed(seed, &format!("y{i}")), d);
                    let (full, even) = (
                        sr33_estimate(&s, &k, &x, &y)?,
                        sr33_estimate_even(&s, &k, &x, &y)?,
                    );
                    if (full - even).abs() > 1e-12 {
                        return Ok(Some(format!("case {i}: {full} vs {even}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "feature/rule consistency",
            Box::new(|seed| {
                let kernels = [
                    KernelKind::gaussian(0.25)?,
                    KernelKind::ArcCos0,
                    KernelKind::ArcCos1,
                ];
                for (ki, k) in kernels.iter().enumerate() {
                    for i in 0..50u64 {
                        let d = 3 + (i as usize % 10);
                        let map = build_feature_map(
                            *k,
                            d,
                            1 + (i as usize % 3),
                            child_seed(seed, 100 * ki as u64 + i),
                            OrthogonalKind::ButterflyBP,
                        )?;
                        let x = gauss(labeled_seed(seed, &format!("fx{ki}/{i}")), d);
                        let y = gauss(labeled_seed(seed, &format!("fy{ki}/{i}")), d);
                        let (px, py) = (map.map_point(&x)?, map.map_point(&y)?);
                        let ip: f64 = px.iter().zip(&py).map(|(a, b)| a * b).sum();
                        let rule = map.block_rule_average(&x, &y)?;
                        if (ip - rule).abs() > 1e-10 {
                            return Ok(Some(format!("{} case {i}: {ip} vs {rule}", k.name())));
                        }
                    }
                }
                Ok(None)
            }),
        ),
        (
            "beta_d constants",
            Box::new(|_| {
                let (b86, binf) = (analysis::beta_d(86), analysis::beta_d(1_000_000));
                let ok = (64.65..=64.75).contains(&b86) && (63.99..=64.01).contains(&binf);
                Ok((!ok).then(|| format!("beta_86 = {b86}, beta_1e6 = {binf}")))
            }),
        ),
    ]
}

fn cmd_selftest(a: SelftestArgs) -> CliResult<i32> {
    println!("seed: {}", a.seed);
    let checks = selftest_checks();
    let mut passed = 0;
    for (name, check) in &checks {
        match check(a.seed) {
            Ok(None) => {
                passed += 1;
                println!("PASS {name}");
            }
            Ok(Some(why)) => println!("FAIL {name}: {why}"),
            Err(e) => println!("FAIL {name}: {e}"),
        }
    }
    println!("selftest: {passed}/{} passed", checks.len());
    Ok(if passed == checks.len() {
        EXIT_OK
    } else {
        EXIT_RUNTIME
    })
}
