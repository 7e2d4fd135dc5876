//! Python bindings for `quadfeat`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quadfeat::analysis::{self, BoundInputs};
use quadfeat::bench;
use quadfeat::kernels::KernelKind;
use quadfeat::linalg::{self, OrthogonalKind};
use quadfeat::quadrature::{self, SrSampler};
use quadfeat::{FeatureMapper, Method};

fn err(e: quadfeat::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kernel(name: &str, gamma: Option<f64>, d: usize) -> PyResult<KernelKind> {
    match (name.to_ascii_lowercase().as_str(), gamma) {
        ("gaussian" | "rbf", None) => Ok(KernelKind::gaussian_default(d)),
        ("gaussian" | "rbf", Some(g)) => KernelKind::gaussian(g).map_err(err),
        ("arccos0", None) => Ok(KernelKind::ArcCos0),
        ("arccos1", None) => Ok(KernelKind::ArcCos1),
        ("arccos0" | "arccos1", Some(_)) => Err(PyValueError::new_err(
            "gamma only applies to the gaussian kernel",
        )),
        (other, _) => Err(PyValueError::new_err(format!("unknown kernel {other:?}"))),
    }
}

fn rotation(name: &str) -> PyResult<OrthogonalKind> {
    match name {
        "butterfly" => Ok(OrthogonalKind::ButterflyBP),
        "haar" => Ok(OrthogonalKind::HaarQR),
        other => Err(PyValueError::new_err(format!(
            "unknown rotation {other:?}; use 'butterfly' or 'haar'"
        ))),
    }
}

fn to_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn to_matrix(rows: &[Vec<f64>]) -> PyResult<nalgebra::DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    Ok(nalgebra::DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Explicit feature map for any supported method.
#[pyclass(name = "FeatureMap", frozen)]
struct PyFeatureMap {
    inner: Box<dyn FeatureMapper>,
    method: Method,
    kernel: KernelKind,
    seed: u64,
}

#[pymethods]
impl PyFeatureMap {
    #[new]
    #[pyo3(signature = (input_dim, n=None, dim=None, method="sr33-butterfly", kernel="gaussian", gamma=None, seed=0))]
    fn new(
        input_dim: usize,
        n: Option<usize>,
        dim: Option<usize>,
        method: &str,
        kernel: &str,
        gamma: Option<f64>,
        seed: u64,
    ) -> PyResult<Self> {
        let method = Method::parse(method)
            .ok_or_else(|| PyValueError::new_err(format!("unknown method {method:?}")))?;
        let kernel_kind = self::kernel(kernel, gamma, input_dim)?;
        let dim = match (n, dim) {
            (Some(n), None) => quadfeat::feature_dim(input_dim, n),
            (None, Some(d)) => d,
            _ => return Err(PyValueError::new_err("give exactly one of n or dim")),
        };
        let inner =
            quadfeat::build_mapper(method, kernel_kind, input_dim, dim, seed).map_err(err)?;
        Ok(Self {
            inner,
            method,
            kernel: kernel_kind,
            seed,
        })
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    #[getter]
    fn output_dim(&self) -> usize {
        self.inner.output_dim()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.method.name()
    }

    #[getter]
    fn kernel(&self) -> String {
        self.kernel.to_string()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.seed
    }

    fn map_point(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.map_point(&x).map_err(err)
    }

    /// Features of every row.
    fn map(&self, py: Python<'_>, rows: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        py.detach(|| self.inner.map_rows(&rows)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "FeatureMap(method={}, kernel={}, input_dim={}, output_dim={}, seed={})",
            self.method,
            self.kernel,
            self.inner.input_dim(),
            self.inner.output_dim(),
            self.seed
        )
    }
}

#[pyfunction]
fn feature_dim(d: usize, n: usize) -> usize {
    quadfeat::feature_dim(d, n)
}

#[pyfunction]
#[pyo3(signature = (kernel_name, x, y, gamma=None))]
fn kernel_exact(kernel_name: &str, x: Vec<f64>, y: Vec<f64>, gamma: Option<f64>) -> PyResult<f64> {
    let k = kernel(kernel_name, gamma, x.len())?;
    quadfeat::kernels::kernel_exact(&k, &x, &y).map_err(err)
}

/// One SR(3,3) estimate of `k(x, y)` from a seeded rule.
#[pyfunction]
#[pyo3(signature = (kernel_name, x, y, seed=0, gamma=None, rotation_kind="butterfly"))]
fn sr33_estimate(
    kernel_name: &str,
    x: Vec<f64>,
    y: Vec<f64>,
    seed: u64,
    gamma: Option<f64>,
    rotation_kind: &str,
) -> PyResult<f64> {
    let k = kernel(kernel_name, gamma, x.len())?;
    let sample = quadrature::sample_sr33(x.len(), seed, rotation(rotation_kind)?).map_err(err)?;
    quadrature::sr33_estimate(&sample, &k, &x, &y).map_err(err)
}

/// Radius-vector draws needed for each of `count` accepted samples.
#[pyfunction]
#[pyo3(signature = (d, count, seed=0))]
fn radius_draws(d: usize, count: usize, seed: u64) -> PyResult<Vec<usize>> {
    let sampler = SrSampler::new(d, OrthogonalKind::ButterflyBP).map_err(err)?;
    let mut rng = quadfeat::rng::rng_from_seed(seed);
    (0..count)
        .map(|_| sampler.sample_radii(&mut rng).map(|r| r.1).map_err(err))
        .collect()
}

#[pyfunction]
#[pyo3(signature = (kernel_name, rows, gamma=None))]
fn gram_exact(
    kernel_name: &str,
    rows: Vec<Vec<f64>>,
    gamma: Option<f64>,
) -> PyResult<Vec<Vec<f64>>> {
    let d = rows.first().map_or(1, Vec::len);
    let k = kernel(kernel_name, gamma, d)?;
    Ok(to_rows(&bench::gram_exact(&k, &rows).map_err(err)?))
}

#[pyfunction]
fn relative_frobenius_error(exact: Vec<Vec<f64>>, approx: Vec<Vec<f64>>) -> PyResult<f64> {
    bench::relative_frobenius_error(&to_matrix(&exact)?, &to_matrix(&approx)?).map_err(err)
}

/// Dense matrix of a sampled orthogonal operator.
#[pyfunction]
#[pyo3(signature = (d, seed=0, kind="butterfly"))]
fn orthogonal_matrix(d: usize, seed: u64, kind: &str) -> PyResult<Vec<Vec<f64>>> {
    let op = linalg::OrthogonalSampler::new(rotation(kind)?, seed)
        .sample(d)
        .map_err(err)?;
    Ok(to_rows(&op.to_dense()))
}

#[pyfunction]
fn simplex_vertices(d: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(linalg::simplex_vertices(d)
        .map_err(err)?
        .vertices()
        .to_vec())
}

#[pyfunction]
#[pyo3(signature = (d, count, skip=quadfeat::baselines::DEFAULT_SKIP))]
fn halton_sequence(d: usize, count: usize, skip: usize) -> PyResult<Vec<Vec<f64>>> {
    quadfeat::baselines::halton_sequence(d, count, skip).map_err(err)
}

#[pyfunction]
fn beta_d(d: usize) -> f64 {
    analysis::beta_d(d)
}

/// `(required_D, vacuous)` for the quadrature bound with Gaussian-kernel constants.
#[pyfunction]
#[pyo3(signature = (d, eps, delta, sigma_p=1.0, l=1.0))]
fn required_d_quadrature(
    d: usize,
    eps: f64,
    delta: f64,
    sigma_p: f64,
    l: f64,
) -> PyResult<(u64, bool)> {
    let r = analysis::required_d_quadrature(&BoundInputs::rbf(d, eps, delta, sigma_p, l))
        .map_err(err)?;
    Ok((r.required_d, r.vacuous))
}

/// `(required_D, vacuous)` for the random Fourier feature bound.
#[pyfunction]
#[pyo3(signature = (d, eps, delta, sigma_p=1.0, l=1.0))]
fn required_d_rff(d: usize, eps: f64, delta: f64, sigma_p: f64, l: f64) -> PyResult<(u64, bool)> {
    let r = analysis::required_d_rff(&BoundInputs::rbf(d, eps, delta, sigma_p, l)).map_err(err)?;
    Ok((r.required_d, r.vacuous))
}

#[pyfunction]
#[pyo3(signature = (d, n, kappa=1.0))]
fn variance_bound_sr33(d: usize, n: usize, kappa: f64) -> PyResult<f64> {
    analysis::variance_bound_sr33(d, n, kappa).map_err(err)
}

#[pymodule]
fn quadfeat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFeatureMap>()?;
    m.add_function(wrap_pyfunction!(feature_dim, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_exact, m)?)?;
    m.add_function(wrap_pyfunction!(sr33_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(radius_draws, m)?)?;
    m.add_function(wrap_pyfunction!(gram_exact, m)?)?;
    m.add_function(wrap_pyfunction!(relative_frobenius_error, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonal_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(halton_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(beta_d, m)?)?;
    m.add_function(wrap_pyfunction!(required_d_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(required_d_rff, m)?)?;
    m.add_function(wrap_pyfunction!(variance_bound_sr33, m)?)?;
    m.add(
        "METHODS",
        Method::ALL.iter().map(|m| m.name()).collect::<Vec<_>>(),
    )?;
    Ok(())
}
