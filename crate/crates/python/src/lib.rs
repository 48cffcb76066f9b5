//! Python bindings. Matrices cross the boundary as lists of rows.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sdpcluster as core;
use sdpcluster::{DenseMatrix, SymmetricMatrix};

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::InvalidSpec(_)
        | core::Error::InvalidOptions(_)
        | core::Error::Config(_)
        | core::Error::DimensionMismatch { .. }
        | core::Error::TooFewSamples(_)
        | core::Error::TooLargeForEnumeration { .. }
        | core::Error::Infeasible(_)
        | core::Error::ZeroVector => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn dense(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(err)
}

fn symmetric(rows: Vec<Vec<f64>>) -> PyResult<SymmetricMatrix> {
    SymmetricMatrix::from_dense(&dense(rows)?).map_err(err)
}

fn rows_of(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn sym_rows(m: &SymmetricMatrix) -> Vec<Vec<f64>> {
    let n = m.order();
    (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect()
}

fn labels(p: &core::Partition) -> Vec<i8> {
    p.labels().to_vec()
}

/// A two-population mixture.
#[pyclass(name = "MixtureSpec", module = "sdpcluster")]
struct PyMixtureSpec {
    inner: core::MixtureSpec,
}

#[pymethods]
impl PyMixtureSpec {
    /// Mirrored two-level Bernoulli design with `gamma = alpha^2`.
    #[staticmethod]
    #[pyo3(signature = (n, p, alpha=0.04, eps=None, w1=0.5))]
    fn bernoulli(n: usize, p: usize, alpha: f64, eps: Option<f64>, w1: f64) -> PyResult<Self> {
        let inner = core::make_bernoulli_spec(alpha, eps.unwrap_or(0.1 * alpha), p, n, w1).map_err(err)?;
        Ok(Self { inner })
    }

    /// Builds a spec from the flat JSON config format.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let inner = core::MixtureConfig::from_json(text)
            .and_then(|c| c.build())
            .map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.separation().gamma
    }

    #[getter]
    fn delta_sq(&self) -> f64 {
        self.inner.separation().delta_sq
    }

    fn weights(&self) -> (f64, f64) {
        self.inner.weights()
    }

    fn membership(&self) -> Vec<i8> {
        labels(&self.inner.membership())
    }

    fn snr(&self) -> PyResult<f64> {
        self.inner.snr().map_err(err)
    }

    fn reference_r(&self) -> Vec<Vec<f64>> {
        sym_rows(&core::reference_r(&self.inner))
    }

    fn expected_gram(&self) -> Vec<Vec<f64>> {
        sym_rows(&core::expected_gram(&self.inner))
    }

    fn expected_bias(&self) -> Vec<Vec<f64>> {
        sym_rows(&core::expected_bias(&self.inner))
    }

    /// Draws `(X, membership)` with `X` as a list of rows.
    fn sample(&self, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<i8>)> {
        let ds = core::sample(&self.inner, seed).map_err(err)?;
        Ok((rows_of(&ds.x), labels(&ds.membership)))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json_string(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "MixtureSpec(n={}, p={}, w1={}, gamma={})",
            self.inner.n,
            self.inner.p,
            self.inner.w1,
            self.inner.separation().gamma
        )
    }
}

fn serde_json_string(spec: &core::MixtureSpec) -> PyResult<String> {
    serde_json::to_string(spec).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Result of centering a data matrix.
#[pyclass(name = "CenteredData", module = "sdpcluster")]
struct PyCenteredData {
    inner: core::CenteredData,
}

#[pymethods]
impl PyCenteredData {
    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    #[getter]
    fn y(&self) -> Vec<Vec<f64>> {
        rows_of(&self.inner.y)
    }

    #[getter]
    fn gram(&self) -> Vec<Vec<f64>> {
        sym_rows(&self.inner.gram)
    }

    /// `A = Y Y^T - lambda (E - I)`.
    fn build_a(&self) -> Vec<Vec<f64>> {
        sym_rows(&core::build_a(&self.inner))
    }
}

#[pyfunction]
fn center(x: Vec<Vec<f64>>) -> PyResult<PyCenteredData> {
    let inner = core::center(&dense(x)?).map_err(err)?;
    Ok(PyCenteredData { inner })
}

/// Low-rank solution of the elliptope relaxation.
#[pyclass(name = "SdpSolution", module = "sdpcluster")]
struct PySdpSolution {
    inner: core::SdpSolution,
}

#[pymethods]
impl PySdpSolution {
    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn xhat(&self) -> Vec<f64> {
        self.inner.xhat.clone()
    }

    #[getter]
    fn factor(&self) -> Vec<Vec<f64>> {
        rows_of(&self.inner.factor)
    }

    /// Sign rounding of `xhat`.
    fn labels(&self) -> Vec<i8> {
        labels(&core::round_signs(&self.inner.xhat))
    }
}

/// Maximizes `<A, Z>` over the elliptope.
#[pyfunction]
#[pyo3(signature = (a, tol=1e-7, max_iters=2000, restarts=3, seed=0, rank=None))]
fn solve(
    py: Python<'_>,
    a: Vec<Vec<f64>>,
    tol: f64,
    max_iters: usize,
    restarts: usize,
    seed: u64,
    rank: Option<usize>,
) -> PyResult<PySdpSolution> {
    let a = symmetric(a)?;
    let opts = core::SolverOptions {
        rank,
        tol,
        max_iters,
        restarts,
        seed,
    };
    let inner = py.detach(|| core::solve(&a, &opts)).map_err(err)?;
    Ok(PySdpSolution { inner })
}

/// Top eigenpair `(value, vector)` of a symmetric matrix.
#[pyfunction]
#[pyo3(signature = (s, tol=1e-10))]
fn top_eigen(s: Vec<Vec<f64>>, tol: f64) -> PyResult<(f64, Vec<f64>)> {
    let e = core::top_eigen(&symmetric(s)?, tol).map_err(err)?;
    Ok((e.value, e.vector))
}

/// Sorted-split two-group k-means over `v`, scored on the rows of `y`.
#[pyfunction]
fn peng_wei_split(v: Vec<f64>, y: Vec<Vec<f64>>) -> PyResult<Vec<i8>> {
    let s = core::peng_wei_split(&v, &dense(y)?).map_err(err)?;
    Ok(labels(&s.partition))
}

#[pyfunction]
fn success_rate(pred: Vec<i8>, truth: Vec<i8>) -> PyResult<f64> {
    core::success_rate(
        &core::Partition::from_labels(pred),
        &core::Partition::from_labels(truth),
    )
    .map_err(err)
}

/// Runs the verification suite; returns `(passed, rows)` where each row is
/// `(check, spec, statistic, bound, pass)`.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn run_verify(py: Python<'_>, seed: u64) -> PyResult<(bool, Vec<(String, String, f64, f64, bool)>)> {
    let report = py.detach(|| core::run_verify(seed)).map_err(err)?;
    let rows = report
        .rows
        .iter()
        .map(|r| (r.check.clone(), r.spec.clone(), r.statistic, r.bound, r.pass))
        .collect();
    Ok((report.passed(), rows))
}

#[pymodule(name = "sdpcluster")]
fn sdpcluster_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMixtureSpec>()?;
    m.add_class::<PyCenteredData>()?;
    m.add_class::<PySdpSolution>()?;
    m.add_function(wrap_pyfunction!(center, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(top_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(peng_wei_split, m)?)?;
    m.add_function(wrap_pyfunction!(success_rate, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
