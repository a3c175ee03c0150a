//! Python bindings for the layerfd solver: problem construction, mesh and
//! solve access, convergence tables and the error function.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use layerfd::analysis::{run_convergence, solve_problem};
use layerfd::mesh::{build_mesh, MeshConfig, DEFAULT_TAU0};
use layerfd::problem::{self, Epsilon, ProblemSpec};
use layerfd::scheme::SchemeKind;

fn to_py_err(e: layerfd::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scheme_from_str(s: &str) -> PyResult<SchemeKind> {
    match s {
        "hybrid" => Ok(SchemeKind::Hybrid),
        "upwind" => Ok(SchemeKind::Upwind),
        other => Err(PyValueError::new_err(format!(
            "unknown scheme `{other}` (hybrid | upwind)"
        ))),
    }
}

/// A two-point boundary value problem instance.
#[pyclass(name = "Problem", frozen)]
pub struct PyProblem {
    inner: ProblemSpec,
}

#[pymethods]
impl PyProblem {
    /// Builds a problem from polynomial coefficients (constant term first).
    #[new]
    #[pyo3(signature = (a, b, f, domain=(0.0, 1.0), bc=(0.0, 0.0), alpha=None, beta=None, name="user"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        a: Vec<f64>,
        b: Vec<f64>,
        f: Vec<f64>,
        domain: (f64, f64),
        bc: (f64, f64),
        alpha: Option<f64>,
        beta: Option<f64>,
        name: &str,
    ) -> PyResult<Self> {
        if domain.0.is_nan() || domain.1.is_nan() || domain.0 >= domain.1 {
            return Err(PyValueError::new_err(format!(
                "domain {domain:?} must satisfy x_l < x_r"
            )));
        }
        let horner = |c: Vec<f64>| -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
            Arc::new(move |x| c.iter().rev().fold(0.0, |acc, &k| acc * x + k))
        };
        let mut p = ProblemSpec::new(name, domain, horner(a), horner(b), horner(f), bc);
        if let Some(alpha) = alpha {
            p = p.with_alpha(alpha);
        }
        if let Some(beta) = beta {
            p = p.with_beta(beta);
        }
        Ok(PyProblem { inner: p })
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    #[getter]
    fn bc(&self) -> (f64, f64) {
        self.inner.bc()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn has_exact(&self) -> bool {
        self.inner.has_exact()
    }

    /// Coefficient values at `x`.
    fn a(&self, x: f64) -> f64 {
        self.inner.a(x)
    }

    fn b(&self, x: f64) -> f64 {
        self.inner.b(x)
    }

    fn f(&self, x: f64) -> f64 {
        self.inner.f(x)
    }

    /// Exact solution value, when the problem carries one.
    fn exact(&self, x: f64, epsilon: f64) -> Option<f64> {
        self.inner.exact(x, epsilon)
    }

    /// Admissibility violations found on a uniform sample of the domain.
    #[pyo3(signature = (samples=101))]
    fn validate(&self, samples: usize) -> Vec<String> {
        problem::validate(&self.inner, samples)
            .into_iter()
            .map(|v| v.detail)
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name='{}', domain={:?}, alpha={}, beta={})",
            self.inner.name(),
            self.inner.domain(),
            self.inner.alpha(),
            self.inner.beta()
        )
    }
}

/// Nodal solution with its mesh.
#[pyclass(name = "Solution", frozen)]
pub struct PySolution {
    #[pyo3(get)]
    nodes: Vec<f64>,
    #[pyo3(get)]
    values: Vec<f64>,
    #[pyo3(get)]
    epsilon: f64,
    #[pyo3(get)]
    scheme: String,
    #[pyo3(get)]
    tau: f64,
}

#[pymethods]
impl PySolution {
    fn __len__(&self) -> usize {
        self.values.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(n={}, epsilon={:e}, scheme='{}')",
            self.values.len() - 1,
            self.epsilon,
            self.scheme
        )
    }
}

/// First built-in benchmark (homogeneous, exact solution attached).
#[pyfunction]
fn example1() -> PyProblem {
    PyProblem {
        inner: problem::example1(),
    }
}

/// Second built-in benchmark (nonhomogeneous, exact solution attached).
#[pyfunction]
fn example2() -> PyProblem {
    PyProblem {
        inner: problem::example2(),
    }
}

/// Solves the problem on the layer-adapted mesh.
#[pyfunction]
#[pyo3(signature = (problem, epsilon, n, tau0=DEFAULT_TAU0, scheme="hybrid"))]
fn solve(
    problem: &PyProblem,
    epsilon: f64,
    n: usize,
    tau0: f64,
    scheme: &str,
) -> PyResult<PySolution> {
    let kind = scheme_from_str(scheme)?;
    let sol = solve_problem(&problem.inner, epsilon, n, tau0, kind).map_err(to_py_err)?;
    Ok(PySolution {
        nodes: sol.mesh().nodes().to_vec(),
        values: sol.values().to_vec(),
        epsilon: sol.epsilon(),
        scheme: sol.scheme().to_string(),
        tau: sol.mesh().tau(),
    })
}

/// Maximum pointwise error of a solution against the problem's exact
/// solution.
#[pyfunction]
fn max_error(problem: &PyProblem, solution: &PySolution) -> PyResult<f64> {
    let exact = problem.inner.exact_fn().ok_or_else(|| {
        PyValueError::new_err(format!(
            "problem `{}` has no exact solution",
            problem.inner.name()
        ))
    })?;
    let eps = solution.epsilon;
    Ok(solution
        .nodes
        .iter()
        .zip(&solution.values)
        .map(|(&x, &u)| (exact(x, eps) - u).abs())
        .fold(0.0, f64::max))
}

/// Convergence study: returns `(entries, uniform_rows)` where each entry is
/// `(epsilon, n, error, order)` and `uniform_rows` maps n to the maximum
/// error over the epsilon list.
#[pyfunction]
#[pyo3(signature = (problem, scheme, epsilons, ns, tau0=DEFAULT_TAU0))]
#[allow(clippy::type_complexity)]
fn convergence_table(
    problem: &PyProblem,
    scheme: &str,
    epsilons: Vec<f64>,
    ns: Vec<usize>,
    tau0: f64,
) -> PyResult<(Vec<(f64, usize, f64, Option<f64>)>, BTreeMap<usize, f64>)> {
    let kind = scheme_from_str(scheme)?;
    let report = run_convergence(&problem.inner, kind, &epsilons, &ns, tau0, None)
        .map_err(to_py_err)?;
    let entries = report
        .entries
        .iter()
        .map(|e| (e.epsilon, e.n, e.error, e.order))
        .collect();
    Ok((entries, report.uniform_rows))
}

/// Nodes of the layer-adapted mesh for the given configuration.
#[pyfunction]
#[pyo3(signature = (n, epsilon, tau0=DEFAULT_TAU0, domain=(0.0, 1.0)))]
fn mesh_nodes(n: usize, epsilon: f64, tau0: f64, domain: (f64, f64)) -> PyResult<Vec<f64>> {
    let eps = Epsilon::new(epsilon).map_err(to_py_err)?;
    let mesh = build_mesh(MeshConfig::new(n, eps, domain).with_tau0(tau0)).map_err(to_py_err)?;
    Ok(mesh.nodes().to_vec())
}

/// Error function (exactly odd, saturating to +-1 for |z| > 6).
#[pyfunction]
fn erf(z: f64) -> f64 {
    problem::erf(z)
}

#[pymodule]
fn layerfd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(max_error, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_table, m)?)?;
    m.add_function(wrap_pyfunction!(mesh_nodes, m)?)?;
    m.add_function(wrap_pyfunction!(erf, m)?)?;
    m.add("DEFAULT_TAU0", DEFAULT_TAU0)?;
    Ok(())
}
