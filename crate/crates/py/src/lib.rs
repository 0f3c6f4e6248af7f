//! Python extension module for the core hypothesis-testing crate.
//!
//! Exposes distributions, empirical types, function classes, the ascent
//! solver, threshold calibration, and the chi-squared helpers. Built as a
//! cdylib named `mmtest_py`; python/smoke_test.py shows how to load it
//! straight from the cargo target directory without a packaging step.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// Mirrors the CLI's exit-code split: numerical failures become
/// RuntimeError, everything else is an input problem.
fn convert(err: mmtest::Error) -> PyErr {
    if err.exit_code() == 2 {
        PyRuntimeError::new_err(err.to_string())
    } else {
        PyValueError::new_err(err.to_string())
    }
}

fn solver_options(grad_tol: f64, max_iterations: usize) -> mmtest::SolverOptions {
    mmtest::SolverOptions {
        grad_tol,
        max_iterations,
        ..Default::default()
    }
}

/// Probability distribution on a finite alphabet {0, .., N-1}.
#[pyclass(name = "Distribution", skip_from_py_object)]
#[derive(Clone)]
struct PyDistribution {
    inner: mmtest::Distribution,
}

#[pymethods]
impl PyDistribution {
    /// Normalizes nonnegative weights; rejects negatives and all-zero input.
    #[new]
    fn new(weights: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: mmtest::Distribution::new(weights).map_err(convert)?,
        })
    }

    #[staticmethod]
    fn uniform(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: mmtest::Distribution::uniform(n).map_err(convert)?,
        })
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }

    fn full_support(&self) -> bool {
        self.inner.full_support()
    }

    /// Expectation of f under this distribution.
    fn mean(&self, f: &PySymbolFunction) -> f64 {
        self.inner.mean(&f.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.alphabet_size()
    }

    fn __repr__(&self) -> String {
        format!("Distribution({:?})", self.inner.weights())
    }
}

/// Counts of n observations by symbol.
#[pyclass(name = "EmpiricalType", skip_from_py_object)]
#[derive(Clone)]
struct PyEmpiricalType {
    inner: mmtest::EmpiricalType,
}

#[pymethods]
impl PyEmpiricalType {
    #[new]
    fn new(counts: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: mmtest::EmpiricalType::new(counts).map_err(convert)?,
        })
    }

    fn counts(&self) -> Vec<u64> {
        self.inner.counts().to_vec()
    }

    fn sample_size(&self) -> u64 {
        self.inner.sample_size()
    }

    fn as_distribution(&self) -> PyDistribution {
        PyDistribution {
            inner: self.inner.as_distribution(),
        }
    }

    fn __repr__(&self) -> String {
        format!("EmpiricalType({:?})", self.inner.counts())
    }
}

/// Real-valued function on the alphabet, stored as one value per symbol.
#[pyclass(name = "SymbolFunction", from_py_object)]
#[derive(Clone)]
struct PySymbolFunction {
    inner: mmtest::SymbolFunction,
}

#[pymethods]
impl PySymbolFunction {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: mmtest::SymbolFunction::new(values).map_err(convert)?,
        })
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    /// The function plus a constant.
    fn shift(&self, c: f64) -> Self {
        Self {
            inner: self.inner.shift(c),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SymbolFunction({:?})", self.inner.values())
    }
}

/// Parametric family of statistic functions f_r over which the restricted
/// supremum runs: linear spans, log-linear families, or cell indicators.
#[pyclass(name = "FunctionClass", skip_from_py_object)]
#[derive(Clone)]
struct PyFunctionClass {
    inner: mmtest::FunctionClass,
}

#[pymethods]
impl PyFunctionClass {
    /// Linear class f_r = sum_i r_i psi_i.
    #[staticmethod]
    fn linear(
        features: Vec<PySymbolFunction>,
        reference: &PyDistribution,
    ) -> PyResult<Self> {
        let features = features.into_iter().map(|f| f.inner).collect();
        Ok(Self {
            inner: mmtest::FunctionClass::linear(features, &reference.inner)
                .map_err(convert)?,
        })
    }

    /// Log-linear class f_r = log(1 + sum_i r_i psi_i), features centered
    /// under the reference (pass center=False if they already are).
    #[staticmethod]
    #[pyo3(signature = (features, reference, center = true))]
    fn log_linear(
        features: Vec<PySymbolFunction>,
        reference: &PyDistribution,
        center: bool,
    ) -> PyResult<Self> {
        let features = features.into_iter().map(|f| f.inner).collect();
        Ok(Self {
            inner: mmtest::FunctionClass::log_linear(features, &reference.inner, center)
                .map_err(convert)?,
        })
    }

    /// Indicator class over disjoint, non-covering cells of symbols.
    #[staticmethod]
    fn partition(cells: Vec<Vec<usize>>, reference: &PyDistribution) -> PyResult<Self> {
        Ok(Self {
            inner: mmtest::FunctionClass::partition(&cells, &reference.inner)
                .map_err(convert)?,
        })
    }

    /// "linear", "loglinear", or "partition".
    fn kind(&self) -> String {
        self.inner.kind().as_str().to_string()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }

    fn features(&self) -> Vec<PySymbolFunction> {
        self.inner
            .features()
            .iter()
            .map(|f| PySymbolFunction { inner: f.clone() })
            .collect()
    }

    /// The class member f_r at parameter r.
    fn evaluate(&self, r: Vec<f64>) -> PyResult<PySymbolFunction> {
        Ok(PySymbolFunction {
            inner: self.inner.evaluate(&r).map_err(convert)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "FunctionClass(kind={}, dimension={})",
            self.inner.kind().as_str(),
            self.inner.dimension()
        )
    }
}

/// Reproducible random stream addressed by (seed, index). Streams with
/// different indices are independent; index 0 is conventionally reserved
/// for setup draws and 1.. for trials.
#[pyclass(name = "RandomStream")]
struct PyRandomStream {
    inner: mmtest::RandomStream,
}

#[pymethods]
impl PyRandomStream {
    #[new]
    #[pyo3(signature = (seed, index = 0))]
    fn new(seed: u64, index: u64) -> Self {
        Self {
            inner: mmtest::RandomStream::derive(seed, index),
        }
    }

    /// Uniform draw in [0, 1).
    fn uniform(&mut self) -> f64 {
        self.inner.uniform()
    }

    fn standard_normal(&mut self) -> f64 {
        self.inner.standard_normal()
    }
}

/// Outcome of a restricted-supremum solve.
#[pyclass(name = "MmResult", get_all)]
struct PyMmResult {
    /// The divergence value (supremal value reached, if not attained).
    value: f64,
    r_star: Vec<f64>,
    /// Reference twisted by the optimal function.
    twisted: PyDistribution,
    gradient_norm: f64,
    iterations: usize,
    /// "converged", "max-iterations", or "unbounded".
    status: String,
}

impl PyMmResult {
    fn from_core(res: mmtest::MmResult) -> Self {
        Self {
            value: res.value,
            r_star: res.r_star,
            twisted: PyDistribution {
                inner: res.twisted_dist,
            },
            gradient_norm: res.gradient_norm,
            iterations: res.iterations,
            status: res.status.as_str().to_string(),
        }
    }
}

#[pymethods]
impl PyMmResult {
    fn __repr__(&self) -> String {
        format!(
            "MmResult(value={}, status={}, iterations={})",
            self.value, self.status, self.iterations
        )
    }
}

/// Relative entropy D(mu || nu) in nats; infinite off nu's support.
#[pyfunction]
fn kl_divergence(mu: &PyDistribution, nu: &PyDistribution) -> PyResult<f64> {
    mmtest::kl_divergence(&mu.inner, &nu.inner).map_err(convert)
}

/// Shannon entropy in nats.
#[pyfunction]
fn entropy(mu: &PyDistribution) -> f64 {
    mmtest::entropy(&mu.inner)
}

/// Log moment generating function log E_pi[exp f].
#[pyfunction]
fn log_mgf(pi: &PyDistribution, f: &PySymbolFunction) -> PyResult<f64> {
    mmtest::log_mgf(&pi.inner, &f.inner).map_err(convert)
}

/// Exponential tilt pi * exp(f - log_mgf(pi, f)).
#[pyfunction]
fn twisted(pi: &PyDistribution, f: &PySymbolFunction) -> PyResult<PyDistribution> {
    Ok(PyDistribution {
        inner: mmtest::twisted(&pi.inner, &f.inner).map_err(convert)?,
    })
}

/// Pointwise log(nu1 / nu2); requires identical supports.
#[pyfunction]
fn log_likelihood_ratio(
    nu1: &PyDistribution,
    nu2: &PyDistribution,
) -> PyResult<PySymbolFunction> {
    Ok(PySymbolFunction {
        inner: mmtest::log_likelihood_ratio(&nu1.inner, &nu2.inner).map_err(convert)?,
    })
}

/// Empirical type of n i.i.d. observations from pi.
#[pyfunction]
fn sample_type(
    pi: &PyDistribution,
    n: usize,
    stream: &mut PyRandomStream,
) -> PyResult<PyEmpiricalType> {
    Ok(PyEmpiricalType {
        inner: mmtest::sample_type(&pi.inner, n, &mut stream.inner).map_err(convert)?,
    })
}

/// Mismatched divergence of mu from pi over a function class: the supremum
/// of mu(f) - log_mgf(pi, f) over class members f.
#[pyfunction]
#[pyo3(signature = (mu, pi, class, grad_tol = 1e-10, max_iterations = 200))]
fn mm_divergence(
    mu: &PyDistribution,
    pi: &PyDistribution,
    class: &PyFunctionClass,
    grad_tol: f64,
    max_iterations: usize,
) -> PyResult<PyMmResult> {
    let opts = solver_options(grad_tol, max_iterations);
    mmtest::mm_divergence(&mu.inner, &pi.inner, &class.inner, &opts)
        .map(PyMmResult::from_core)
        .map_err(convert)
}

/// Reverse I-projection of mu onto the exponential family generated by the
/// class around pi, returned as (distribution, divergence value). Raises
/// RuntimeError when the supremum is not attained.
#[pyfunction]
#[pyo3(signature = (mu, pi, class, grad_tol = 1e-10, max_iterations = 200))]
fn reverse_i_projection(
    mu: &PyDistribution,
    pi: &PyDistribution,
    class: &PyFunctionClass,
    grad_tol: f64,
    max_iterations: usize,
) -> PyResult<(PyDistribution, f64)> {
    let opts = solver_options(grad_tol, max_iterations);
    let (dist, value) =
        mmtest::reverse_i_projection(&mu.inner, &pi.inner, &class.inner, &opts)
            .map_err(convert)?;
    Ok((PyDistribution { inner: dist }, value))
}

/// Worst-case divergence inf D(mu || nu) over distributions nu matching pi's
/// feature means, via the log-linear class centered under pi.
#[pyfunction]
#[pyo3(signature = (mu, pi, features, grad_tol = 1e-10, max_iterations = 200))]
fn robust_divergence(
    mu: &PyDistribution,
    pi: &PyDistribution,
    features: Vec<PySymbolFunction>,
    grad_tol: f64,
    max_iterations: usize,
) -> PyResult<PyMmResult> {
    let opts = solver_options(grad_tol, max_iterations);
    let features = features.into_iter().map(|f| f.inner).collect();
    mmtest::robust_divergence(&mu.inner, &pi.inner, features, &opts)
        .map(PyMmResult::from_core)
        .map_err(convert)
}

/// Threshold eta for a target false-alarm probability. Method "chisq"
/// inverts the chi-squared null limit at the given degrees of freedom;
/// "sanov" uses the raw large-deviations exponent -log(p_fa) / n.
#[pyfunction]
#[pyo3(signature = (dof, n, p_fa, method = "chisq"))]
fn calibrate_threshold(dof: usize, n: usize, p_fa: f64, method: &str) -> PyResult<f64> {
    let method = match method {
        "chisq" => mmtest::CalibrationMethod::ChiSquared,
        "sanov" => mmtest::CalibrationMethod::Sanov,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; expected \"chisq\" or \"sanov\""
            )))
        }
    };
    mmtest::calibrate_threshold(mmtest::StatisticKind::Mismatched, dof, n, p_fa, method)
        .map(|t| t.eta)
        .map_err(convert)
}

/// Worst-case missed-detection exponent of the divergence test with
/// threshold eta between alternate pi1 and null pi0.
#[pyfunction]
fn error_exponent(pi0: &PyDistribution, pi1: &PyDistribution, eta: f64) -> PyResult<f64> {
    mmtest::error_exponent(&pi0.inner, &pi1.inner, eta).map_err(convert)
}

#[pyfunction]
fn chi_squared_cdf(dof: usize, x: f64) -> f64 {
    mmtest::chi_squared_cdf(dof, x)
}

#[pyfunction]
fn chi_squared_sf(dof: usize, x: f64) -> f64 {
    mmtest::chi_squared_sf(dof, x)
}

#[pyfunction]
fn chi_squared_quantile(dof: usize, p: f64) -> PyResult<f64> {
    mmtest::chi_squared_quantile(dof, p).map_err(convert)
}

#[pymodule]
fn mmtest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyEmpiricalType>()?;
    m.add_class::<PySymbolFunction>()?;
    m.add_class::<PyFunctionClass>()?;
    m.add_class::<PyRandomStream>()?;
    m.add_class::<PyMmResult>()?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(log_mgf, m)?)?;
    m.add_function(wrap_pyfunction!(twisted, m)?)?;
    m.add_function(wrap_pyfunction!(log_likelihood_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(sample_type, m)?)?;
    m.add_function(wrap_pyfunction!(mm_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(reverse_i_projection, m)?)?;
    m.add_function(wrap_pyfunction!(robust_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(error_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(chi_squared_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(chi_squared_sf, m)?)?;
    m.add_function(wrap_pyfunction!(chi_squared_quantile, m)?)?;
    Ok(())
}
