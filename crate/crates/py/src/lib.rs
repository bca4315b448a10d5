//! Python bindings for `contam-runs`.
//!
//! A thin layer: distributions are validated by the core crate and every
//! library error becomes a `ValueError`, except size and budget refusals
//! which raise `OverflowError` so callers can tell them apart.

use contam_runs::analytic::{self, AccompanyingDistribution};
use contam_runs::montecarlo::{self, exponential_reference, ExperimentConfig};
use contam_runs::oracle::{self, DpOptions};
use contam_runs::{Error, WindowSpec};
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SizeLimit { .. } | Error::Budget { .. } => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn window(m: usize) -> PyResult<WindowSpec> {
    WindowSpec::new(m).map_err(to_py)
}

/// Probabilities of the three outcomes `0`, `+` and `-`.
#[pyclass(name = "TrialDistribution", frozen, module = "contam_runs_py")]
struct PyDist(contam_runs::TrialDistribution);

#[pymethods]
impl PyDist {
    #[new]
    fn new(p: f64, q1: f64, q2: f64) -> PyResult<Self> {
        contam_runs::TrialDistribution::new(p, q1, q2).map(PyDist).map_err(to_py)
    }

    #[staticmethod]
    fn uniform() -> Self {
        PyDist(contam_runs::TrialDistribution::uniform())
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p()
    }

    #[getter]
    fn q1(&self) -> f64 {
        self.0.q1()
    }

    #[getter]
    fn q2(&self) -> f64 {
        self.0.q2()
    }

    /// `(C, C0, C1, C2, K)`
    fn constants(&self) -> (f64, f64, f64, f64, f64) {
        let k = self.0.constants();
        (k.c, k.c0, k.c1, k.c2, k.k)
    }

    fn __repr__(&self) -> String {
        format!("TrialDistribution(p={}, q1={}, q2={})", self.0.p(), self.0.q1(), self.0.q2())
    }
}

#[pyfunction]
fn window_probability(dist: &PyDist, m: usize) -> PyResult<f64> {
    Ok(analytic::window_probability(&dist.0, window(m)?))
}

#[pyfunction]
fn alpha(dist: &PyDist, m: usize) -> PyResult<f64> {
    analytic::alpha_correction(&dist.0, window(m)?).map(|b| b.alpha).map_err(to_py)
}

/// Centering `m(N)` as `(total, [(label, value), ...])`.
#[pyfunction]
fn m_of_n(dist: &PyDist, n: f64) -> PyResult<(f64, Vec<(String, f64)>)> {
    let t = analytic::m_of_n(&dist.0, n).map_err(to_py)?;
    Ok((t.total, t.terms.iter().map(|e| (e.label.to_string(), e.value)).collect()))
}

/// `P(mu(N) - [m(N)] < k)` for each `k`.
#[pyfunction]
fn accompanying_cdf(dist: &PyDist, n: f64, ks: Vec<i64>) -> PyResult<Vec<f64>> {
    let acc = AccompanyingDistribution::new(&dist.0, n).map_err(to_py)?;
    Ok(ks.into_iter().map(|k| acc.cdf(k).value).collect())
}

#[pyfunction]
fn theorem1_limit_cdf(x: f64) -> f64 {
    analytic::theorem1_limit_cdf(x)
}

/// `P(mu(N) < m)` by dynamic programming.
#[pyfunction]
#[pyo3(signature = (dist, n, m, budget = oracle::DEFAULT_BUDGET))]
fn longest_run_cdf(py: Python<'_>, dist: &PyDist, n: u64, m: usize, budget: u64) -> PyResult<f64> {
    let w = window(m)?;
    py.detach(|| oracle::dp_longest_cdf(&dist.0, n, w, &DpOptions { budget })).map_err(to_py)
}

/// `P(tau_m > n)` by dynamic programming.
#[pyfunction]
#[pyo3(signature = (dist, m, n, budget = oracle::DEFAULT_BUDGET))]
fn hitting_tail(py: Python<'_>, dist: &PyDist, m: usize, n: u64, budget: u64) -> PyResult<f64> {
    let w = window(m)?;
    py.detach(|| oracle::dp_hitting_tail(&dist.0, w, n, &DpOptions { budget })).map_err(to_py)
}

/// Longest valid run of each of `s` sequences of length `n`.
#[pyfunction]
#[pyo3(signature = (dist, n, s, seed = 1, threads = None))]
fn simulate_longest(py: Python<'_>, dist: &PyDist, n: u64, s: u64, seed: u64, threads: Option<usize>) -> PyResult<Vec<u64>> {
    let cfg = ExperimentConfig::longest(dist.0, n, s, seed);
    py.detach(|| montecarlo::run_longest_experiment_with_threads(&cfg, threads)).map(|r| r.longest).map_err(to_py)
}

/// Hitting times of a valid window of length `m`; `None` where the cap was reached.
#[pyfunction]
#[pyo3(signature = (dist, m, s, seed = 1, cap = montecarlo::DEFAULT_HITTING_CAP, threads = None))]
fn simulate_hitting(
    py: Python<'_>,
    dist: &PyDist,
    m: usize,
    s: u64,
    seed: u64,
    cap: u64,
    threads: Option<usize>,
) -> PyResult<Vec<Option<u64>>> {
    let mut cfg = ExperimentConfig::hitting(dist.0, window(m)?, s, seed);
    cfg.hitting_cap = cap;
    py.detach(|| montecarlo::run_hitting_experiment_with_threads(&cfg, threads)).map(|r| r.hitting_times).map_err(to_py)
}

/// Sup distance between a sample and `1 - exp(-x)`.
#[pyfunction]
fn sup_distance_exponential(samples: Vec<f64>) -> PyResult<f64> {
    let e = montecarlo::EmpiricalDistribution::from_samples(samples).map_err(to_py)?;
    Ok(montecarlo::sup_distance(&e, &exponential_reference()))
}

#[pymodule]
fn contam_runs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDist>()?;
    m.add("RNG_SCHEME", montecarlo::RNG_SCHEME)?;
    m.add_function(wrap_pyfunction!(window_probability, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(m_of_n, m)?)?;
    m.add_function(wrap_pyfunction!(accompanying_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(longest_run_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(hitting_tail, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_longest, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_hitting, m)?)?;
    m.add_function(wrap_pyfunction!(sup_distance_exponential, m)?)?;
    Ok(())
}
