//! Python bindings: `import esf`.
//!
//! Exact values come back as `fractions.Fraction`, intervals as
//! `(lower, upper)` float pairs rounded outward.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use esf_core::chebyshev;
use esf_core::precise::DEFAULT_PRECISION_BITS;
use esf_core::primes::DEFAULT_SIEVE_LIMIT;
use esf_core::{Error, ExactRational, Interval};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Checkpoint { .. } => PyOSError::new_err(e.to_string()),
        Error::SelfCheck(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, v: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((v.numer().clone(), v.denom().clone()))
}

fn bounds(iv: &Interval) -> (f64, f64) {
    (iv.lower_f64(), iv.upper_f64())
}

fn table_for(limit: u64) -> PyResult<esf_core::PrimeTable> {
    esf_core::sieve(limit.max(DEFAULT_SIEVE_LIMIT)).map_err(to_py_err)
}

/// `S(n,i,k)`: the k-th elementary symmetric function of `{1, 1/2, ..., 1/n}`
/// without `1/i`.
#[pyfunction]
fn exact_s(py: Python<'_>, n: u64, i: u64, k: usize) -> PyResult<Bound<'_, PyAny>> {
    let v = esf_core::exact_s(n, i, k).map_err(to_py_err)?;
    fraction(py, &v)
}

/// `T(n,k)`: the k-th elementary symmetric function of `{1, 1/2, ..., 1/n}`.
#[pyfunction]
fn exact_t(py: Python<'_>, n: u64, k: usize) -> PyResult<Bound<'_, PyAny>> {
    let v = esf_core::exact_t(n, k).map_err(to_py_err)?;
    fraction(py, &v)
}

#[pyfunction]
fn k_cap(n: u64) -> usize {
    esf_core::k_cap(n)
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "esf")]
#[derive(Clone)]
struct Certificate {
    n: u64,
    k: u64,
    p: u64,
    window_lo: String,
    window_hi: String,
    threshold: u64,
    multiples_in_range: u64,
}

#[pymethods]
impl Certificate {
    fn __repr__(&self) -> String {
        format!("Certificate(n={}, k={}, p={})", self.n, self.k, self.p)
    }
}

impl From<&esf_core::Certificate> for Certificate {
    fn from(c: &esf_core::Certificate) -> Self {
        Certificate {
            n: c.n,
            k: c.k,
            p: c.p,
            window_lo: c.window_lo.to_string(),
            window_hi: c.window_hi.to_string(),
            threshold: c.threshold,
            multiples_in_range: c.multiples_in_range,
        }
    }
}

/// Largest prime certifying `(n, k)`, or `None`.
#[pyfunction]
fn find_certificate(n: u64, k: u64) -> PyResult<Option<Certificate>> {
    let table = table_for(n)?;
    let cert = esf_core::find_certificate(n, k, &table).map_err(to_py_err)?;
    Ok(cert.as_ref().map(Certificate::from))
}

type CertifyResult = (Vec<Certificate>, Vec<(u64, u64)>);

/// Returns `(certificates, gaps)` for every `n_lo <= n <= n_hi` and `k <= k_cap(n)`.
#[pyfunction]
fn certify_range(n_lo: u64, n_hi: u64) -> PyResult<CertifyResult> {
    let table = table_for(n_hi)?;
    let outcome = esf_core::certify_range(n_lo, n_hi, &table).map_err(to_py_err)?;
    let certs = outcome.certificates().map(Certificate::from).collect();
    Ok((certs, outcome.gaps()))
}

fn parse_real(s: &str) -> PyResult<ExactRational> {
    ExactRational::from_decimal_str(s)
        .or_else(|_| s.parse())
        .map_err(to_py_err)
}

/// Enclosure of Chebyshev's `θ(x)`; `x` is a decimal or `num/den` string.
#[pyfunction]
#[pyo3(signature = (x, bits = DEFAULT_PRECISION_BITS))]
fn theta(x: &str, bits: u32) -> PyResult<(f64, f64)> {
    let x = parse_real(x)?;
    let top: u64 = (x.numer() / x.denom())
        .try_into()
        .map_err(|_| PyValueError::new_err("x out of range"))?;
    let table = esf_core::sieve(top.max(2)).map_err(to_py_err)?;
    let iv = chebyshev::theta(&x, &table, bits).map_err(to_py_err)?;
    Ok(bounds(&iv))
}

#[pyfunction]
#[pyo3(signature = (x_lo = "1429", x_hi = "50216", bits = DEFAULT_PRECISION_BITS))]
fn check_theta_bounds<'py>(
    py: Python<'py>,
    x_lo: &str,
    x_hi: &str,
    bits: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let lo = parse_real(x_lo)?;
    let hi = parse_real(x_hi)?;
    let top: u64 = (hi.numer() / hi.denom())
        .try_into()
        .map_err(|_| PyValueError::new_err("x_hi out of range"))?;
    let table = esf_core::sieve(top.max(2)).map_err(to_py_err)?;
    let r = chebyshev::check_theta_bounds(&lo, &hi, &table, bits).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("passed", r.passed())?;
    d.set_item("segments_checked", r.segments_checked)?;
    d.set_item("min_lower_gap", r.min_lower_gap)?;
    d.set_item("min_upper_gap", r.min_upper_gap)?;
    d.set_item("max_theta_radius", r.max_theta_radius)?;
    d.set_item(
        "violations",
        r.violations
            .iter()
            .map(|v| (v.x.clone(), v.bound))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// The large-`n` margin and its side conditions, as `(lower, upper)` pairs.
#[pyfunction]
#[pyo3(signature = (n, bits = DEFAULT_PRECISION_BITS))]
fn case1_margin(py: Python<'_>, n: u64, bits: u32) -> PyResult<Bound<'_, PyDict>> {
    let m = chebyshev::case1_margin(n, bits).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("n", m.n)?;
    d.set_item("margin", bounds(&m.margin))?;
    d.set_item("window_floor", bounds(&m.window_floor))?;
    d.set_item("product_gap", bounds(&m.product_gap))?;
    d.set_item("cubic_gap", bounds(&m.cubic_gap))?;
    d.set_item("holds", m.holds())?;
    Ok(d)
}

/// Runs the exhaustive scan and returns the summary as a dict.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (n_start, n_end, out, jobs = 1, checkpoint = None, resume = false, checkpoint_every = 100))]
fn scan<'py>(
    py: Python<'py>,
    n_start: u64,
    n_end: u64,
    out: PathBuf,
    jobs: usize,
    checkpoint: Option<PathBuf>,
    resume: bool,
    checkpoint_every: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut config = esf_core::ScanConfig::new(n_start, n_end, out);
    config.jobs = jobs;
    config.checkpoint_path = checkpoint;
    config.resume = resume;
    config.checkpoint_every = checkpoint_every;
    let report = esf_core::scan(&config).map_err(to_py_err)?;
    let json = serde_json::to_string(&report).expect("report serializes");
    py.import("json")?.getattr("loads")?.call1((json,))
}

#[pymodule]
fn esf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(exact_s, m)?)?;
    m.add_function(wrap_pyfunction!(exact_t, m)?)?;
    m.add_function(wrap_pyfunction!(k_cap, m)?)?;
    m.add_function(wrap_pyfunction!(find_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(certify_range, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(check_theta_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(case1_margin, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    Ok(())
}
