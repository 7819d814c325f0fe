//! Python bindings: thin wrappers over the polynomial, measure, norm,
//! bound, and suite machinery. Everything delegates to the core crate;
//! nothing here adds behaviour beyond type conversion and error mapping.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use remez_lab_core::bounds;
use remez_lab_core::certifier::tightness::tightness_exponential;
use remez_lab_core::cli::run_report;
use remez_lab_core::config::{Command, ExperimentConfig};
use remez_lab_core::measures::{MeasureSpec, SetSpec};
use remez_lab_core::norms::{self, EstimatorOptions};
use remez_lab_core::poly::Polynomial;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Sparse real polynomial in n variables.
#[pyclass(name = "Poly", from_py_object)]
#[derive(Clone)]
struct Poly {
    inner: Polynomial,
}

#[pymethods]
impl Poly {
    /// Build from (multi-index, coefficient) terms.
    #[new]
    fn new(dim: usize, terms: Vec<(Vec<u32>, f64)>) -> PyResult<Self> {
        Ok(Poly { inner: Polynomial::new(dim, terms).map_err(value_err)? })
    }

    /// Dense univariate coefficients, constant first.
    #[staticmethod]
    fn univariate(coeffs: Vec<f64>) -> Self {
        Poly { inner: Polynomial::univariate(&coeffs) }
    }

    /// Parse the text form produced by str().
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Poly { inner: Polynomial::from_text(text).map_err(value_err)? })
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&x).map_err(value_err)
    }

    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Poly({:?})", self.inner.to_text())
    }
}

/// Log-concave probability law with a seeded sampler.
#[pyclass(name = "Measure", skip_from_py_object)]
#[derive(Clone)]
struct Measure {
    inner: MeasureSpec,
}

#[pymethods]
impl Measure {
    /// Uniform law on [-1, 1]^n.
    #[staticmethod]
    #[pyo3(name = "box")]
    fn box_(n: usize) -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::uniform_box(n).map_err(value_err)? })
    }

    /// Uniform law on the unit euclidean ball.
    #[staticmethod]
    fn ball(n: usize) -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::uniform_ball(n).map_err(value_err)? })
    }

    /// Uniform law on the standard simplex.
    #[staticmethod]
    fn simplex(n: usize) -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::uniform_simplex(n).map_err(value_err)? })
    }

    /// Standard gaussian on R^n.
    #[staticmethod]
    fn gaussian(n: usize) -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::gaussian_standard(n).map_err(value_err)? })
    }

    /// Density e^{-t} on the half-line.
    #[staticmethod]
    fn exponential() -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::exponential_halfline().map_err(value_err)? })
    }

    /// Uniform law on [a, b].
    #[staticmethod]
    fn interval(a: f64, b: f64) -> PyResult<Self> {
        Ok(Measure { inner: MeasureSpec::interval_uniform(a, b).map_err(value_err)? })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Draw m points; identical (m, seed) pairs give identical clouds.
    fn sample(&self, m: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        let points = self.inner.sample(m, seed).map_err(value_err)?;
        Ok(points.iter().map(|x| x.to_vec()).collect())
    }
}

/// Restriction set: where a conditional norm lives.
#[pyclass(name = "Set", skip_from_py_object)]
#[derive(Clone)]
struct Set {
    inner: SetSpec,
}

#[pymethods]
impl Set {
    /// Union of closed intervals (1-D measures only).
    #[staticmethod]
    fn intervals(intervals: Vec<(f64, f64)>) -> Self {
        Set { inner: SetSpec::Intervals { intervals } }
    }

    /// {x : <normal, x> <= offset}.
    #[staticmethod]
    fn halfspace(normal: Vec<f64>, offset: f64) -> Self {
        Set { inner: SetSpec::Halfspace { normal, offset } }
    }

    /// {x : q(x) <= threshold}.
    #[staticmethod]
    fn sublevel(poly: Poly, threshold: f64) -> Self {
        Set { inner: SetSpec::Sublevel { poly: poly.inner, threshold } }
    }
}

fn options(samples: usize, monte_carlo: bool) -> EstimatorOptions {
    let opts = EstimatorOptions::default().with_samples(samples);
    if monte_carlo {
        opts.monte_carlo_only()
    } else {
        opts
    }
}

/// ||f||_p against mu, as (value, radius). Exact paths report radius 0.
#[pyfunction]
#[pyo3(signature = (f, mu, p, samples = 100_000, seed = 0, monte_carlo = false))]
fn lp_norm(
    f: &Poly,
    mu: &Measure,
    p: f64,
    samples: usize,
    seed: u64,
    monte_carlo: bool,
) -> PyResult<(f64, f64)> {
    let est = norms::lp_norm(&f.inner, &mu.inner, p, &options(samples, monte_carlo), seed)
        .map_err(value_err)?;
    Ok((est.value, est.radius))
}

/// ||f||_{p,A} against the conditional law mu_A, as (value, radius).
#[pyfunction]
#[pyo3(signature = (f, mu, set, p, samples = 100_000, seed = 0, monte_carlo = false))]
fn restricted_lp_norm(
    f: &Poly,
    mu: &Measure,
    set: &Set,
    p: f64,
    samples: usize,
    seed: u64,
    monte_carlo: bool,
) -> PyResult<(f64, f64)> {
    let est = norms::restricted_lp_norm(
        &f.inner,
        &mu.inner,
        &set.inner,
        p,
        &options(samples, monte_carlo),
        seed,
    )
    .map_err(value_err)?;
    Ok((est.value, est.radius))
}

/// mu(A) as (value, radius); exact in the 1-D uniform/exponential cases.
#[pyfunction]
#[pyo3(signature = (mu, set, samples = 100_000, seed = 0, monte_carlo = false))]
fn set_measure(
    mu: &Measure,
    set: &Set,
    samples: usize,
    seed: u64,
    monte_carlo: bool,
) -> PyResult<(f64, f64)> {
    let est = norms::set_measure(&mu.inner, &set.inner, &options(samples, monte_carlo), seed)
        .map_err(value_err)?;
    Ok((est.value, est.radius))
}

/// Restricted-norm lower-bound factor; the regime switches at pd = 1.
#[pyfunction]
fn theorem1_factor(p: f64, d: u32, mu_a: f64, c: f64) -> PyResult<f64> {
    bounds::theorem1_factor(p, d, mu_a, c).map_err(value_err)
}

/// Both regime branches of the factor, as (small_pd, large_pd).
#[pyfunction]
fn theorem1_branches(p: f64, d: u32, mu_a: f64, c: f64) -> PyResult<(f64, f64)> {
    bounds::theorem1_branches(p, d, mu_a, c).map_err(value_err)
}

/// Level-set bound on mu(|f| <= t), capped at 1.
#[pyfunction]
fn cw_levelset_bound(t: f64, norm_p: f64, p: f64, d: u32, c: f64) -> PyResult<f64> {
    bounds::cw_levelset_bound(t, norm_p, p, d, c).map_err(value_err)
}

/// Sup-norm constant (4/frac)^d for degree-d polynomials.
#[pyfunction]
fn classical_remez_bound(d: u32, frac: f64) -> PyResult<f64> {
    bounds::classical_remez_bound(d, frac).map_err(value_err)
}

/// Sup-norm constant (4n/frac)^d for n-variate degree-d polynomials.
#[pyfunction]
fn bg_bound(n: u32, d: u32, frac: f64) -> PyResult<f64> {
    bounds::bg_bound(n, d, frac).map_err(value_err)
}

/// mu(A)^{1/p} for p < 0; the trivial comparison constant.
#[pyfunction]
fn negative_p_bound(mu_a: f64, p: f64) -> PyResult<f64> {
    bounds::negative_p_bound(mu_a, p).map_err(value_err)
}

/// Closed-form audit of t^d on the exponential law near zero.
#[pyfunction]
#[pyo3(signature = (d, epsilon, c = 4.0))]
fn tightness<'py>(py: Python<'py>, d: u32, epsilon: f64, c: f64) -> PyResult<Bound<'py, PyDict>> {
    let t = tightness_exponential(d, epsilon, c).map_err(value_err)?;
    let out = PyDict::new(py);
    out.set_item("d", t.d)?;
    out.set_item("epsilon", t.epsilon)?;
    out.set_item("full_norm", t.full_norm)?;
    out.set_item("stirling_lower", t.stirling_lower)?;
    out.set_item("restricted_integral", t.restricted_integral)?;
    out.set_item("epsilon_bound", t.epsilon_bound)?;
    out.set_item("mass_ratio", t.mass_ratio)?;
    out.set_item("mu_a", t.mu_a)?;
    out.set_item("restricted_norm", t.restricted_norm)?;
    out.set_item("bound_factor", t.bound_factor)?;
    out.set_item("bound_value", t.bound_value)?;
    Ok(out)
}

/// Run one command against a TOML config string; returns the report JSON.
#[pyfunction]
fn run_suite(command: &str, config_toml: &str) -> PyResult<String> {
    let command = Command::from_label(command)
        .ok_or_else(|| value_err(format!("unknown command \"{command}\"")))?;
    let config = ExperimentConfig::from_toml_str(config_toml).map_err(value_err)?;
    let report = run_report(command, &config).map_err(value_err)?;
    Ok(report.to_json_string())
}

#[pymodule]
fn remez_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Poly>()?;
    m.add_class::<Measure>()?;
    m.add_class::<Set>()?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(restricted_lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(set_measure, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_factor, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_branches, m)?)?;
    m.add_function(wrap_pyfunction!(cw_levelset_bound, m)?)?;
    m.add_function(wrap_pyfunction!(classical_remez_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bg_bound, m)?)?;
    m.add_function(wrap_pyfunction!(negative_p_bound, m)?)?;
    m.add_function(wrap_pyfunction!(tightness, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
