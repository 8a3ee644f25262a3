//! Python bindings for mirrorlab.
//!
//! Exact quantities cross the boundary as "p/q" strings and reports as
//! plain dicts decoded from the same JSON the command-line tool emits.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mirrorlab::charts::{chart_transition, ChartLabel};
use mirrorlab::cli;
use mirrorlab::kahler::{self, FiberPoint};
use mirrorlab::lattice::{self, fmt_q, parse_q, LatticeVector, MomentPoint, RationalVector2, Q};
use mirrorlab::series::{self, LaurentSection};
use mirrorlab::tropical::{self, TileOf};
use mirrorlab::{fukaya, gw};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rat(s: &str) -> PyResult<Q> {
    parse_q(s).map_err(err)
}

fn to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A truncated series in τ with rational exponents and coefficients.
#[pyclass(name = "TauSeries", module = "mirrorlab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyTauSeries {
    inner: series::TauSeries,
}

#[pymethods]
impl PyTauSeries {
    /// Series from (exponent, coefficient) pairs of "p/q" strings.
    #[new]
    fn new(terms: Vec<(String, String)>, cutoff: &str) -> PyResult<Self> {
        let terms = terms.iter().map(|(e, c)| Ok((rat(e)?, rat(c)?))).collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: series::TauSeries::from_terms(terms, rat(cutoff)?) })
    }

    #[getter]
    fn cutoff(&self) -> String {
        fmt_q(self.inner.cutoff())
    }

    fn terms(&self) -> Vec<(String, String)> {
        self.inner.terms().iter().map(|(e, c)| (fmt_q(e), fmt_q(c))).collect()
    }

    fn coeff(&self, exponent: &str) -> PyResult<String> {
        Ok(fmt_q(&self.inner.coeff(&rat(exponent)?)))
    }

    fn eval(&self, tau: f64) -> f64 {
        self.inner.eval(tau)
    }

    fn truncate(&self, cutoff: &str) -> PyResult<Self> {
        Ok(Self { inner: self.inner.truncate(&rat(cutoff)?) })
    }

    fn __add__(&self, o: &Self) -> Self {
        Self { inner: self.inner.add(&o.inner) }
    }

    fn __mul__(&self, o: &Self) -> Self {
        Self { inner: self.inner.mul(&o.inner) }
    }

    fn __eq__(&self, o: &Self) -> bool {
        self.inner.agrees_with(&o.inner) && self.inner.cutoff() == o.inner.cutoff()
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!("TauSeries({})", self.inner)
    }
}

/// A theta section: Laurent polynomial in x with τ-series coefficients.
#[pyclass(name = "ThetaSection", module = "mirrorlab_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyThetaSection {
    inner: LaurentSection,
}

#[pymethods]
impl PyThetaSection {
    #[new]
    fn new(e1: i64, e2: i64, level: i64, cutoff: &str) -> PyResult<Self> {
        let s = series::theta_section(&LatticeVector::new(e1, e2), level, &rat(cutoff)?).map_err(err)?;
        Ok(Self { inner: s })
    }

    #[getter]
    fn level(&self) -> i64 {
        self.inner.level
    }

    #[getter]
    fn cutoff(&self) -> String {
        fmt_q(&self.inner.cutoff)
    }

    /// Map from x-exponent (k1, k2) to its coefficient series.
    fn coeffs(&self) -> BTreeMap<(i64, i64), PyTauSeries> {
        self.inner.coeffs.iter().map(|(k, s)| (*k, PyTauSeries { inner: s.clone() })).collect()
    }

    fn __mul__(&self, o: &Self) -> Self {
        Self { inner: self.inner.mul(&o.inner) }
    }

    /// Decompose this product-level section against the level-l basis, given
    /// the two factors; returns {(e1, e2): TauSeries}.
    #[staticmethod]
    fn decompose(a: &Self, b: &Self, cutoff: &str) -> PyResult<BTreeMap<(i64, i64), PyTauSeries>> {
        let d = series::section_mul_decompose(&a.inner, &b.inner, &rat(cutoff)?).map_err(err)?;
        Ok(d.into_iter().map(|(e, s)| ((e.n1, e.n2), PyTauSeries { inner: s })).collect())
    }

    /// Numerical value at positive real |x| with a rigorous error bound.
    fn evaluate(&self, x1: f64, x2: f64, tau: f64) -> PyResult<(f64, f64)> {
        let a = series::evaluate_numeric(&self.inner, (x1, x2), tau).map_err(err)?;
        Ok((a.value, a.err))
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.to_json())
    }

    fn __repr__(&self) -> String {
        format!("ThetaSection(level={}, cutoff={}, terms={})", self.inner.level, self.cutoff(), self.inner.coeffs.len())
    }
}

/// n1² + n1·n2 + n2².
#[pyfunction]
fn norm_form(n1: i64, n2: i64) -> i64 {
    lattice::norm_form(n1, n2)
}

/// κ(v) = −N(λv) for v in standard coordinates, exactly.
#[pyfunction]
fn kappa(v1: &str, v2: &str) -> PyResult<String> {
    Ok(fmt_q(&lattice::kappa(&RationalVector2::new(rat(v1)?, rat(v2)?))))
}

#[pyfunction]
fn coset_reps(l: i64) -> PyResult<Vec<(i64, i64)>> {
    Ok(lattice::coset_reps(l).map_err(err)?.iter().map(|e| (e.n1, e.n2)).collect())
}

#[pyfunction]
fn functor_check(py: Python<'_>, i: i64, j: i64, k: i64, cutoff: &str) -> PyResult<Py<PyAny>> {
    let rep = fukaya::functor_check(i, j, k, &rat(cutoff)?).map_err(err)?;
    to_py(py, &rep.to_json())
}

/// μ² structure constants {(e1, e2): TauSeries} for inputs e′, e″.
#[pyfunction]
fn mu2(
    i: i64,
    j: i64,
    k: i64,
    e_first: (i64, i64),
    e_second: (i64, i64),
    cutoff: &str,
) -> PyResult<BTreeMap<(i64, i64), PyTauSeries>> {
    let a = LatticeVector::new(e_first.0, e_first.1);
    let b = LatticeVector::new(e_second.0, e_second.1);
    let m = fukaya::mu2_closed(i, j, k, &a, &b, &rat(cutoff)?).map_err(err)?;
    Ok(m.into_iter().map(|(e, s)| ((e.n1, e.n2), PyTauSeries { inner: s })).collect())
}

/// (φ(ξ), maximizers) of the tropical theta function, exactly.
#[pyfunction]
fn trop_phi(xi1: &str, xi2: &str) -> PyResult<(String, Vec<(i64, i64)>)> {
    let t = tropical::trop_phi(&RationalVector2::new(rat(xi1)?, rat(xi2)?));
    Ok((fmt_q(&t.value), t.maximizers.iter().map(|m| (m.n1, m.n2)).collect()))
}

/// Tile index of ξ, or None on a tile boundary.
#[pyfunction]
fn tile_of(xi1: &str, xi2: &str) -> PyResult<Option<(i64, i64)>> {
    Ok(match tropical::tile_of(&RationalVector2::new(rat(xi1)?, rat(xi2)?)) {
        TileOf::Tile(t) => Some((t.m1, t.m2)),
        TileOf::Boundary(_) => None,
    })
}

#[pyfunction]
fn render_svg(x0: &str, y0: &str, x1: &str, y1: &str) -> PyResult<String> {
    Ok(tropical::render_svg(&[rat(x0)?, rat(y0)?, rat(x1)?, rat(y1)?]))
}

fn moment(a: (String, String, String)) -> PyResult<MomentPoint> {
    Ok(MomentPoint::new(rat(&a.0)?, rat(&a.1)?, rat(&a.2)?))
}

#[pyfunction]
fn disc_series(a: (String, String, String), cutoff: &str) -> PyResult<PyTauSeries> {
    Ok(PyTauSeries { inner: gw::disc_series(&moment(a)?, &rat(cutoff)?).map_err(err)? })
}

#[pyfunction]
fn theta_at_moment(a: (String, String, String), cutoff: &str) -> PyResult<PyTauSeries> {
    Ok(PyTauSeries { inner: gw::theta_at_moment(&moment(a)?, &rat(cutoff)?).map_err(err)? })
}

#[pyfunction]
fn sphere_count_c(max_order: &str, window: i64) -> PyResult<PyTauSeries> {
    Ok(PyTauSeries { inner: gw::sphere_count_c(&rat(max_order)?, window).0 })
}

#[pyfunction]
fn differential_table(py: Python<'_>, i: i64, j: i64, cutoff: &str) -> PyResult<Py<PyAny>> {
    to_py(py, &gw::differential_table(i, j, &rat(cutoff)?).map_err(err)?.to_json())
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (i, j, x, tau, cutoff, c_order="3", window=9))]
fn leibniz_check(
    py: Python<'_>,
    i: i64,
    j: i64,
    x: (f64, f64),
    tau: f64,
    cutoff: &str,
    c_order: &str,
    window: i64,
) -> PyResult<Py<PyAny>> {
    let (c, _) = gw::sphere_count_c(&rat(c_order)?, window);
    to_py(py, &gw::leibniz_check(i, j, x, tau, &rat(cutoff)?, &c).map_err(err)?.to_json())
}

/// A fiber point from its logarithmic coordinates L_i = log_T r_i.
fn point(logs: (f64, f64, f64), t: f64, l: u32, p: u32) -> PyResult<FiberPoint> {
    if !(t > 0.0 && t < 1.0) || ![logs.0, logs.1, logs.2].iter().all(|x| x.is_finite()) {
        return Err(PyValueError::new_err("need 0 < T < 1 and finite coordinates"));
    }
    Ok(FiberPoint::from_logs([logs.0, logs.1, logs.2], t, l, p))
}

#[pyfunction]
#[pyo3(signature = (logs, t=0.1, l=40, p=17))]
fn region(logs: (f64, f64, f64), t: f64, l: u32, p: u32) -> PyResult<&'static str> {
    Ok(kahler::region_classify(&point(logs, t, l, p)?).name())
}

/// The metric at a point: matrix, potential part, min eigenvalue, verdict.
#[pyfunction]
#[pyo3(signature = (logs, t=0.1, l=40, p=17, c_base=None))]
fn metric(py: Python<'_>, logs: (f64, f64, f64), t: f64, l: u32, p: u32, c_base: Option<f64>) -> PyResult<Py<PyAny>> {
    let q = point(logs, t, l, p)?;
    let m = kahler::metric(&q, c_base.unwrap_or_else(|| kahler::c_base_default(t, l)));
    let v = serde_json::json!({
        "region": m.region.name(),
        "matrix": m.matrix,
        "potential_matrix": m.potential_matrix,
        "min_eigenvalue": m.min_eigenvalue,
        "positive_definite": m.pd,
    });
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (logs, t=0.1, l=40, p=17))]
fn transport_fractions(logs: (f64, f64, f64), t: f64, l: u32, p: u32) -> PyResult<(f64, f64, f64)> {
    let f = kahler::transport_fractions(&point(logs, t, l, p)?);
    Ok((f[0], f[1], f[2]))
}

#[pyfunction]
fn monodromy_class(xi1: &str, xi2: &str) -> PyResult<(i64, i64)> {
    kahler::monodromy_class(&RationalVector2::new(rat(xi1)?, rat(xi2)?)).map_err(err)
}

/// Coordinates of chart b as monomials in those of chart a ("m1,m2,k").
#[pyfunction]
fn chart_transition_str(a: &str, b: &str) -> PyResult<String> {
    let (a, b) = (ChartLabel::parse(a).map_err(err)?, ChartLabel::parse(b).map_err(err)?);
    Ok(chart_transition(&a, &b).map_err(err)?.display())
}

/// Run a command-line invocation in process; returns (exit code, output).
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String) {
    use clap::Parser as _;
    let argv = std::iter::once("mirrorlab".to_string()).chain(args);
    let parsed = match cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return (if e.use_stderr() { cli::EXIT_USAGE } else { 0 }, e.to_string()),
    };
    match cli::resolve(&parsed, None).and_then(|c| cli::run(&c)) {
        Ok(out) => (out.status.exit_code(), String::from_utf8_lossy(&out.bytes).into_owned()),
        Err(e) => (e.exit_code(), e.message().to_string()),
    }
}

#[pymodule]
fn mirrorlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTauSeries>()?;
    m.add_class::<PyThetaSection>()?;
    m.add_function(wrap_pyfunction!(norm_form, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(coset_reps, m)?)?;
    m.add_function(wrap_pyfunction!(functor_check, m)?)?;
    m.add_function(wrap_pyfunction!(mu2, m)?)?;
    m.add_function(wrap_pyfunction!(trop_phi, m)?)?;
    m.add_function(wrap_pyfunction!(tile_of, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(disc_series, m)?)?;
    m.add_function(wrap_pyfunction!(theta_at_moment, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_count_c, m)?)?;
    m.add_function(wrap_pyfunction!(differential_table, m)?)?;
    m.add_function(wrap_pyfunction!(leibniz_check, m)?)?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    m.add_function(wrap_pyfunction!(metric, m)?)?;
    m.add_function(wrap_pyfunction!(transport_fractions, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy_class, m)?)?;
    m.add_function(wrap_pyfunction!(chart_transition_str, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
