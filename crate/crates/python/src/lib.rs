//! Python bindings: groups, measures, semi-measures, decompositions, probes
//! and the corpus. Structured results cross the boundary as plain dicts.

use eberlein_core as core;
use eberlein_core::corpus::{self, CorpusObject};
use eberlein_core::semimeasure::DEFAULT_SEED;
use eberlein_core::{CompactSet, Complex64, K2Function, Point, UnitBallBattery};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::ResolutionExhausted { .. } | core::Error::EvaluationDidNotConverge { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn point_of(group: &core::GroupSpec, chi: &Bound<'_, PyAny>) -> PyResult<Point> {
    if group.is_finite() {
        if let Ok(k) = chi.extract::<i64>() {
            return Ok(Point::Residues(vec![k]));
        }
        return Ok(Point::Residues(chi.extract()?));
    }
    Ok(Point::Real(chi.extract()?))
}

#[pyclass(name = "Group", frozen, from_py_object)]
#[derive(Clone)]
struct PyGroup(core::GroupSpec);

#[pymethods]
impl PyGroup {
    #[staticmethod]
    fn finite(orders: Vec<u64>) -> PyResult<Self> {
        core::GroupSpec::finite(orders).map(PyGroup).map_err(err)
    }

    #[staticmethod]
    fn real_line(half_width: f64, step: f64) -> PyResult<Self> {
        core::GroupSpec::real_line(half_width, step).map(PyGroup).map_err(err)
    }

    fn dual(&self) -> Self {
        PyGroup(self.0.dual())
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    #[getter]
    fn sample_count(&self) -> usize {
        self.0.sample_count()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("Group({})", self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// A `K₂` test function.
#[pyclass(name = "Function", frozen, from_py_object)]
#[derive(Clone)]
struct PyFunction(K2Function);

#[pymethods]
impl PyFunction {
    /// Values at every element of a finite group, row-major.
    #[staticmethod]
    fn finite(group: &PyGroup, values: Vec<Complex64>) -> PyResult<Self> {
        K2Function::from_finite_values(&group.0, values).map(PyFunction).map_err(err)
    }

    /// `b * b̃` for a centred bump `b`; support `[center - 2w, center + 2w]`.
    #[staticmethod]
    fn bump_pair(group: &PyGroup, center: f64, half_width: f64) -> PyResult<Self> {
        K2Function::bump_pair(&group.0, center, half_width).map(PyFunction).map_err(err)
    }

    #[staticmethod]
    fn gaussian(group: &PyGroup, center: f64, sigma: f64) -> PyResult<Self> {
        K2Function::gaussian(&group.0, center, sigma).map(PyFunction).map_err(err)
    }

    fn fourier(&self, chi: &Bound<'_, PyAny>) -> PyResult<Complex64> {
        let chi = point_of(self.0.group(), chi)?;
        self.0.fourier(&chi).map_err(err)
    }

    fn fourier_inverse(&self, chi: &Bound<'_, PyAny>) -> PyResult<Complex64> {
        let chi = point_of(self.0.group(), chi)?;
        self.0.fourier_inverse(&chi).map_err(err)
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.realized().values().to_vec()
    }

    fn add(&self, other: &PyFunction) -> PyResult<Self> {
        self.0.add(&other.0).map(PyFunction).map_err(err)
    }

    fn scale(&self, c: Complex64) -> Self {
        PyFunction(self.0.scale(c))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.to_json())
    }
}

#[pyclass(name = "Measure", frozen, from_py_object)]
#[derive(Clone)]
struct PyMeasure(core::ConcreteMeasure);

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(d).map(PyMeasure)
    }

    #[staticmethod]
    fn from_finite_weights(group: &PyGroup, weights: Vec<Complex64>) -> PyResult<Self> {
        core::ConcreteMeasure::from_finite_weights(&group.0, &weights).map(PyMeasure).map_err(err)
    }

    #[staticmethod]
    fn dirac(group: &PyGroup, at: &Bound<'_, PyAny>) -> PyResult<Self> {
        let at = point_of(&group.0, at)?;
        core::ConcreteMeasure::dirac(&group.0, at).map(PyMeasure).map_err(err)
    }

    #[staticmethod]
    fn haar(group: &PyGroup) -> PyResult<Self> {
        core::ConcreteMeasure::haar(&group.0).map(PyMeasure).map_err(err)
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup(self.0.group().clone())
    }

    fn finite_weights(&self) -> PyResult<Vec<Complex64>> {
        self.0.finite_weights().map_err(err)
    }

    fn fourier_transform(&self) -> PyResult<Self> {
        self.0.fourier_transform().map(PyMeasure).map_err(err)
    }

    fn inverse_fourier_transform(&self) -> PyResult<Self> {
        self.0.inverse_fourier_transform().map(PyMeasure).map_err(err)
    }

    fn total_mass(&self) -> f64 {
        self.0.total_mass()
    }

    fn add(&self, other: &PyMeasure) -> PyResult<Self> {
        self.0.add(&other.0).map(PyMeasure).map_err(err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("Measure(on {}, {} atoms)", self.0.group(), self.0.atoms().len())
    }
}

#[pyclass(name = "SemiMeasure", frozen, from_py_object)]
#[derive(Clone)]
struct PySemiMeasure(core::SemiMeasure);

#[pymethods]
impl PySemiMeasure {
    /// `ϑ(f) = ∫ f̌ dν` for a measure `ν` on the dual group.
    #[staticmethod]
    fn from_dual(nu: &PyMeasure) -> PyResult<Self> {
        core::SemiMeasure::from_dual(nu.0.clone()).map(PySemiMeasure).map_err(err)
    }

    /// Lift of a measure on a finite group.
    #[staticmethod]
    fn lift(mu: &PyMeasure) -> PyResult<Self> {
        core::SemiMeasure::lift(&mu.0).map(PySemiMeasure).map_err(err)
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(d).map(PySemiMeasure)
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup(self.0.group().clone())
    }

    #[getter]
    fn dual_measure(&self) -> PyMeasure {
        PyMeasure(self.0.dual_measure().clone())
    }

    fn evaluate(&self, f: &PyFunction) -> PyResult<Complex64> {
        self.0.evaluate(&f.0).map_err(err)
    }

    /// `ϑ*f` on the window grid.
    fn convolve(&self, f: &PyFunction) -> PyResult<Vec<Complex64>> {
        self.0.convolve(&f.0).map(|c| c.window_values()).map_err(err)
    }

    fn add(&self, other: &PySemiMeasure) -> PyResult<Self> {
        self.0.add(&other.0).map(PySemiMeasure).map_err(err)
    }

    fn scale(&self, c: Complex64) -> Self {
        PySemiMeasure(self.0.scale(c))
    }

    #[pyo3(signature = (seed = None))]
    fn is_positive_definite<'py>(&self, py: Python<'py>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.is_positive_definite(seed.unwrap_or(DEFAULT_SEED)).map_err(err)?)
    }

    /// Four positive definite semi-measures `ρ₁ − ρ₂ + i(ρ₃ − ρ₄)`.
    fn split_positive_definite(&self) -> PyResult<Vec<PySemiMeasure>> {
        Ok(self.0.split_positive_definite().map_err(err)?.into_iter().map(PySemiMeasure).collect())
    }

    /// `(strong, null_ac, null_sc)`.
    fn generalized_eberlein(&self) -> PyResult<(PySemiMeasure, PySemiMeasure, PySemiMeasure)> {
        let p = core::generalized_eberlein(&self.0).map_err(err)?;
        Ok((PySemiMeasure(p.strong), PySemiMeasure(p.null_ac), PySemiMeasure(p.null_sc)))
    }

    fn fb_coefficient(&self, chi: &Bound<'_, PyAny>) -> PyResult<Complex64> {
        let chi = point_of(&self.0.group().dual(), chi)?;
        core::fb_coefficient(&self.0, &chi).map_err(err)
    }

    fn fb_series<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &core::fb_series(&self.0))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("SemiMeasure(on {})", self.0.group())
    }
}

fn default_u(g: &core::GroupSpec) -> f64 {
    if g.is_finite() {
        1.0
    } else {
        (g.half_width() / 4.0).min(1.0)
    }
}

/// Measure-ness probe on the dual measure; `k` is an interval `(a, b)` on
/// the real line and ignored on finite groups.
#[pyfunction]
#[pyo3(signature = (sm, u = None, k = None, n_max = 12))]
fn measure_probe<'py>(
    py: Python<'py>,
    sm: &PySemiMeasure,
    u: Option<f64>,
    k: Option<(f64, f64)>,
    n_max: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let g = sm.0.group();
    let u = u.unwrap_or_else(|| default_u(g));
    let k = if g.is_finite() {
        CompactSet::Points((0..g.sample_count()).map(|i| g.residues_of(i)).collect())
    } else {
        let (a, b) = k.unwrap_or((-u, u));
        CompactSet::Interval([a, b])
    };
    to_py(py, &core::measure_probe(sm.0.dual_measure(), u, &k, n_max).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (sm, u = None, size = 32, seed = None))]
fn translation_bounded_probe<'py>(
    py: Python<'py>,
    sm: &PySemiMeasure,
    u: Option<f64>,
    size: usize,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let g = sm.0.group();
    let battery = UnitBallBattery::new(g, u.unwrap_or_else(|| default_u(g)), size, seed.unwrap_or(DEFAULT_SEED))
        .map_err(err)?;
    to_py(py, &core::translation_bounded_probe(&sm.0, &battery).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (sm, pairs))]
fn intertwining_check<'py>(
    py: Python<'py>,
    sm: &PySemiMeasure,
    pairs: Vec<(PyFunction, PyFunction)>,
) -> PyResult<Bound<'py, PyAny>> {
    let pairs: Vec<_> = pairs.into_iter().map(|(f, g)| (f.0, g.0)).collect();
    to_py(py, &core::intertwining_check(&sm.0, &pairs).map_err(err)?)
}

/// `L^p` class of the density of a measure on a dual group.
#[pyfunction]
#[pyo3(signature = (nu, p = 2.0))]
fn density_class_check<'py>(py: Python<'py>, nu: &PyMeasure, p: f64) -> PyResult<Bound<'py, PyAny>> {
    let h = nu.0.ac_density().ok_or_else(|| PyValueError::new_err("the measure has no density"))?;
    to_py(py, &core::density_class_check(h, p).map_err(err)?)
}

#[pyfunction]
fn corpus_list<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &corpus::list())
}

/// A semi-measure or a measure, depending on the entry.
#[pyfunction]
fn corpus_build(py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
    Ok(match corpus::build(name).map_err(err)? {
        CorpusObject::SemiMeasure(sm) => Py::new(py, PySemiMeasure(sm))?.into_any(),
        CorpusObject::Measure(m) => Py::new(py, PyMeasure(m))?.into_any(),
    })
}

#[pymodule]
fn eberlein(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PySemiMeasure>()?;
    m.add_function(wrap_pyfunction!(measure_probe, m)?)?;
    m.add_function(wrap_pyfunction!(translation_bounded_probe, m)?)?;
    m.add_function(wrap_pyfunction!(intertwining_check, m)?)?;
    m.add_function(wrap_pyfunction!(density_class_check, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_list, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_build, m)?)?;
    Ok(())
}
