//! Python bindings. Structured results are returned as plain dicts and lists
//! built from the core crate's JSON serialisation; exact rationals appear as
//! strings such as `"3/10"`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use rashba_qes_core::fock::{osp22_generators, verify_relations as core_verify_relations, FockBasis};
use rashba_qes_core::oracle::{self, SpectrumOptions};
use rashba_qes_core::qes::{self, null_spinor};
use rashba_qes_core::{params, DimensionlessParams, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Consistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Reduced parameters `(r, b, kappa)`, held exactly.
#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: DimensionlessParams,
}

#[pymethods]
impl PyParams {
    /// Each value may be an int, a float, or a string like `"3/10"` or `"0.3"`.
    #[new]
    fn new(r: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, kappa: &Bound<'_, PyAny>) -> PyResult<Self> {
        let text = |x: &Bound<'_, PyAny>| -> PyResult<String> { Ok(x.str()?.to_string()) };
        let inner = DimensionlessParams::parse(&text(r)?, &text(b)?, &text(kappa)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (effective_mass, confinement_frequency, cyclotron_frequency, g_factor, bohr_magneton_times_b, rashba_strength, hbar = 1.0))]
    fn from_physical(
        effective_mass: f64,
        confinement_frequency: f64,
        cyclotron_frequency: f64,
        g_factor: f64,
        bohr_magneton_times_b: f64,
        rashba_strength: f64,
        hbar: f64,
    ) -> PyResult<Self> {
        let phys = params::PhysicalParams {
            effective_mass,
            confinement_frequency,
            cyclotron_frequency,
            g_factor,
            bohr_magneton_times_b,
            rashba_strength,
            hbar,
        };
        Ok(Self { inner: params::reduce(&phys).map_err(py_err)? })
    }

    #[getter]
    fn r(&self) -> String {
        self.inner.r().to_string()
    }

    #[getter]
    fn b(&self) -> String {
        self.inner.b().to_string()
    }

    #[getter]
    fn kappa(&self) -> String {
        self.inner.kappa().to_string()
    }

    fn as_floats(&self) -> (f64, f64, f64) {
        (self.inner.r_f64(), self.inner.b_f64(), self.inner.kappa_f64())
    }

    /// The same point with `kappa -> -kappa`.
    fn mirrored(&self) -> Self {
        Self { inner: self.inner.mirrored() }
    }

    fn __repr__(&self) -> String {
        format!("Params(r={}, b={}, kappa={})", self.inner.r(), self.inner.b(), self.inner.kappa())
    }
}

/// The `2(j+1)`-dimensional invariant block at one parameter point.
#[pyclass(name = "QesBlock", frozen)]
struct PyQesBlock {
    inner: qes::QesBlock,
}

#[pymethods]
impl PyQesBlock {
    #[new]
    fn new(j: u32, params: &PyParams) -> Self {
        Self { inner: qes::block_for(j, &params.inner) }
    }

    #[getter]
    fn j(&self) -> u32 {
        self.inner.j()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Exact entries as strings, row by row.
    fn entries(&self) -> Vec<Vec<String>> {
        self.inner.rows().iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        let m = self.inner.to_f64();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    /// Coefficients of `det(C - E)` in ascending powers of `E`, as strings.
    fn determinant(&self) -> PyResult<Vec<String>> {
        Ok(qes::det_polynomial(&self.inner).map_err(py_err)?.poly.to_strings())
    }

    /// `(value, multiplicity, residual)` per distinct root.
    fn roots(&self) -> PyResult<Vec<(Complex64, usize, f64)>> {
        Ok(qes::qes_roots(&self.inner)
            .map_err(py_err)?
            .into_iter()
            .map(|r| (r.value, r.multiplicity, r.residual))
            .collect())
    }

    fn null_spinors(&self, py: Python<'_>, energy: Complex64) -> PyResult<Py<PyAny>> {
        to_py(py, &null_spinor(&self.inner, energy))
    }
}

#[pyfunction]
fn block_constants(py: Python<'_>, j: u32, params: &PyParams) -> PyResult<Py<PyAny>> {
    to_py(py, &rashba_qes_core::block_constants(j, &params.inner))
}

/// Computed determinant against the printed closed form, for `j <= 2`.
#[pyfunction]
fn compare_with_published(py: Python<'_>, j: u32, params: &PyParams) -> PyResult<Py<PyAny>> {
    let bc = rashba_qes_core::block_constants(j, &params.inner);
    to_py(py, &qes::compare_with_published(j, &bc, params.inner.kappa()).map_err(py_err)?)
}

#[pyfunction]
fn transcription_errata(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &qes::transcription_errata())
}

#[pyfunction]
#[pyo3(signature = (n_max = 8, margin = 2, tol = 1e-12))]
fn verify_relations(py: Python<'_>, n_max: usize, margin: usize, tol: f64) -> PyResult<Py<PyAny>> {
    let g = osp22_generators(FockBasis::square(n_max));
    to_py(py, &core_verify_relations(&g, margin, tol).map_err(py_err)?)
}

#[pyfunction]
fn sector_eigenvalues(params: &PyParams, offset: i64, n_max: usize) -> Vec<f64> {
    oracle::sector_eigenvalues(&params.inner, offset, n_max)
}

#[pyfunction]
#[pyo3(signature = (params, levels = 10, rel_tol = 1e-8))]
fn converged_spectrum(py: Python<'_>, params: &PyParams, levels: usize, rel_tol: f64) -> PyResult<Py<PyAny>> {
    let p = params.inner.clone();
    let spectrum = py.detach(move || oracle::converged_spectrum(&p, levels, rel_tol)).map_err(py_err)?;
    to_py(py, &spectrum)
}

/// Matches every real QES root with `j <= j_max` against the converged
/// spectrum; returns the validation report.
#[pyfunction]
#[pyo3(signature = (params, j_max = 2))]
fn validate(py: Python<'_>, params: &PyParams, j_max: u32) -> PyResult<Py<PyAny>> {
    let p = params.inner.clone();
    let (_, report) =
        py.detach(move || oracle::validate_point(&p, j_max, &SpectrumOptions::default())).map_err(py_err)?;
    to_py(py, &report)
}

#[pymodule]
fn rashba_qes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyQesBlock>()?;
    m.add_function(wrap_pyfunction!(block_constants, m)?)?;
    m.add_function(wrap_pyfunction!(compare_with_published, m)?)?;
    m.add_function(wrap_pyfunction!(transcription_errata, m)?)?;
    m.add_function(wrap_pyfunction!(verify_relations, m)?)?;
    m.add_function(wrap_pyfunction!(sector_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(converged_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
