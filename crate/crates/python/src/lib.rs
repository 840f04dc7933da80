//! Python bindings for `qrm_patterns`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qrm_patterns::operators::{build_hamiltonian_direct, build_hamiltonian_patterns, build_primitives};
use qrm_patterns::pattern::{self, diagonalize_pattern, pattern_derivatives};
use qrm_patterns::sweep::{self, analyze};
use qrm_patterns::validate::{run_validation, ValidationOptions};
use qrm_patterns::{CouplingMatrix, Error, ModelParams};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidParams(_) | Error::TooFewPoints(_) | Error::PatternIndex(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// `g_c = sqrt(1 + sqrt(1 + Δ²/16))`.
#[pyfunction]
fn critical_coupling(delta: f64) -> f64 {
    pattern::critical_coupling(delta)
}

#[pyfunction]
fn coupling_matrix(delta: f64, g: f64) -> PyResult<[[f64; 3]; 3]> {
    Ok(*CouplingMatrix::new(delta, g).map_err(to_py)?.entries())
}

#[pyclass(frozen, name = "PatternBasis")]
struct PyPatternBasis {
    #[pyo3(get)]
    delta: f64,
    #[pyo3(get)]
    g: f64,
    #[pyo3(get)]
    lambdas: [f64; 3],
    /// Row `n` holds `(u_n1, u_n2, u_n3)` over `(iσ_y, σ_z, a)`.
    #[pyo3(get)]
    rows: [[f64; 3]; 3],
    #[pyo3(get)]
    degenerate: bool,
}

#[pymethods]
impl PyPatternBasis {
    /// `Σ_n λ_n u_n u_nᵀ`.
    fn reconstruct(&self) -> [[f64; 3]; 3] {
        self.inner().reconstruct()
    }

    /// `(dλ/dg, d²λ/dg², du/dg)`.
    fn derivatives(&self) -> PyResult<([f64; 3], [f64; 3], [[f64; 3]; 3])> {
        let m = CouplingMatrix::new(self.delta, self.g).map_err(to_py)?;
        let d = pattern_derivatives(&m, &self.inner()).map_err(to_py)?;
        Ok((d.dlambda, d.d2lambda, d.du))
    }

    fn __repr__(&self) -> String {
        format!("PatternBasis(delta={}, g={}, lambdas={:?})", self.delta, self.g, self.lambdas)
    }
}

impl PyPatternBasis {
    fn inner(&self) -> qrm_patterns::PatternBasis {
        qrm_patterns::PatternBasis {
            lambdas: self.lambdas,
            rows: self.rows,
            g: self.g,
            degenerate: self.degenerate,
        }
    }

    fn wrap(delta: f64, b: &qrm_patterns::PatternBasis) -> Self {
        Self {
            delta,
            g: b.g,
            lambdas: b.lambdas,
            rows: b.rows,
            degenerate: b.degenerate,
        }
    }
}

#[pyfunction]
fn pattern_basis(delta: f64, g: f64) -> PyResult<PyPatternBasis> {
    let m = CouplingMatrix::new(delta, g).map_err(to_py)?;
    Ok(PyPatternBasis::wrap(delta, &diagonalize_pattern(&m)))
}

/// Dense Hamiltonian as nested lists; `form` is `"direct"` or `"patterns"`.
#[pyfunction]
#[pyo3(signature = (delta, g, n_max, form = "direct"))]
fn hamiltonian(delta: f64, g: f64, n_max: usize, form: &str) -> PyResult<Vec<Vec<f64>>> {
    let params = ModelParams::new(delta, g, n_max, 1).map_err(to_py)?;
    let p = build_primitives(n_max).map_err(to_py)?;
    let h = match form {
        "direct" => build_hamiltonian_direct(&params, &p).map_err(to_py)?,
        "patterns" => {
            let m = CouplingMatrix::new(delta, g).map_err(to_py)?;
            build_hamiltonian_patterns(&diagonalize_pattern(&m), &p)
        }
        other => return Err(PyValueError::new_err(format!("unknown form {other:?}"))),
    };
    Ok(h.matrix().to_rows())
}

#[pyclass(frozen, skip_from_py_object, name = "StateObservables")]
#[derive(Clone)]
struct PyStateObservables {
    #[pyo3(get)]
    energy: f64,
    #[pyo3(get)]
    pattern_energies: [f64; 3],
    #[pyo3(get)]
    photon_total: f64,
    #[pyo3(get)]
    photon_by_pattern: [f64; 3],
    #[pyo3(get)]
    sigma_x_total: f64,
    #[pyo3(get)]
    sigma_x_by_pattern: [f64; 3],
}

#[pymethods]
impl PyStateObservables {
    fn sum_rule_error(&self) -> f64 {
        self.inner().sum_rule_error()
    }

    fn __repr__(&self) -> String {
        format!(
            "StateObservables(energy={}, photon_total={}, sigma_x_total={})",
            self.energy, self.photon_total, self.sigma_x_total
        )
    }
}

impl PyStateObservables {
    fn inner(&self) -> qrm_patterns::StateObservables {
        qrm_patterns::StateObservables {
            energy: self.energy,
            pattern_energies: self.pattern_energies,
            photon_total: self.photon_total,
            photon_by_pattern: self.photon_by_pattern,
            sigma_x_total: self.sigma_x_total,
            sigma_x_by_pattern: self.sigma_x_by_pattern,
        }
    }
}

impl From<&qrm_patterns::StateObservables> for PyStateObservables {
    fn from(o: &qrm_patterns::StateObservables) -> Self {
        Self {
            energy: o.energy,
            pattern_energies: o.pattern_energies,
            photon_total: o.photon_total,
            photon_by_pattern: o.photon_by_pattern,
            sigma_x_total: o.sigma_x_total,
            sigma_x_by_pattern: o.sigma_x_by_pattern,
        }
    }
}

#[pyclass(frozen, name = "EigenSolution")]
struct PyEigenSolution {
    #[pyo3(get)]
    energies: Vec<f64>,
    #[pyo3(get)]
    states: Vec<Vec<f64>>,
    #[pyo3(get)]
    residual_norm: f64,
    #[pyo3(get)]
    observables: Vec<PyStateObservables>,
    #[pyo3(get)]
    basis: Py<PyPatternBasis>,
}

/// Lowest `k` eigenpairs at coupling `g` with per-pattern observables.
#[pyfunction]
#[pyo3(signature = (delta, g, n_max = 200, k = 4, parity = false))]
fn eigensolve(py: Python<'_>, delta: f64, g: f64, n_max: usize, k: usize, parity: bool) -> PyResult<PyEigenSolution> {
    let params = ModelParams::new(delta, g, n_max, k).map_err(to_py)?;
    let (_, point) = py.detach(|| analyze(&params, parity)).map_err(to_py)?;
    Ok(PyEigenSolution {
        observables: point.observables.iter().map(Into::into).collect(),
        basis: Py::new(py, PyPatternBasis::wrap(delta, &point.basis))?,
        energies: point.solution.energies,
        states: point.solution.states,
        residual_norm: point.solution.residual_norm,
    })
}

#[pyclass(frozen, name = "SweepRecord")]
struct PySweepRecord {
    #[pyo3(get)]
    g: f64,
    #[pyo3(get)]
    g_over_gc: f64,
    #[pyo3(get)]
    energies: Vec<f64>,
    #[pyo3(get)]
    observables: Vec<PyStateObservables>,
    /// `d²E/dg²` per level, `None` at the end points or with FD disabled.
    #[pyo3(get)]
    d2e: Vec<Option<f64>>,
    #[pyo3(get)]
    lambdas: [f64; 3],
    #[pyo3(get)]
    rows: [[f64; 3]; 3],
    record: qrm_patterns::SweepRecord,
}

/// Sweep `g / g_c` over a uniform grid. Returns one record per point.
#[pyfunction]
#[pyo3(signature = (
    delta = 50.0, n_max = 200, k_levels = 4, g_over_gc_min = 0.0, g_over_gc_max = 1.5,
    n_points = 61, fd_enabled = true, parity = false, threads = None,
))]
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    py: Python<'_>,
    delta: f64,
    n_max: usize,
    k_levels: usize,
    g_over_gc_min: f64,
    g_over_gc_max: f64,
    n_points: usize,
    fd_enabled: bool,
    parity: bool,
    threads: Option<usize>,
) -> PyResult<Vec<PySweepRecord>> {
    let config = qrm_patterns::SweepConfig {
        delta,
        n_max,
        k_levels,
        g_over_gc_min,
        g_over_gc_max,
        n_points,
        fd_enabled,
        parity,
        threads,
    };
    let records = py.detach(|| sweep::run_sweep(&config)).map_err(to_py)?;
    Ok(records
        .into_iter()
        .map(|r| PySweepRecord {
            g: r.g,
            g_over_gc: r.g_over_gc,
            energies: r.levels.iter().map(|l| l.energy).collect(),
            observables: r.levels.iter().map(|l| (&l.observables).into()).collect(),
            d2e: r.levels.iter().map(|l| l.d2e).collect(),
            lambdas: r.basis.lambdas,
            rows: r.basis.rows,
            record: r,
        })
        .collect())
}

/// Coupling of the most negative ground-state curvature.
#[pyfunction]
fn locate_transition(records: Vec<PyRef<'_, PySweepRecord>>) -> PyResult<f64> {
    let inner: Vec<_> = records.iter().map(|r| r.record.clone()).collect();
    sweep::locate_transition(&inner).map_err(to_py)
}

/// Run the self-check suite; returns `(name, passed, detail)` triples.
#[pyfunction]
#[pyo3(signature = (delta = 50.0, n_max = 200, n_max_check = None, n_points = 61))]
fn validate(
    py: Python<'_>,
    delta: f64,
    n_max: usize,
    n_max_check: Option<usize>,
    n_points: usize,
) -> PyResult<Vec<(String, bool, String)>> {
    let opts = ValidationOptions {
        delta,
        n_max,
        n_max_check,
        n_points,
        ..ValidationOptions::default()
    };
    let results = py.detach(|| run_validation(&opts)).map_err(to_py)?;
    Ok(results.into_iter().map(|c| (c.name.to_owned(), c.passed, c.detail)).collect())
}

#[pymodule]
fn pyqrm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPatternBasis>()?;
    m.add_class::<PyStateObservables>()?;
    m.add_class::<PyEigenSolution>()?;
    m.add_class::<PySweepRecord>()?;
    m.add_function(wrap_pyfunction!(critical_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_basis, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(eigensolve, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(locate_transition, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
