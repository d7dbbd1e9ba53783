//! Python module `localfield`: the Lorentz medium, rate decomposition,
//! `r_min` solver and consistency checks.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use localfield::rmin_solver::{DEFAULT_SCAN_POINTS, DEFAULT_TOL};
use localfield::{CavityGeometry, Dielectric, Error, LorentzMedium, Permittivity, SpectrumGrid, StructureConstant};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } | Error::NoSignChange { .. } | Error::MonotonicityViolation { .. } => {
            PyArithmeticError::new_err(format!("{}: {e}", e.tag()))
        }
        _ => PyValueError::new_err(format!("{}: {e}", e.tag())),
    }
}

fn grid(omega_t: f64, points: usize) -> PyResult<SpectrumGrid> {
    SpectrumGrid::around_resonance(omega_t, points).map_err(to_py)
}

/// Damped Lorentz oscillator permittivity.
#[pyclass(name = "LorentzMedium", frozen, from_py_object)]
#[derive(Clone)]
struct PyLorentz {
    inner: LorentzMedium,
}

#[pymethods]
impl PyLorentz {
    #[new]
    #[pyo3(signature = (gamma, coupling = localfield::DEFAULT_COUPLING, omega_t = 1.0))]
    fn new(gamma: f64, coupling: f64, omega_t: f64) -> PyResult<Self> {
        LorentzMedium::new(omega_t, coupling, gamma).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.inner.coupling()
    }

    #[getter]
    fn omega_t(&self) -> f64 {
        self.inner.omega_t()
    }

    /// `(eps_re, eps_im)` at `omega`.
    fn epsilon(&self, omega: f64) -> PyResult<(f64, f64)> {
        let e = self.inner.epsilon(omega).map_err(to_py)?;
        Ok((e.re, e.im))
    }

    fn static_epsilon(&self) -> f64 {
        self.inner.static_epsilon()
    }

    fn longitudinal_frequency(&self) -> f64 {
        self.inner.longitudinal_frequency()
    }

    /// Rate decomposition in units of the vacuum rate, as a dict.
    fn rates(&self, omega: f64, r: f64) -> PyResult<RateDict> {
        let geom = CavityGeometry::from_r(r, self.inner.omega_t()).map_err(to_py)?;
        let (_, _, b) = localfield::rates_for_medium(&self.inner, omega, &geom).map_err(to_py)?;
        Ok(RateDict::from([
            ("total", b.total),
            ("perp", b.perp),
            ("par", b.par),
            ("cl_perp", b.cl_perp),
            ("cl_par", b.cl_par),
            ("noise_perp", b.noise_perp),
            ("noise_par", b.noise_par),
            ("cross_perp", b.cross_perp),
            ("cross_par", b.cross_par),
        ]))
    }

    /// `(omega, value)` of the smallest transverse rate on the scan grid.
    #[pyo3(signature = (r, points = DEFAULT_SCAN_POINTS))]
    fn min_gamma_perp(&self, r: f64, points: usize) -> PyResult<(f64, f64)> {
        let m = localfield::min_gamma_perp(&self.inner, r, &grid(self.inner.omega_t(), points)?).map_err(to_py)?;
        Ok((m.omega, m.value))
    }

    /// `(r_min, omega_critical)`.
    #[pyo3(signature = (tol = DEFAULT_TOL, points = DEFAULT_SCAN_POINTS))]
    fn find_r_min(&self, tol: f64, points: usize) -> PyResult<(f64, f64)> {
        let res = localfield::find_r_min(&self.inner, &grid(self.inner.omega_t(), points)?, tol).map_err(to_py)?;
        Ok((res.r_min, res.omega_critical))
    }

    fn __repr__(&self) -> String {
        format!(
            "LorentzMedium(gamma={}, coupling={}, omega_t={})",
            self.inner.gamma(),
            self.inner.coupling(),
            self.inner.omega_t()
        )
    }
}

type RateDict = BTreeMap<&'static str, f64>;

/// `(eta, kappa)` for the principal square root of `eps_re + i eps_im`.
#[pyfunction]
fn refractive_index(eps_re: f64, eps_im: f64) -> PyResult<(f64, f64)> {
    let n = localfield::refractive_index(Permittivity::new(eps_re, eps_im)).map_err(to_py)?;
    Ok((n.eta, n.kappa))
}

type RminTuple = (f64, Option<f64>, Option<f64>, String);

/// Rows of `(gamma, r_min, omega_critical, status)`; failed rows carry
/// `None` values and the error tag as status.
#[pyfunction]
#[pyo3(signature = (gammas, coupling = localfield::DEFAULT_COUPLING, tol = DEFAULT_TOL, points = DEFAULT_SCAN_POINTS))]
fn rmin_curve(
    py: Python<'_>,
    gammas: Vec<f64>,
    coupling: f64,
    tol: f64,
    points: usize,
) -> PyResult<Vec<RminTuple>> {
    let base = LorentzMedium::new(1.0, coupling, 0.0).map_err(to_py)?;
    let grid = grid(1.0, points)?;
    let rows = py.detach(|| localfield::rmin_curve(&base, &gammas, &grid, tol));
    Ok(rows
        .into_iter()
        .map(|row| match row.outcome {
            Ok(res) => (row.gamma, Some(res.r_min), Some(res.omega_critical), "ok".to_string()),
            Err(e) => (row.gamma, None, None, e.tag().to_string()),
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (eps_static, s = 0.0))]
fn commutator_coefficient(eps_static: f64, s: f64) -> PyResult<f64> {
    let s = StructureConstant::new(s).map_err(to_py)?;
    localfield::commutator_coefficient(eps_static, s).map_err(to_py)
}

/// `(rho, classification)` with classification one of strict, marginal,
/// violated.
#[pyfunction]
#[pyo3(signature = (eps_static, s = 0.0))]
fn validity_margin(eps_static: f64, s: f64) -> PyResult<(f64, String)> {
    let s = StructureConstant::new(s).map_err(to_py)?;
    let m = localfield::validity_margin(eps_static, s).map_err(to_py)?;
    Ok((m.rho, m.class.to_string()))
}

/// Maximum Kramers-Kronig residual of a sampled permittivity.
#[pyfunction]
fn kk_residual(frequencies: Vec<f64>, eps_re: Vec<f64>, eps_im: Vec<f64>) -> PyResult<f64> {
    if eps_re.len() != eps_im.len() {
        return Err(PyValueError::new_err("eps_re and eps_im differ in length"));
    }
    let values = eps_re.into_iter().zip(eps_im).map(|(r, i)| Permittivity::new(r, i)).collect();
    let table = localfield::TabulatedMedium::new(frequencies, values).map_err(to_py)?;
    Ok(localfield::kk_residual(&table).map_err(to_py)?.max_abs)
}

#[pymodule]
#[pyo3(name = "localfield")]
fn localfield_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLorentz>()?;
    m.add_function(wrap_pyfunction!(refractive_index, m)?)?;
    m.add_function(wrap_pyfunction!(rmin_curve, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(validity_margin, m)?)?;
    m.add_function(wrap_pyfunction!(kk_residual, m)?)?;
    m.add("DEFAULT_COUPLING", localfield::DEFAULT_COUPLING)?;
    Ok(())
}
