//! Python bindings for the `qfimirror` library.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::qfimirror::{boundary, dynamics, metrology, qfi};
use ::qfimirror::{AtomSpec, BlochVector, Environment, Error, Method, ParameterTag, Polarization};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Unphysical { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parameter(name: &str) -> PyResult<ParameterTag> {
    match name {
        "theta" => Ok(ParameterTag::Theta),
        "phi" => Ok(ParameterTag::Phi),
        "omega0" => Ok(ParameterTag::Omega0),
        _ => Err(PyValueError::new_err(format!("unknown parameter {name:?}; use theta, phi or omega0"))),
    }
}

fn method(name: &str) -> PyResult<Method> {
    match name {
        "closed_form" => Ok(Method::ClosedForm),
        "bloch_form" => Ok(Method::BlochForm),
        "spectral_form" => Ok(Method::SpectralForm),
        _ => Err(PyValueError::new_err(format!(
            "unknown method {name:?}; use closed_form, bloch_form or spectral_form"
        ))),
    }
}

/// Dipole orientation weights; normalized to unit sum on construction.
#[pyclass(name = "Polarization", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyPolarization(Polarization);

#[pymethods]
impl PyPolarization {
    #[new]
    fn new(x: f64, y: f64, z: f64) -> PyResult<Self> {
        Polarization::new(x, y, z).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn transverse() -> Self {
        Self(Polarization::transverse())
    }

    #[staticmethod]
    fn axial() -> Self {
        Self(Polarization::axial())
    }

    #[staticmethod]
    fn isotropic() -> Self {
        Self(Polarization::isotropic())
    }

    #[getter]
    fn weights(&self) -> (f64, f64, f64) {
        (self.0.alpha_x, self.0.alpha_y, self.0.alpha_z)
    }

    fn __repr__(&self) -> String {
        let (x, y, z) = self.weights();
        format!("Polarization({x}, {y}, {z})")
    }
}

/// Two-level atom: transition frequency, vacuum decay rate, initial Bloch angles.
#[pyclass(name = "Atom", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyAtom(AtomSpec);

#[pymethods]
impl PyAtom {
    #[new]
    #[pyo3(signature = (omega0, gamma0, theta, phi = 0.0))]
    fn new(omega0: f64, gamma0: f64, theta: f64, phi: f64) -> PyResult<Self> {
        AtomSpec::new(omega0, gamma0, theta, phi).map(Self).map_err(to_py)
    }

    /// Atom with gamma0 = 1 and the given gamma0/omega0.
    #[staticmethod]
    #[pyo3(signature = (gamma_over_omega, theta, phi = 0.0))]
    fn dimensionless(gamma_over_omega: f64, theta: f64, phi: f64) -> PyResult<Self> {
        AtomSpec::dimensionless(gamma_over_omega, theta, phi).map(Self).map_err(to_py)
    }

    #[getter]
    fn omega0(&self) -> f64 {
        self.0.omega0
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.0.gamma0
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    fn initial_bloch(&self) -> (f64, f64, f64) {
        let w = self.0.initial_bloch();
        (w.w1, w.w2, w.w3)
    }

    fn __repr__(&self) -> String {
        let a = &self.0;
        format!("Atom(omega0={}, gamma0={}, theta={}, phi={})", a.omega0, a.gamma0, a.theta, a.phi)
    }
}

/// Free space, or a perfect mirror at dimensionless distance `zeta`.
#[pyclass(name = "Environment", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyEnvironment(Environment);

#[pymethods]
impl PyEnvironment {
    #[staticmethod]
    fn unbounded() -> Self {
        Self(Environment::Unbounded)
    }

    #[staticmethod]
    fn boundary(zeta: f64) -> PyResult<Self> {
        Environment::boundary(zeta).map(Self).map_err(to_py)
    }

    #[getter]
    fn zeta(&self) -> Option<f64> {
        match self.0 {
            Environment::Unbounded => None,
            Environment::Boundary { zeta } => Some(zeta),
        }
    }

    fn __repr__(&self) -> String {
        match self.0 {
            Environment::Unbounded => "Environment.unbounded()".into(),
            Environment::Boundary { zeta } => format!("Environment.boundary({zeta})"),
        }
    }
}

#[pyfunction]
fn f_parallel(u: f64) -> PyResult<f64> {
    boundary::f_parallel(u).map_err(to_py)
}

#[pyfunction]
fn f_perp(u: f64) -> PyResult<f64> {
    boundary::f_perp(u).map_err(to_py)
}

/// Orientation-weighted mirror response at distance `zeta`.
#[pyfunction]
fn f_eff(alpha: &PyPolarization, zeta: f64) -> PyResult<f64> {
    boundary::f_eff(&alpha.0, zeta).map_err(to_py)
}

#[pyfunction]
fn effective_decay_rate(atom: &PyAtom, env: &PyEnvironment, alpha: &PyPolarization) -> PyResult<f64> {
    dynamics::effective_decay_rate(&atom.0, &env.0, &alpha.0).map_err(to_py)
}

/// Bloch vector at time `tau`, from the closed-form propagator.
#[pyfunction]
fn evolve(atom: &PyAtom, env: &PyEnvironment, alpha: &PyPolarization, tau: f64) -> PyResult<(f64, f64, f64)> {
    let coeffs = dynamics::kossakowski_coefficients(&atom.0, &env.0, &alpha.0).map_err(to_py)?;
    let w = dynamics::propagate_bloch(atom.0.initial_bloch(), &coeffs, tau).map_err(to_py)?;
    Ok((w.w1, w.w2, w.w3))
}

/// Same trajectory from the adaptive integrator, sampled at `times`.
#[pyfunction]
#[pyo3(signature = (atom, env, alpha, times, rtol = 1e-10, atol = 1e-12))]
fn integrate(
    atom: &PyAtom,
    env: &PyEnvironment,
    alpha: &PyPolarization,
    times: Vec<f64>,
    rtol: f64,
    atol: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let coeffs = dynamics::kossakowski_coefficients(&atom.0, &env.0, &alpha.0).map_err(to_py)?;
    let tol = dynamics::Tolerances { rel: rtol, abs: atol };
    let (states, _) = dynamics::integrate_trajectory(atom.0.initial_bloch(), &coeffs, &times, tol).map_err(to_py)?;
    Ok(states.into_iter().map(|w| (w.w1, w.w2, w.w3)).collect())
}

/// QFI of `param` ("theta", "phi", "omega0") at time `tau`.
#[pyfunction]
#[pyo3(signature = (param, atom, env, alpha, tau, method = "bloch_form"))]
fn qfi_value(
    param: &str,
    atom: &PyAtom,
    env: &PyEnvironment,
    alpha: &PyPolarization,
    tau: f64,
    method: &str,
) -> PyResult<f64> {
    let sample = qfi::qfi_sample(parameter(param)?, self::method(method)?, &atom.0, &env.0, &alpha.0, tau);
    sample.map(|s| s.value).map_err(to_py)
}

/// QFI for a bare Bloch vector and its parameter derivative.
#[pyfunction]
fn qfi_bloch(w: (f64, f64, f64), dw: (f64, f64, f64)) -> PyResult<f64> {
    qfi::qfi_bloch(BlochVector::new(w.0, w.1, w.2), BlochVector::new(dw.0, dw.1, dw.2)).map_err(to_py)
}

#[pyfunction]
fn qfi_frequency_exact(atom: &PyAtom, env: &PyEnvironment, alpha: &PyPolarization, tau: f64) -> PyResult<f64> {
    qfi::qfi_frequency_exact(&atom.0, &env.0, &alpha.0, tau).map_err(to_py)
}

#[pyfunction]
fn qfi_frequency_approx(atom: &PyAtom, env: &PyEnvironment, alpha: &PyPolarization, tau: f64) -> PyResult<f64> {
    qfi::qfi_frequency_approx(&atom.0, &env.0, &alpha.0, tau).map_err(to_py)
}

/// `(tau_star, f_max)` for a single probe at decay rate `gamma`.
#[pyfunction]
fn optimal_single_shot(gamma: f64) -> PyResult<(f64, f64)> {
    let o = metrology::optimal_single_shot(gamma).map_err(to_py)?;
    Ok((o.tau_star, o.f_max))
}

/// `(tau_star, n_star, delta_omega_min)` for repeated probes within `total_time`.
#[pyfunction]
fn optimal_ramsey(total_time: f64, gamma: f64) -> PyResult<(f64, f64, f64)> {
    let p = metrology::optimal_ramsey(total_time, gamma).map_err(to_py)?;
    Ok((p.tau_star, p.n_star, p.delta_omega_min))
}

#[pymodule]
fn qfimirror(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolarization>()?;
    m.add_class::<PyAtom>()?;
    m.add_class::<PyEnvironment>()?;
    m.add_function(wrap_pyfunction!(f_parallel, m)?)?;
    m.add_function(wrap_pyfunction!(f_perp, m)?)?;
    m.add_function(wrap_pyfunction!(f_eff, m)?)?;
    m.add_function(wrap_pyfunction!(effective_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_value, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_bloch, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_frequency_exact, m)?)?;
    m.add_function(wrap_pyfunction!(qfi_frequency_approx, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_single_shot, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_ramsey, m)?)?;
    Ok(())
}
