//! Quantum Fisher information of the evolved atomic state.
//!
//! Three independent routes are provided: closed-form decay laws, the Bloch
//! form `|dw|^2 + (w . dw)^2 / (1 - |w|^2)`, and the spectral sum
//! `2 sum |<m| d rho |n>|^2 / (p_m + p_n)` over the eigenbasis of `rho`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, DissipatorCoefficients};
use crate::error::{domain, Error, Result};
use crate::types::{
    derivative_matrix, density_from_bloch, is_hermitian, AtomSpec, BlochVector, DensityMatrix2,
    Environment, Matrix2, Polarization,
};

/// Below this value of `1 - |w|^2` the state counts as pure.
pub const PURE_EPS: f64 = 1e-9;

/// Spectral terms with `p_m + p_n` below this are dropped.
pub const EIGEN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterTag {
    Theta,
    Phi,
    Omega0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    BlochForm,
    SpectralForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiSample {
    pub tau: f64,
    pub value: f64,
    pub method: Method,
}

/// Bloch-vector form of the QFI for a qubit.
pub fn qfi_bloch(w: BlochVector, dw: BlochVector) -> Result<f64> {
    if !w.is_physical() {
        return Err(Error::Unphysical { norm: w.norm() });
    }
    let gap = 1.0 - w.norm_sqr();
    let overlap = w.dot(dw);
    if gap < PURE_EPS {
        if overlap.abs() > PURE_EPS.sqrt() {
            return Err(Error::InconsistentDerivative { overlap: overlap.abs() });
        }
        return Ok(dw.norm_sqr());
    }
    Ok(dw.norm_sqr() + overlap * overlap / gap)
}

/// Spectral form of the QFI from `rho` and its parameter derivative.
pub fn qfi_spectral(rho: &DensityMatrix2, drho: &Matrix2) -> Result<f64> {
    if !is_hermitian(drho, 1e-12) {
        return Err(domain("derivative of rho is not Hermitian"));
    }
    let tr = drho[0][0] + drho[1][1];
    if tr.norm() > 1e-12 {
        return Err(domain(format!("derivative of rho has nonzero trace {tr}")));
    }
    let (probs, basis) = eigensystem(rho.matrix());
    let mut total = 0.0;
    for m in 0..2 {
        for n in 0..2 {
            let denom = probs[m] + probs[n];
            if denom < EIGEN_EPS {
                continue;
            }
            let element = sandwich(&basis[m], drho, &basis[n]);
            total += element.norm_sqr() / denom;
        }
    }
    Ok(2.0 * total)
}

/// `<a| M |b>`.
fn sandwich(a: &[Complex64; 2], m: &Matrix2, b: &[Complex64; 2]) -> Complex64 {
    let mb = [m[0][0] * b[0] + m[0][1] * b[1], m[1][0] * b[0] + m[1][1] * b[1]];
    a[0].conj() * mb[0] + a[1].conj() * mb[1]
}

/// Eigenvalues and orthonormal eigenvectors of a Hermitian 2x2 matrix.
fn eigensystem(m: &Matrix2) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let (lo, hi) = crate::types::hermitian_eigenvalues(m);
    let off = m[0][1];
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    if off.norm() <= 1e-15 * (m[0][0].re.abs() + m[1][1].re.abs()).max(1e-300) {
        return if m[0][0].re >= m[1][1].re {
            ([hi, lo], [[one, zero], [zero, one]])
        } else {
            ([hi, lo], [[zero, one], [one, zero]])
        };
    }
    // (M - l) v = 0 with v = (off, l - m00) is well conditioned for the eigenvalue
    // farther from m00; the other vector is its orthogonal complement
    let (first, second) = if (hi - m[0][0].re).abs() >= (lo - m[0][0].re).abs() {
        (hi, lo)
    } else {
        (lo, hi)
    };
    let v = [off, Complex64::new(first - m[0][0].re, 0.0)];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v = [v[0] / norm, v[1] / norm];
    let w = [-v[1].conj(), v[0].conj()];
    ([first, second], [v, w])
}

/// Analytic derivative of the evolved Bloch vector with respect to one parameter.
pub fn parameter_derivative(
    param: ParameterTag,
    atom: &AtomSpec,
    env: &Environment,
    alpha: &Polarization,
    tau: f64,
) -> Result<BlochVector> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("evolution time must be nonnegative, got {tau}")));
    }
    let coeffs = dynamics::kossakowski_coefficients(atom, env, alpha)?;
    let gamma = coeffs.decay_rate();
    let transverse = (-0.5 * gamma * tau).exp();
    let longitudinal = (-gamma * tau).exp();
    let (st, ct) = atom.theta.sin_cos();
    let (sp, cp) = (coeffs.omega * tau + atom.phi).sin_cos();
    Ok(match param {
        ParameterTag::Theta => BlochVector::new(ct * cp * transverse, ct * sp * transverse, -st * longitudinal),
        ParameterTag::Phi => BlochVector::new(-st * sp * transverse, st * cp * transverse, 0.0),
        ParameterTag::Omega0 => {
            // level spacing tracks omega0 one-to-one; the rate through gamma0 and f
            let dgamma = dynamics::decay_rate_domega0(atom, env, alpha)?;
            let half = 0.5 * tau * dgamma;
            BlochVector::new(
                st * transverse * (-tau * sp - half * cp),
                st * transverse * (tau * cp - half * sp),
                -tau * dgamma * longitudinal * (ct + coeffs.ratio_ba),
            )
        }
    })
}

fn evolved(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<(BlochVector, DissipatorCoefficients)> {
    let coeffs = dynamics::kossakowski_coefficients(atom, env, alpha)?;
    Ok((dynamics::propagate_bloch(atom.initial_bloch(), &coeffs, tau)?, coeffs))
}

/// QFI through the Bloch form with analytic derivatives.
pub fn qfi_bloch_for(
    param: ParameterTag,
    atom: &AtomSpec,
    env: &Environment,
    alpha: &Polarization,
    tau: f64,
) -> Result<f64> {
    let dw = parameter_derivative(param, atom, env, alpha, tau)?;
    let (w, _) = evolved(atom, env, alpha, tau)?;
    qfi_bloch(w, dw)
}

/// QFI through the spectral sum, building `rho` and `d rho` from the Bloch data.
pub fn qfi_spectral_for(
    param: ParameterTag,
    atom: &AtomSpec,
    env: &Environment,
    alpha: &Polarization,
    tau: f64,
) -> Result<f64> {
    let dw = parameter_derivative(param, atom, env, alpha, tau)?;
    let (w, _) = evolved(atom, env, alpha, tau)?;
    qfi_spectral(&density_from_bloch(w)?, &derivative_matrix(dw))
}

fn closed_decay(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("evolution time must be nonnegative, got {tau}")));
    }
    let coeffs = dynamics::kossakowski_coefficients(atom, env, alpha)?;
    Ok((-coeffs.decay_rate() * tau).exp())
}

/// `F_theta = exp(-gamma0 (1 - f) tau)`.
pub fn qfi_theta_closed(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    closed_decay(atom, env, alpha, tau)
}

/// `F_phi = sin^2(theta) exp(-gamma0 (1 - f) tau)`.
pub fn qfi_phi_closed(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    Ok(atom.theta.sin().powi(2) * closed_decay(atom, env, alpha, tau)?)
}

/// Frequency QFI from the exact model, with no expansion in `gamma0 / omega0`.
pub fn qfi_frequency_exact(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    qfi_bloch_for(ParameterTag::Omega0, atom, env, alpha, tau)
}

/// First-order frequency QFI:
/// `sin^2 e^{-g t} t^2 + 16 g'^2 [1 + sin^2/4 + cos (cos + 2) e^{-g t}] e^{-g t} t^2`
/// with `g = gamma0 (1 - f)` and `g' = dg / d omega0`.
pub fn qfi_frequency_approx(atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("evolution time must be nonnegative, got {tau}")));
    }
    let gamma = dynamics::effective_decay_rate(atom, env, alpha)?;
    let dgamma = dynamics::decay_rate_domega0(atom, env, alpha)?;
    let (st, ct) = atom.theta.sin_cos();
    let decay = (-gamma * tau).exp();
    let t2 = tau * tau;
    let bracket = 1.0 + 0.25 * st * st + ct * (ct + 2.0) * decay;
    Ok(st * st * decay * t2 + 16.0 * dgamma * dgamma * bracket * decay * t2)
}

pub fn qfi_closed(param: ParameterTag, atom: &AtomSpec, env: &Environment, alpha: &Polarization, tau: f64) -> Result<f64> {
    match param {
        ParameterTag::Theta => qfi_theta_closed(atom, env, alpha, tau),
        ParameterTag::Phi => qfi_phi_closed(atom, env, alpha, tau),
        ParameterTag::Omega0 => qfi_frequency_approx(atom, env, alpha, tau),
    }
}

/// QFI of `param` by the requested method.
pub fn qfi_sample(
    param: ParameterTag,
    method: Method,
    atom: &AtomSpec,
    env: &Environment,
    alpha: &Polarization,
    tau: f64,
) -> Result<QfiSample> {
    let value = match method {
        Method::ClosedForm => qfi_closed(param, atom, env, alpha, tau)?,
        Method::BlochForm => qfi_bloch_for(param, atom, env, alpha, tau)?,
        Method::SpectralForm => qfi_spectral_for(param, atom, env, alpha, tau)?,
    };
    Ok(QfiSample { tau, value, method })
}
