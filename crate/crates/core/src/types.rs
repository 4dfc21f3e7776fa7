//! Domain values shared by every other module.
//!
//! All quantities are unit-free in the sense that the library never touches
//! physical constants: frequencies and rates share one user-chosen unit, times
//! are in the reciprocal of that unit, and the mirror distance is the
//! dimensionless `zeta = omega0 * z0 / c`. The command line front end fixes
//! `gamma0 = 1`, which makes every time a multiple of `1 / gamma0`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest Bloch norm still accepted as physical.
pub const PHYSICAL_NORM_SLACK: f64 = 1e-9;

/// `gamma0 / omega0` above which the weak-coupling picture is flagged.
pub const WEAK_COUPLING_WARN: f64 = 1e-2;

/// Largest deviation of the raw polarization sum from 1 accepted silently.
pub const POLARIZATION_SUM_WARN: f64 = 1e-6;

/// Non-fatal conditions attached to otherwise valid inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    PolarizationRenormalized { raw_sum: f64 },
    WeakCouplingQuestionable { gamma_over_omega: f64 },
    ShortProbingTime { t_gamma: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::PolarizationRenormalized { raw_sum } => {
                write!(f, "polarization weights summed to {raw_sum}; renormalized to 1")
            }
            Warning::WeakCouplingQuestionable { gamma_over_omega } => write!(
                f,
                "gamma0/omega0 = {gamma_over_omega:e} is large; the Markovian weak-coupling model may not apply"
            ),
            Warning::ShortProbingTime { t_gamma } => write!(
                f,
                "total probing time is only {t_gamma} decay times; the repeated-measurement optimum assumes T >> 1/gamma"
            ),
        }
    }
}

/// Relative polarizability weights of the atomic dipole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarization {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub alpha_z: f64,
    #[serde(skip, default = "unit_sum")]
    raw_sum: f64,
}

fn unit_sum() -> f64 {
    1.0
}

impl Polarization {
    /// Builds a polarization from nonnegative weights, dividing by their sum.
    pub fn new(alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Result<Self> {
        let weights = [alpha_x, alpha_y, alpha_z];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(domain(format!(
                "polarization weights must be finite and nonnegative, got {weights:?}"
            )));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(domain("polarization weights sum to zero"));
        }
        Ok(Self {
            alpha_x: alpha_x / sum,
            alpha_y: alpha_y / sum,
            alpha_z: alpha_z / sum,
            raw_sum: sum,
        })
    }

    /// Dipole parallel to the mirror plane, `(1/2, 1/2, 0)`.
    pub fn transverse() -> Self {
        Self::new(0.5, 0.5, 0.0).unwrap()
    }

    /// Dipole along the mirror normal, `(0, 0, 1)`.
    pub fn axial() -> Self {
        Self::new(0.0, 0.0, 1.0).unwrap()
    }

    pub fn isotropic() -> Self {
        Self::new(1.0, 1.0, 1.0).unwrap()
    }

    /// Sum of the weights before normalization.
    pub fn raw_sum(&self) -> f64 {
        self.raw_sum
    }

    pub fn warning(&self) -> Option<Warning> {
        ((self.raw_sum - 1.0).abs() > POLARIZATION_SUM_WARN)
            .then_some(Warning::PolarizationRenormalized { raw_sum: self.raw_sum })
    }

    /// Combined weight of the two in-plane axes.
    pub fn parallel_weight(&self) -> f64 {
        self.alpha_x + self.alpha_y
    }
}

/// Two-level atom: transition frequency, free-space decay rate and the
/// angles of the initial pure state `cos(theta/2)|+> + e^{i phi} sin(theta/2)|->`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub omega0: f64,
    pub gamma0: f64,
    pub theta: f64,
    pub phi: f64,
}

impl AtomSpec {
    pub fn new(omega0: f64, gamma0: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(domain(format!("omega0 must be positive, got {omega0}")));
        }
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(domain(format!("gamma0 must be positive, got {gamma0}")));
        }
        if gamma0 >= omega0 {
            return Err(domain(format!(
                "gamma0/omega0 = {} must be below 1",
                gamma0 / omega0
            )));
        }
        check_angles(theta, phi)?;
        Ok(Self { omega0, gamma0, theta, phi })
    }

    /// Atom with `gamma0 = 1`, so that times are measured in units of `1/gamma0`.
    pub fn dimensionless(gamma_over_omega: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(gamma_over_omega.is_finite() && gamma_over_omega > 0.0) {
            return Err(domain(format!(
                "gamma0/omega0 must be positive, got {gamma_over_omega}"
            )));
        }
        Self::new(1.0 / gamma_over_omega, 1.0, theta, phi)
    }

    pub fn gamma_over_omega(&self) -> f64 {
        self.gamma0 / self.omega0
    }

    pub fn warning(&self) -> Option<Warning> {
        let ratio = self.gamma_over_omega();
        (ratio > WEAK_COUPLING_WARN)
            .then_some(Warning::WeakCouplingQuestionable { gamma_over_omega: ratio })
    }

    pub fn initial_bloch(&self) -> BlochVector {
        // angles were validated on construction
        bloch_from_angles(self.theta, self.phi).expect("validated angles")
    }
}

fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(domain(format!("theta = {theta} outside [0, pi]")));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(domain(format!("phi = {phi} outside [0, 2 pi)")));
    }
    Ok(())
}

/// Electromagnetic environment of the atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Environment {
    /// Free space.
    Unbounded,
    /// Perfectly reflecting plane at distance `zeta = omega0 z0 / c`.
    Boundary { zeta: f64 },
}

impl Environment {
    pub fn boundary(zeta: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(domain(format!("boundary distance must be positive, got {zeta}")));
        }
        Ok(Environment::Boundary { zeta })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Environment::Unbounded => Ok(()),
            Environment::Boundary { zeta } => Self::boundary(zeta).map(|_| ()),
        }
    }
}

/// Real three-vector `w` with `rho = (I + w . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl BlochVector {
    pub const fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Self { w1, w2, w3 }
    }

    pub const fn ground() -> Self {
        Self::new(0.0, 0.0, -1.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }

    pub fn dot(self, other: Self) -> f64 {
        self.w1 * other.w1 + self.w2 * other.w2 + self.w3 * other.w3
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.w1.abs().max(d.w2.abs()).max(d.w3.abs())
    }

    pub fn is_physical(self) -> bool {
        self.norm() <= 1.0 + PHYSICAL_NORM_SLACK
    }
}

impl Add for BlochVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.w1 + rhs.w1, self.w2 + rhs.w2, self.w3 + rhs.w3)
    }
}

impl Sub for BlochVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.w1 - rhs.w1, self.w2 - rhs.w2, self.w3 - rhs.w3)
    }
}

impl Mul<BlochVector> for f64 {
    type Output = BlochVector;
    fn mul(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self * rhs.w1, self * rhs.w2, self * rhs.w3)
    }
}

/// Plain 2x2 complex matrix, row major.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Validated qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    m: Matrix2,
}

const DENSITY_TOL: f64 = 1e-12;

impl DensityMatrix2 {
    pub fn new(m: Matrix2) -> Result<Self> {
        let trace = m[0][0] + m[1][1];
        if (trace - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(domain(format!("density matrix trace {trace} is not 1")));
        }
        if !is_hermitian(&m, DENSITY_TOL) {
            return Err(domain("density matrix is not Hermitian"));
        }
        let (low, _) = hermitian_eigenvalues(&m);
        if low < -DENSITY_TOL {
            return Err(domain(format!("density matrix has negative eigenvalue {low}")));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.m)
    }
}

pub(crate) fn is_hermitian(m: &Matrix2, tol: f64) -> bool {
    m[0][0].im.abs() <= tol
        && m[1][1].im.abs() <= tol
        && (m[0][1] - m[1][0].conj()).norm() <= tol
}

/// Ascending eigenvalues of a Hermitian 2x2 matrix.
pub(crate) fn hermitian_eigenvalues(m: &Matrix2) -> (f64, f64) {
    let mean = 0.5 * (m[0][0].re + m[1][1].re);
    let half_diff = 0.5 * (m[0][0].re - m[1][1].re);
    let radius = half_diff.hypot(m[0][1].norm());
    (mean - radius, mean + radius)
}

/// Bloch vector of the pure state with polar angle `theta` and phase `phi`.
pub fn bloch_from_angles(theta: f64, phi: f64) -> Result<BlochVector> {
    check_angles(theta, phi)?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(BlochVector::new(st * cp, st * sp, ct))
}

pub fn density_from_bloch(w: BlochVector) -> Result<DensityMatrix2> {
    if !w.is_physical() {
        return Err(Error::Unphysical { norm: w.norm() });
    }
    Ok(DensityMatrix2 { m: matrix_from_bloch(w) })
}

/// `(I + w . sigma) / 2` without any physicality check; also the map from a
/// Bloch derivative to the corresponding `d rho`.
pub fn matrix_from_bloch(w: BlochVector) -> Matrix2 {
    [
        [
            Complex64::new(0.5 * (1.0 + w.w3), 0.0),
            Complex64::new(0.5 * w.w1, -0.5 * w.w2),
        ],
        [
            Complex64::new(0.5 * w.w1, 0.5 * w.w2),
            Complex64::new(0.5 * (1.0 - w.w3), 0.0),
        ],
    ]
}

/// `d rho = (dw . sigma) / 2` for a Bloch-vector derivative.
pub fn derivative_matrix(dw: BlochVector) -> Matrix2 {
    let mut m = matrix_from_bloch(dw);
    m[0][0].re -= 0.5;
    m[1][1].re -= 0.5;
    m
}

pub fn bloch_from_density(rho: &DensityMatrix2) -> BlochVector {
    let m = rho.matrix();
    BlochVector::new(
        m[0][1].re + m[1][0].re,
        m[1][0].im - m[0][1].im,
        (m[0][0] - m[1][1]).re,
    )
}
