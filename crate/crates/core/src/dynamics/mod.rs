//! Dissipative evolution of the atomic Bloch vector.
//!
//! In the vacuum the Kossakowski matrix reduces to two equal scalars
//! `A = B = gamma / 4` with `gamma = gamma0 (1 - f)`, and the level spacing is
//! the renormalized transition frequency. The Bloch equations are then
//!
//! ```text
//! dw1/dt = -Omega w2 - 2A w1
//! dw2/dt =  Omega w1 - 2A w2
//! dw3/dt = -4A w3 - 4B
//! ```

pub mod integrator;

use serde::{Deserialize, Serialize};

use crate::boundary;
use crate::error::{domain, Error, Result};
use crate::types::{AtomSpec, BlochVector, Environment, Polarization};

pub use integrator::{Stats as IntegrationStats, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipatorCoefficients {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    /// `B / A`, exactly 1 for the vacuum; stored so that `A = B = 0` is well defined.
    pub ratio_ba: f64,
}

impl DissipatorCoefficients {
    /// Vacuum coefficients for a total decay rate `gamma = 4A`.
    pub fn vacuum(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(domain(format!("decay rate must be nonnegative, got {gamma}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(domain(format!("level spacing must be positive, got {omega}")));
        }
        Ok(Self { a: 0.25 * gamma, b: 0.25 * gamma, omega, ratio_ba: 1.0 })
    }

    /// Population decay rate `4A`.
    pub fn decay_rate(&self) -> f64 {
        4.0 * self.a
    }
}

/// `1 - f` for the environment; zero modification in free space.
pub fn rate_factor(env: &Environment, alpha: &Polarization) -> Result<f64> {
    match *env {
        Environment::Unbounded => Ok(1.0),
        Environment::Boundary { zeta } => boundary::one_minus_f_eff(alpha, zeta),
    }
}

/// Effective spontaneous decay rate `gamma0 (1 - f)`.
pub fn effective_decay_rate(atom: &AtomSpec, env: &Environment, alpha: &Polarization) -> Result<f64> {
    Ok(atom.gamma0 * rate_factor(env, alpha)?)
}

/// `d gamma / d omega0` at fixed mirror distance, with the dipole matrix
/// element held fixed so that `d gamma0 / d omega0 = 3 gamma0 / omega0`.
pub fn decay_rate_domega0(atom: &AtomSpec, env: &Environment, alpha: &Polarization) -> Result<f64> {
    let dgamma0 = 3.0 * atom.gamma0 / atom.omega0;
    match *env {
        Environment::Unbounded => Ok(dgamma0),
        Environment::Boundary { zeta } => {
            let z0_over_c = zeta / atom.omega0;
            let df = boundary::df_eff_domega0(alpha, atom.omega0, z0_over_c)?;
            Ok(dgamma0 * boundary::one_minus_f_eff(alpha, zeta)? - atom.gamma0 * df)
        }
    }
}

pub fn kossakowski_coefficients(
    atom: &AtomSpec,
    env: &Environment,
    alpha: &Polarization,
) -> Result<DissipatorCoefficients> {
    env.validate()?;
    DissipatorCoefficients::vacuum(effective_decay_rate(atom, env, alpha)?, atom.omega0)
}

/// Closed-form solution of the Bloch equations from an arbitrary initial vector.
pub fn propagate_bloch(initial: BlochVector, coeffs: &DissipatorCoefficients, tau: f64) -> Result<BlochVector> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("evolution time must be nonnegative, got {tau}")));
    }
    let transverse = (-2.0 * coeffs.a * tau).exp();
    let longitudinal = (-4.0 * coeffs.a * tau).exp();
    let relaxed = -(-4.0 * coeffs.a * tau).exp_m1();
    let (s, c) = (coeffs.omega * tau).sin_cos();
    Ok(BlochVector::new(
        transverse * (initial.w1 * c - initial.w2 * s),
        transverse * (initial.w1 * s + initial.w2 * c),
        initial.w3 * longitudinal - coeffs.ratio_ba * relaxed,
    ))
}

/// Time derivative of the Bloch vector under the master equation.
pub fn lindblad_rhs(w: BlochVector, coeffs: &DissipatorCoefficients) -> BlochVector {
    let DissipatorCoefficients { a, b, omega, .. } = *coeffs;
    BlochVector::new(
        -omega * w.w2 - 2.0 * a * w.w1,
        omega * w.w1 - 2.0 * a * w.w2,
        -4.0 * a * w.w3 - 4.0 * b,
    )
}

fn check_tolerances(tol: Tolerances) -> Result<()> {
    for (name, v) in [("rel_tol", tol.rel), ("abs_tol", tol.abs)] {
        if !(v > 0.0 && v <= 1e-3) {
            return Err(domain(format!("{name} = {v} outside (0, 1e-3]")));
        }
    }
    Ok(())
}

/// Numerical solution of the master equation at each of the nondecreasing `times`.
pub fn integrate_trajectory(
    initial: BlochVector,
    coeffs: &DissipatorCoefficients,
    times: &[f64],
    tol: Tolerances,
) -> Result<(Vec<BlochVector>, IntegrationStats)> {
    check_tolerances(tol)?;
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(domain(format!("evolution time must be nonnegative, got {t}")));
    }
    let rhs = |y: &[f64; 3]| lindblad_rhs(BlochVector::new(y[0], y[1], y[2]), coeffs).to_array();
    let (states, stats) = integrator::integrate(rhs, initial.to_array(), times, tol)?;
    Ok((states.into_iter().map(|y| BlochVector::new(y[0], y[1], y[2])).collect(), stats))
}

pub fn integrate_master_equation(
    initial: BlochVector,
    coeffs: &DissipatorCoefficients,
    tau: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<BlochVector> {
    let (states, _) = integrate_trajectory(initial, coeffs, &[tau], Tolerances { rel: rel_tol, abs: abs_tol })?;
    Ok(states[0])
}

pub fn steady_state(coeffs: &DissipatorCoefficients) -> Result<BlochVector> {
    if coeffs.a <= 0.0 {
        return Err(Error::NoSteadyState);
    }
    Ok(BlochVector::new(0.0, 0.0, -coeffs.ratio_ba))
}

/// One point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRecord {
    pub tau: f64,
    pub bloch: BlochVector,
    pub purity: f64,
}

impl EvolutionRecord {
    pub fn new(tau: f64, bloch: BlochVector) -> Self {
        Self { tau, bloch, purity: bloch.norm() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn free(omega: f64) -> DissipatorCoefficients {
        DissipatorCoefficients::vacuum(1.0, omega).unwrap()
    }

    fn atom() -> AtomSpec {
        AtomSpec::dimensionless(1e-2, PI / 3.0, 0.7).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let iso = Polarization::isotropic();
        let c = kossakowski_coefficients(&atom(), &Environment::Unbounded, &iso).unwrap();
        assert_eq!((c.a, c.b), (0.25, 0.25));
        assert_eq!(c.omega, 100.0);

        let t = Polarization::transverse();
        let shielded = kossakowski_coefficients(&atom(), &Environment::boundary(1e-6).unwrap(), &t).unwrap();
        // 1 - f_par = u^2/5 - 3u^4/280 at u = 2e-6
        let u: f64 = 2e-6;
        let expected = 0.25 * (u * u / 5.0 - 3.0 * u.powi(4) / 280.0);
        assert!((shielded.a - expected).abs() < 1e-12 * expected);
        assert!(shielded.a <= 2.1e-13 && shielded.a == shielded.b);

        let near = kossakowski_coefficients(&atom(), &Environment::boundary(1e-9).unwrap(), &iso).unwrap();
        assert!((near.a - 1.0 / 6.0).abs() < 1e-12);
        assert!(((near.a - near.b) / near.a).abs() <= 1e-15);
    }

    #[test]
    fn propagation_examples() {
        let w0 = atom().initial_bloch();
        let c = free(100.0);
        assert_eq!(propagate_bloch(w0, &c, 0.0).unwrap(), w0);
        assert!(propagate_bloch(w0, &c, -1.0).is_err());

        // populations relax as e^{-gamma tau}, coherences only as e^{-gamma tau / 2}
        let late = propagate_bloch(w0, &c, 20.0).unwrap();
        assert!((late.w3 + 1.0).abs() < 1e-8);
        assert!(late.w1.hypot(late.w2) <= (-10.0f64).exp() * w0.w1.hypot(w0.w2) * (1.0 + 1e-12));
        let axis = propagate_bloch(BlochVector::new(0.0, 0.0, 1.0), &c, 20.0).unwrap();
        assert!(axis.max_abs_diff(BlochVector::ground()) < 1e-8);

        let unitary = DissipatorCoefficients::vacuum(0.0, 3.0).unwrap();
        let w = propagate_bloch(w0, &unitary, 2.0).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-15);
        assert_eq!(w.w3, w0.w3);
        let angle = w.w2.atan2(w.w1) - w0.w2.atan2(w0.w1);
        assert!(((angle - 6.0).rem_euclid(2.0 * PI)).min((6.0 - angle).rem_euclid(2.0 * PI)) < 1e-12);
    }

    #[test]
    fn pure_state_matches_textbook_solution() {
        let (theta, phi, a, omega, tau): (f64, f64, f64, f64, f64) = (1.1, 0.4, 0.3, 7.0, 1.7);
        let c = DissipatorCoefficients { a, b: a, omega, ratio_ba: 1.0 };
        let w = propagate_bloch(bloch_init(theta, phi), &c, tau).unwrap();
        let expected = BlochVector::new(
            theta.sin() * (omega * tau + phi).cos() * (-2.0 * a * tau).exp(),
            theta.sin() * (omega * tau + phi).sin() * (-2.0 * a * tau).exp(),
            theta.cos() * (-4.0 * a * tau).exp() - (1.0 - (-4.0 * a * tau).exp()),
        );
        assert!(w.max_abs_diff(expected) < 1e-15);
    }

    fn bloch_init(theta: f64, phi: f64) -> BlochVector {
        crate::types::bloch_from_angles(theta, phi).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let c = DissipatorCoefficients::vacuum(0.8, 5.0).unwrap();
        assert_eq!(lindblad_rhs(steady_state(&c).unwrap(), &c), BlochVector::new(0.0, 0.0, 0.0));

        let precess = DissipatorCoefficients::vacuum(0.0, 42.0).unwrap();
        assert_eq!(lindblad_rhs(BlochVector::new(1.0, 0.0, 0.0), &precess), BlochVector::new(0.0, 42.0, 0.0));

        let g0 = 1.0;
        let rhs = lindblad_rhs(BlochVector::new(0.0, 0.0, 1.0), &free(10.0));
        assert_eq!(rhs, BlochVector::new(0.0, 0.0, -2.0 * g0));
    }

    #[test]
    fn steady_states() {
        assert_eq!(steady_state(&free(1.0)).unwrap(), BlochVector::ground());
        let sixth = DissipatorCoefficients::vacuum(4.0 / 6.0, 1.0).unwrap();
        assert_eq!(steady_state(&sixth).unwrap(), BlochVector::ground());
        let unitary = DissipatorCoefficients::vacuum(0.0, 1.0).unwrap();
        assert_eq!(steady_state(&unitary).unwrap_err(), Error::NoSteadyState);
    }

    #[test]
    fn integrator_matches_closed_form() {
        let c = free(100.0);
        let w0 = atom().initial_bloch();
        assert_eq!(integrate_master_equation(w0, &c, 0.0, 1e-10, 1e-10).unwrap(), w0);
        let numeric = integrate_master_equation(w0, &c, 5.0, 1e-10, 1e-10).unwrap();
        let exact = propagate_bloch(w0, &c, 5.0).unwrap();
        assert!(numeric.max_abs_diff(exact) < 1e-9, "{}", numeric.max_abs_diff(exact));
    }

    #[test]
    fn integrator_unitary_norm() {
        let omega = 10.0;
        let c = DissipatorCoefficients::vacuum(0.0, omega).unwrap();
        let w0 = atom().initial_bloch();
        let w = integrate_master_equation(w0, &c, 100.0 / omega, 1e-11, 1e-11).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn integrator_rejects_bad_tolerances() {
        let w0 = atom().initial_bloch();
        assert!(integrate_master_equation(w0, &free(1.0), 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_master_equation(w0, &free(1.0), 1.0, 1e-8, 1e-2).is_err());
        assert!(integrate_master_equation(w0, &free(1.0), -1.0, 1e-8, 1e-8).is_err());
    }

    #[test]
    fn generator_consistency() {
        let c = DissipatorCoefficients::vacuum(1.0, 3.0).unwrap();
        let w0 = BlochVector::new(0.2, -0.5, 0.4);
        let h = 1e-5;
        for tau in [0.1, 0.9, 2.5] {
            let plus = propagate_bloch(w0, &c, tau + h).unwrap();
            let minus = propagate_bloch(w0, &c, tau - h).unwrap();
            let fd = (1.0 / (2.0 * h)) * (plus - minus);
            let rhs = lindblad_rhs(propagate_bloch(w0, &c, tau).unwrap(), &c);
            assert!(fd.max_abs_diff(rhs) < 1e-8);
        }
    }

    #[test]
    fn relaxation_monotone_on_grid() {
        let c = free(25.0);
        let w0 = atom().initial_bloch();
        let mut last = (w0 - BlochVector::ground()).norm();
        let mut lowest_purity: f64 = 1.0;
        for i in 1..=1000 {
            let w = propagate_bloch(w0, &c, f64::from(i) * 0.02).unwrap();
            let d = (w - BlochVector::ground()).norm();
            assert!(d <= last + 1e-9);
            assert!(w.norm() <= 1.0 + 1e-9);
            lowest_purity = lowest_purity.min(w.norm());
            last = d;
        }
        // the pure ground state is the attractor, so |w| dips and then returns to 1
        assert!(lowest_purity < 0.9);
        assert!((propagate_bloch(w0, &c, 40.0).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    fn ball_point() -> impl Strategy<Value = BlochVector> {
        (0.0..=1.0f64, 0.0..=PI, 0.0..2.0 * PI)
            .prop_map(|(r, t, p)| r * crate::types::bloch_from_angles(t, p).unwrap())
    }

    proptest! {
        #[test]
        fn semigroup(w in ball_point(), t1 in 0.0..5.0f64, t2 in 0.0..5.0f64, g in 0.0..2.0f64) {
            let c = DissipatorCoefficients::vacuum(g, 13.0).unwrap();
            let split = propagate_bloch(propagate_bloch(w, &c, t1).unwrap(), &c, t2).unwrap();
            let whole = propagate_bloch(w, &c, t1 + t2).unwrap();
            prop_assert!(split.max_abs_diff(whole) < 1e-12);
        }

        #[test]
        fn contraction_to_ground(w in ball_point(), tau in 0.0..15.0f64, g in 0.1..2.0f64) {
            let c = DissipatorCoefficients::vacuum(g, 13.0).unwrap();
            let d = (propagate_bloch(w, &c, tau).unwrap() - BlochVector::ground()).norm();
            prop_assert!(d <= 2.0 * (-2.0 * c.a * tau).exp() + 1e-15);
        }
    }
}
