//! Optimal measurement scheduling for frequency estimation.
//!
//! For a probe at `theta = pi/2` the frequency QFI is `e^{-gamma tau} tau^2`
//! to leading order. A single shot is best at `tau = 2/gamma`; splitting a
//! total time `T` into `T/tau` repetitions gives the uncertainty
//! `1 / sqrt(T tau e^{-gamma tau})`, smallest at `tau = 1/gamma`.

use serde::{Deserialize, Serialize};

use crate::dynamics;
use crate::error::{domain, Error, Result};
use crate::types::{AtomSpec, Environment, Polarization, Warning};

/// Rates below this multiple of `gamma0` count as fully shielded.
pub const SHIELDED_RATE: f64 = 1e-12;

/// `T gamma` below which the repeated-measurement optimum is flagged.
pub const RAMSEY_MIN_T_GAMMA: f64 = 10.0;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleShotOptimum {
    pub tau_star: f64,
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyPlan {
    pub total_time: f64,
    pub tau_star: f64,
    pub n_star: f64,
    pub delta_omega_min: f64,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

/// Result of a bracketed one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub tau_star: f64,
    pub f_max: f64,
    /// The maximizer sits at an end of the bracket, so the curve may keep growing.
    pub at_boundary: bool,
    pub evaluations: usize,
}

fn check_rate(gamma: f64) -> Result<()> {
    if !gamma.is_finite() {
        return Err(domain(format!("decay rate must be finite, got {gamma}")));
    }
    if gamma <= 0.0 {
        return Err(Error::Shielded { gamma });
    }
    Ok(())
}

/// Best single-shot time and the QFI reached there.
pub fn optimal_single_shot(gamma: f64) -> Result<SingleShotOptimum> {
    check_rate(gamma)?;
    let tau_star = 2.0 / gamma;
    Ok(SingleShotOptimum { tau_star, f_max: (-2.0f64).exp() * tau_star * tau_star })
}

/// Golden-section maximization of `curve` over `[lo, hi]`, stopping once the
/// bracket is narrower than `tol` relative to its midpoint.
pub fn maximize_qfi_numeric<F>(curve: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut evaluations = 0;
    let mut eval = |tau: f64| -> Result<f64> {
        evaluations += 1;
        let v = curve(tau)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { tau, value: v });
        }
        Ok(v)
    };

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol * (0.5 * (a + b)).abs().max(f64::MIN_POSITIVE) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        }
    }
    let (mut tau_star, mut f_max) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let width = tol * (0.5 * (lo + hi)).abs();
    let mut at_boundary = false;
    for end in [lo, hi] {
        if (tau_star - end).abs() <= width.max(b - a) {
            let f_end = eval(end)?;
            if f_end >= f_max {
                tau_star = end;
                f_max = f_end;
            }
            at_boundary = true;
        }
    }
    Ok(Maximum { tau_star, f_max, at_boundary, evaluations })
}

/// Frequency uncertainty after `T / tau` shots of length `tau`.
pub fn ramsey_uncertainty(total_time: f64, tau: f64, gamma: f64) -> Result<f64> {
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(domain(format!("total time must be positive, got {total_time}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(domain(format!("shot time must be positive, got {tau}")));
    }
    if tau > total_time {
        return Err(domain(format!("shot time {tau} exceeds total time {total_time}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(domain(format!("decay rate must be nonnegative, got {gamma}")));
    }
    Ok(1.0 / (total_time * tau * (-gamma * tau).exp()).sqrt())
}

pub fn optimal_ramsey(total_time: f64, gamma: f64) -> Result<RamseyPlan> {
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(domain(format!("total time must be positive, got {total_time}")));
    }
    check_rate(gamma)?;
    let t_gamma = total_time * gamma;
    if t_gamma < 1.0 {
        return Err(domain(format!(
            "total time is {t_gamma} decay times; at least one is required"
        )));
    }
    let mut warnings = Vec::new();
    if t_gamma < RAMSEY_MIN_T_GAMMA {
        warnings.push(Warning::ShortProbingTime { t_gamma });
    }
    Ok(RamseyPlan {
        total_time,
        tau_star: 1.0 / gamma,
        n_star: t_gamma,
        delta_omega_min: (std::f64::consts::E * gamma / total_time).sqrt(),
        warnings,
    })
}

/// Effective rate for `atom` in `env`, or [`Error::Shielded`] when it vanishes
/// relative to `gamma0`.
pub fn resolved_rate(atom: &AtomSpec, env: &Environment, alpha: &Polarization) -> Result<f64> {
    let gamma = dynamics::effective_decay_rate(atom, env, alpha)?;
    if gamma <= SHIELDED_RATE * atom.gamma0 {
        return Err(Error::Shielded { gamma });
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn single_shot_examples() {
        let unbounded = optimal_single_shot(1.0).unwrap();
        assert_eq!(unbounded.tau_star, 2.0);
        assert!((unbounded.f_max - 4.0 * (-2.0f64).exp()).abs() < 1e-16);

        let axial = optimal_single_shot(2.0).unwrap();
        assert_eq!(axial.tau_star, 1.0);
        assert!((axial.f_max - (-2.0f64).exp()).abs() < 1e-16);

        let iso = optimal_single_shot(2.0 / 3.0).unwrap();
        assert!((iso.tau_star - 3.0).abs() < 1e-15);
        assert!((iso.f_max - 9.0 * (-2.0f64).exp()).abs() < 1e-14);

        assert!(matches!(optimal_single_shot(0.0), Err(Error::Shielded { .. })));
        assert!(optimal_single_shot(f64::NAN).is_err());
    }

    #[test]
    fn golden_section_examples() {
        let g = |gamma: f64| move |t: f64| Ok((-gamma * t).exp() * t * t);
        let m = maximize_qfi_numeric(g(1.0), 1e-3, 20.0, 1e-10).unwrap();
        assert!((m.tau_star - 2.0).abs() < 2e-6);
        assert!(!m.at_boundary);

        let m = maximize_qfi_numeric(g(2.0), 1e-3, 20.0, 1e-10).unwrap();
        assert!((m.tau_star - 1.0).abs() < 1e-6);

        let m = maximize_qfi_numeric(|t: f64| Ok(t * t), 0.0, 50.0, 1e-10).unwrap();
        assert!(m.at_boundary);
        assert_eq!(m.tau_star, 50.0);
        assert_eq!(m.f_max, 2500.0);
    }

    #[test]
    fn golden_section_shrinks_geometrically() {
        let m = maximize_qfi_numeric(|t: f64| Ok(-(t - 3.0).powi(2)), 1.0, 5.0, 1e-9).unwrap();
        // each evaluation shrinks the bracket by 0.618
        let bound = (4.0f64 / (1e-9 * 3.0)).ln() / (1.0 / INV_PHI).ln() + 5.0;
        assert!((m.evaluations as f64) <= bound);
    }

    #[test]
    fn golden_section_errors() {
        let nan = maximize_qfi_numeric(|_| Ok(f64::NAN), 1.0, 3.0, 1e-8);
        assert!(matches!(nan, Err(Error::NonFinite { .. })));
        assert!(maximize_qfi_numeric(Ok, 3.0, 1.0, 1e-8).is_err());
    }

    #[test]
    fn ramsey_uncertainty_examples() {
        let gamma = 1.7;
        for t in [10.0, 100.0, 1000.0] {
            let v = ramsey_uncertainty(t / gamma, 1.0 / gamma, gamma).unwrap();
            assert!((v - (E * gamma * gamma / t).sqrt()).abs() < 1e-14 * v);
        }
        let shot_noise = ramsey_uncertainty(40.0, 2.0, 0.0).unwrap();
        assert!((shot_noise - 1.0 / 80f64.sqrt()).abs() < 1e-16);

        let golden = ramsey_uncertainty(100.0, 2.0, 1.0).unwrap();
        assert!((golden - (E * E / 200.0).sqrt()).abs() < 1e-15);

        assert!(ramsey_uncertainty(1.0, 2.0, 1.0).is_err());
        assert!(ramsey_uncertainty(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ramsey_plans() {
        let plan = optimal_ramsey(1000.0, 1.0).unwrap();
        assert_eq!(plan.n_star, 1000.0);
        assert_eq!(plan.tau_star, 1.0);
        assert!((plan.delta_omega_min - (E / 1000.0).sqrt()).abs() < 1e-16);
        assert!(plan.warnings.is_empty());

        let iso = optimal_ramsey(1000.0, 2.0 / 3.0).unwrap();
        assert!((iso.n_star - 666.666_666_666_666_6).abs() < 1e-9);
        assert!((iso.delta_omega_min / plan.delta_omega_min - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);

        let short = optimal_ramsey(5.0, 1.0).unwrap();
        assert!(matches!(short.warnings[0], Warning::ShortProbingTime { .. }));
        assert!(optimal_ramsey(0.5, 1.0).is_err());
        assert!(matches!(optimal_ramsey(10.0, 0.0), Err(Error::Shielded { .. })));
    }

    #[test]
    fn ramsey_numeric_confirms_closed_form() {
        for gamma in [1.0, 2.0, 2.0 / 3.0] {
            let total = 1000.0 / gamma;
            let m = maximize_qfi_numeric(
                |t| ramsey_uncertainty(total, t, gamma).map(|u| -u),
                1e-3 / gamma,
                20.0 / gamma,
                1e-10,
            )
            .unwrap();
            assert!((m.tau_star * gamma - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn precision_monotone_in_rate_and_scales_with_time() {
        let mut last = 0.0;
        for i in 1..50 {
            let v = optimal_ramsey(1e4, 0.1 * f64::from(i)).unwrap().delta_omega_min;
            assert!(v > last);
            last = v;
        }
        let a = optimal_ramsey(100.0, 1.0).unwrap().delta_omega_min;
        let b = optimal_ramsey(400.0, 1.0).unwrap().delta_omega_min;
        assert!((a / b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn shielded_rate_detected() {
        let atom = AtomSpec::dimensionless(1e-6, 1.0, 0.0).unwrap();
        let env = Environment::boundary(1e-7).unwrap();
        assert!(matches!(resolved_rate(&atom, &env, &Polarization::transverse()), Err(Error::Shielded { .. })));
        // gamma = gamma0 (2e-6)^2 / 5 = 8e-13 gamma0
        let micro = Environment::boundary(1e-6).unwrap();
        assert!(matches!(resolved_rate(&atom, &micro, &Polarization::transverse()), Err(Error::Shielded { .. })));
        let farther = Environment::boundary(1e-4).unwrap();
        assert!(resolved_rate(&atom, &farther, &Polarization::transverse()).is_ok());
        let r = resolved_rate(&atom, &env, &Polarization::axial()).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }
}
