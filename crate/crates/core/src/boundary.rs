//! Response of the vacuum field to a perfectly reflecting plane.
//!
//! With `u = 2 lambda z0 / c` the fractional change of the spectral response
//! for a dipole parallel to the plane is
//! `f_par(u) = 3 / (2 u^3) * (u cos u + (u^2 - 1) sin u)` and for a dipole
//! along the normal `f_perp(u) = 3 / u^3 * (u cos u - sin u)`. Both suffer a
//! `u^-3` cancellation near the plane, so small arguments go through the
//! Taylor series instead.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::types::Polarization;

/// Below this argument the Taylor series is used.
pub const SERIES_SWITCH: f64 = 0.5;

/// Number of series terms (powers `u^0 .. u^16`); truncation error at the
/// switch point is below 1e-17.
const SERIES_TERMS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Series,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseEvaluation {
    pub u: f64,
    pub f_parallel: f64,
    pub f_perp: f64,
    pub branch: Branch,
}

fn check_arg(u: f64) -> Result<()> {
    if !(u.is_finite() && u > 0.0) {
        return Err(domain(format!("response argument must be positive, got {u}")));
    }
    Ok(())
}

fn branch_for(u: f64) -> Branch {
    if u < SERIES_SWITCH {
        Branch::Series
    } else {
        Branch::Direct
    }
}

/// Horner evaluation of `sum_{n>=1} coeff(n) u^(2n - 2)`.
fn series(u: f64, coeff: impl Fn(u32) -> f64) -> f64 {
    let u2 = u * u;
    let mut acc = 0.0;
    for n in (1..=SERIES_TERMS as u32).rev() {
        acc = acc * u2 + coeff(n);
    }
    acc
}

fn odd_factorial(n: u32) -> f64 {
    (1..=2 * n + 1).map(f64::from).product()
}

fn alternating(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn f_parallel_series(u: f64) -> f64 {
    series(u, |n| {
        let n_f = f64::from(n);
        -alternating(n) * 6.0 * n_f * n_f / odd_factorial(n)
    })
}

pub fn f_perp_series(u: f64) -> f64 {
    series(u, |n| alternating(n) * 6.0 * f64::from(n) / odd_factorial(n))
}

pub fn f_parallel_direct(u: f64) -> f64 {
    let (s, c) = u.sin_cos();
    1.5 * (u * c + (u * u - 1.0) * s) / (u * u * u)
}

pub fn f_perp_direct(u: f64) -> f64 {
    let (s, c) = u.sin_cos();
    3.0 * (u * c - s) / (u * u * u)
}

/// Response for a dipole in the mirror plane (`f_x = f_y`).
pub fn f_parallel(u: f64) -> Result<f64> {
    check_arg(u)?;
    Ok(match branch_for(u) {
        Branch::Series => f_parallel_series(u),
        Branch::Direct => f_parallel_direct(u),
    })
}

/// Response for a dipole along the mirror normal (`f_z`).
pub fn f_perp(u: f64) -> Result<f64> {
    check_arg(u)?;
    Ok(match branch_for(u) {
        Branch::Series => f_perp_series(u),
        Branch::Direct => f_perp_direct(u),
    })
}

pub fn evaluate(u: f64) -> Result<ResponseEvaluation> {
    Ok(ResponseEvaluation {
        u,
        f_parallel: f_parallel(u)?,
        f_perp: f_perp(u)?,
        branch: branch_for(u),
    })
}

fn d_parallel_series(u: f64) -> f64 {
    // term-by-term derivative; the n = 1 term is constant
    series(u, |n| {
        let n_f = f64::from(n + 1);
        -alternating(n + 1) * 6.0 * n_f * n_f * (2.0 * n_f - 2.0) / odd_factorial(n + 1)
    }) * u
}

fn d_perp_series(u: f64) -> f64 {
    series(u, |n| {
        let n_f = f64::from(n + 1);
        alternating(n + 1) * 6.0 * n_f * (2.0 * n_f - 2.0) / odd_factorial(n + 1)
    }) * u
}

/// `d f_par / du`.
pub fn d_f_parallel_du(u: f64) -> Result<f64> {
    check_arg(u)?;
    Ok(match branch_for(u) {
        Branch::Series => d_parallel_series(u),
        Branch::Direct => {
            let (s, c) = u.sin_cos();
            let u2 = u * u;
            1.5 * ((u2 * u - 3.0 * u) * c + (3.0 - 2.0 * u2) * s) / (u2 * u2)
        }
    })
}

/// `d f_perp / du`.
pub fn d_f_perp_du(u: f64) -> Result<f64> {
    check_arg(u)?;
    Ok(match branch_for(u) {
        Branch::Series => d_perp_series(u),
        Branch::Direct => {
            let (s, c) = u.sin_cos();
            let u2 = u * u;
            3.0 * (-3.0 * u * c + (3.0 - u2) * s) / (u2 * u2)
        }
    })
}

/// Polarization-weighted response `f = sum_i alpha_i f_i` at
/// `u = 2 * lambda_ratio * zeta`.
pub fn f_eff_at(alpha: &Polarization, zeta: f64, lambda_ratio: f64) -> Result<f64> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(domain(format!("boundary distance must be positive, got {zeta}")));
    }
    if !(lambda_ratio.is_finite() && lambda_ratio > 0.0) {
        return Err(domain(format!("frequency ratio must be positive, got {lambda_ratio}")));
    }
    let u = 2.0 * lambda_ratio * zeta;
    Ok(alpha.parallel_weight() * f_parallel(u)? + alpha.alpha_z * f_perp(u)?)
}

/// `1 - f` at the transition frequency. Near the plane the leading series
/// term is dropped analytically so that a nearly shielded rate keeps its
/// relative precision.
pub fn one_minus_f_eff(alpha: &Polarization, zeta: f64) -> Result<f64> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(domain(format!("boundary distance must be positive, got {zeta}")));
    }
    let u = 2.0 * zeta;
    let (par, perp) = match branch_for(u) {
        Branch::Series => (
            -series(u, |n| {
                let n_f = f64::from(n + 1);
                -alternating(n + 1) * 6.0 * n_f * n_f / odd_factorial(n + 1)
            }) * u
                * u,
            1.0 - f_perp_series(u),
        ),
        Branch::Direct => (1.0 - f_parallel_direct(u), 1.0 - f_perp_direct(u)),
    };
    Ok(alpha.parallel_weight() * par + alpha.alpha_z * perp)
}

/// [`f_eff_at`] at the transition frequency.
pub fn f_eff(alpha: &Polarization, zeta: f64) -> Result<f64> {
    f_eff_at(alpha, zeta, 1.0)
}

/// `d f / du` for the weighted response.
pub fn df_eff_du(alpha: &Polarization, u: f64) -> Result<f64> {
    Ok(alpha.parallel_weight() * d_f_parallel_du(u)? + alpha.alpha_z * d_f_perp_du(u)?)
}

/// Derivative of the weighted response with respect to the transition
/// frequency at a fixed mirror distance. `z0_over_c` is the distance divided
/// by the speed of light, in the reciprocal of the frequency unit, so that
/// `u = 2 omega0 z0 / c`.
pub fn df_eff_domega0(alpha: &Polarization, omega0: f64, z0_over_c: f64) -> Result<f64> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(domain(format!("omega0 must be positive, got {omega0}")));
    }
    if !(z0_over_c.is_finite() && z0_over_c > 0.0) {
        return Err(domain(format!("boundary distance must be positive, got {z0_over_c}")));
    }
    let u = 2.0 * omega0 * z0_over_c;
    Ok(df_eff_du(alpha, u)? * 2.0 * z0_over_c)
}

/// Root of `f(zeta)` inside `[lo, hi]` by bisection; the response must change
/// sign on the bracket.
pub fn response_root(alpha: &Polarization, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |z: f64| f_eff(alpha, z);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(domain(format!(
            "no sign change of the response on [{lo}, {hi}]"
        )));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
